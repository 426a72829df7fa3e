from .sprites import DEFAULT_SHAPE_KINDS, SpriteClass, build_taxonomy, rasterize_sprite
from .manifest import (
    DatasetSplit,
    FilterRules,
    TrackAnnotation,
    VideoManifest,
    filter_manifests,
    split_classes,
)
from .video import (
    MotionParams,
    Occluder,
    RenderTrace,
    SpriteInstance,
    VideoSpec,
    generate_video,
    render_video,
    sample_instances,
)
from .corpus import Corpus, DataConfig, VideoRecord, make_dataset

__all__ = [
    "DEFAULT_SHAPE_KINDS", "SpriteClass", "build_taxonomy", "rasterize_sprite",
    "DatasetSplit", "FilterRules", "TrackAnnotation", "VideoManifest",
    "filter_manifests", "split_classes",
    "MotionParams", "Occluder", "RenderTrace", "SpriteInstance", "VideoSpec",
    "generate_video", "render_video", "sample_instances",
    "Corpus", "DataConfig", "VideoRecord", "make_dataset",
]
