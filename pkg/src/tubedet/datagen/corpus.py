"""Dataset assembly and disk layout.

Layout under a dataset root:
    {video_id}/{frame_index:06d}.png   lossless frames
    manifests/{video_id}.json          one manifest per video
    split.json                         class split
    config.json                        echo of the generating config
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .manifest import DatasetSplit, FilterRules, VideoManifest, filter_manifests, split_classes
from .sprites import SpriteClass, build_taxonomy
from .video import MotionParams, VideoSpec, generate_video


@dataclass
class VideoRecord:
    frames: np.ndarray  # (T, H, W, 3) uint8
    manifest: VideoManifest


@dataclass
class DataConfig:
    num_classes: int = 20
    videos_per_class: int = 4
    frame_count: int = 8
    frame_size: tuple[int, int] = (64, 64)
    max_instances: int = 2
    occluder_rate: float = 0.3
    split_ratios: tuple[float, float, float] = (0.6, 0.15, 0.25)
    filter_rules: FilterRules = field(default_factory=FilterRules)
    motion: MotionParams = field(default_factory=MotionParams)
    seed: int = 0

    def to_json_dict(self) -> dict:
        return asdict(self)


class Corpus:
    """In-memory video collection with an optional class split."""

    def __init__(self, split: DatasetSplit | None = None):
        self.videos: dict[str, VideoRecord] = {}
        self.split = split

    def add(self, frames: np.ndarray, manifest: VideoManifest) -> None:
        if manifest.video_id in self.videos:
            raise ValueError(f"duplicate video_id {manifest.video_id}")
        self.videos[manifest.video_id] = VideoRecord(frames=frames, manifest=manifest)

    def video_ids(self) -> list[str]:
        return sorted(self.videos)

    def classes_present(self) -> set[int]:
        out: set[int] = set()
        for rec in self.videos.values():
            out |= rec.manifest.target_class_ids
        return out

    def videos_for_class(self, class_id: int) -> list[str]:
        return [v for v in self.video_ids()
                if class_id in self.videos[v].manifest.target_class_ids]

    def videos_for_split(self, split_name: str) -> list[str]:
        if self.split is None:
            raise ValueError("corpus has no split")
        classes = self.split.classes_for(split_name)
        return [v for v in self.video_ids()
                if self.videos[v].manifest.target_class_ids <= classes
                and self.videos[v].manifest.target_class_ids]

    def summary(self) -> dict:
        per_split = {}
        names = ("train", "val", "test") if self.split else ("all",)
        for name in names:
            vids = (self.videos_for_split(name) if self.split else self.video_ids())
            classes: set[int] = set()
            tracks = frames = boxes = 0
            for v in vids:
                m = self.videos[v].manifest
                classes |= m.target_class_ids
                tracks += len(m.tracks)
                frames += m.frame_count
                boxes += sum(len(t.boxes) for t in m.tracks)
            per_split[name] = {
                "classes": len(classes), "videos": len(vids),
                "tracks": tracks, "frames": frames, "boxes": boxes,
            }
        return per_split

    def save(self, root: Path | str, force: bool = False, config: dict | None = None) -> None:
        root = Path(root)
        if root.exists() and any(root.iterdir()) and not force:
            raise FileExistsError(f"output directory {root} is not empty (use force)")
        (root / "manifests").mkdir(parents=True, exist_ok=True)
        for vid in self.video_ids():
            rec = self.videos[vid]
            vdir = root / vid
            vdir.mkdir(exist_ok=True)
            for t in range(rec.frames.shape[0]):
                Image.fromarray(rec.frames[t]).save(vdir / f"{t:06d}.png")
            rec.manifest.save(root / "manifests" / f"{vid}.json")
        if self.split is not None:
            self.split.save(root / "split.json")
        if config is not None:
            (root / "config.json").write_text(json.dumps(config, indent=2, sort_keys=True))

    @classmethod
    def load(cls, root: Path | str) -> "Corpus":
        root = Path(root)
        mdir = root / "manifests"
        if not mdir.is_dir():
            raise FileNotFoundError(f"no manifests directory under {root}")
        split = None
        if (root / "split.json").exists():
            split = DatasetSplit.load(root / "split.json")
        corpus = cls(split=split)
        for mpath in sorted(mdir.glob("*.json")):
            manifest = VideoManifest.load(mpath)
            vdir = root / manifest.video_id
            frames = np.stack([
                np.asarray(Image.open(vdir / f"{t:06d}.png"))
                for t in range(manifest.frame_count)
            ])
            corpus.add(frames, manifest)
        return corpus


def make_dataset(config: DataConfig, taxonomy: list[SpriteClass] | None = None,
                 node_assignment: dict[int, int] | None = None,
                 split: DatasetSplit | None = None) -> Corpus:
    """Generate, filter and split a full synthetic dataset.

    A taxonomy/split may be passed explicitly (benchmarks with hand-picked
    class layouts); otherwise both are derived from the config seed.
    """
    if taxonomy is None:
        taxonomy, node_assignment = build_taxonomy(config.num_classes, seed=config.seed)
    assert node_assignment is not None
    by_id = {c.class_id: c for c in taxonomy}

    manifests: list[VideoManifest] = []
    frames_by_id: dict[str, np.ndarray] = {}
    for sprite in taxonomy:
        for v in range(config.videos_per_class):
            vid = f"c{sprite.class_id:03d}v{v:02d}"
            vseed = int(np.random.default_rng(
                [config.seed, sprite.class_id, v, 0xDA7A]).integers(0, 2**31 - 1))
            inst_rng = np.random.default_rng([vseed, 0x1257])
            spec = VideoSpec(
                classes=[sprite],
                instances_per_class=int(inst_rng.integers(1, config.max_instances + 1)),
                frame_count=config.frame_count,
                frame_size=config.frame_size,
                motion=config.motion,
                occluder_rate=config.occluder_rate,
                video_id=vid,
            )
            frames, manifest = generate_video(spec, vseed)
            manifests.append(manifest)
            frames_by_id[vid] = frames

    manifests = filter_manifests(manifests, config.filter_rules, seed=config.seed)
    surviving = {c for m in manifests for c in m.target_class_ids}
    if split is None:
        split = split_classes(surviving,
                              {c: node_assignment[c] for c in surviving},
                              config.split_ratios, seed=config.seed)
    corpus = Corpus(split=split)
    for m in manifests:
        corpus.add(frames_by_id[m.video_id], m)
    corpus.taxonomy = {c.class_id: c for c in taxonomy if c.class_id in surviving}
    return corpus
