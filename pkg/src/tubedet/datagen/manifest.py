"""Video manifests: exhaustive track annotations, filtering and class splits."""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass
class TrackAnnotation:
    """One object's boxes over a contiguous frame interval.

    Boxes are (x1, y1, x2, y2) pixel floats with x2/y2 exclusive.
    """
    track_id: int
    class_id: int
    boxes: dict[int, tuple[float, float, float, float]]

    @property
    def first_frame(self) -> int:
        return min(self.boxes)

    @property
    def last_frame(self) -> int:
        return max(self.boxes)

    def validate(self) -> None:
        if not self.boxes:
            raise ValueError(f"track {self.track_id} has no boxes")
        frames = sorted(self.boxes)
        if frames != list(range(frames[0], frames[-1] + 1)):
            raise ValueError(f"track {self.track_id} frames not contiguous: {frames}")
        for f, (x1, y1, x2, y2) in self.boxes.items():
            if not (x1 < x2 and y1 < y2):
                raise ValueError(f"track {self.track_id} frame {f} degenerate box")


@dataclass
class VideoManifest:
    video_id: str
    frame_count: int
    frame_size: tuple[int, int]  # (width, height)
    tracks: list[TrackAnnotation]
    target_class_ids: set[int]

    def validate(self) -> None:
        w, h = self.frame_size
        seen_ids = set()
        for track in self.tracks:
            track.validate()
            if track.track_id in seen_ids:
                raise ValueError(f"duplicate track_id {track.track_id}")
            seen_ids.add(track.track_id)
            if track.class_id not in self.target_class_ids:
                raise ValueError(
                    f"track {track.track_id} class {track.class_id} not a target class")
            for f, (x1, y1, x2, y2) in track.boxes.items():
                if not (0 <= f < self.frame_count):
                    raise ValueError(f"frame index {f} out of range")
                if x1 < 0 or y1 < 0 or x2 > w or y2 > h:
                    raise ValueError(f"box out of bounds at frame {f}: {(x1, y1, x2, y2)}")

    def boxes_at(self, frame: int, class_id: int | None = None):
        """GT at one frame as (boxes [N,4], track_ids [N], class_ids [N])."""
        boxes, tids, cids = [], [], []
        for track in self.tracks:
            if frame in track.boxes and (class_id is None or track.class_id == class_id):
                boxes.append(track.boxes[frame])
                tids.append(track.track_id)
                cids.append(track.class_id)
        if not boxes:
            return (np.zeros((0, 4), dtype=np.float64),
                    np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64))
        return (np.asarray(boxes, dtype=np.float64),
                np.asarray(tids, dtype=np.int64), np.asarray(cids, dtype=np.int64))

    def to_json_dict(self) -> dict:
        return {
            "video_id": self.video_id,
            "frame_count": self.frame_count,
            "frame_size": [self.frame_size[0], self.frame_size[1]],
            "target_class_ids": sorted(self.target_class_ids),
            "tracks": [
                {
                    "track_id": t.track_id,
                    "class_id": t.class_id,
                    "boxes": {str(f): [float(v) for v in b] for f, b in sorted(t.boxes.items())},
                }
                for t in sorted(self.tracks, key=lambda t: t.track_id)
            ],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "VideoManifest":
        tracks = [
            TrackAnnotation(
                track_id=int(t["track_id"]),
                class_id=int(t["class_id"]),
                boxes={int(f): tuple(float(v) for v in b) for f, b in t["boxes"].items()},
            )
            for t in d["tracks"]
        ]
        return cls(
            video_id=d["video_id"],
            frame_count=int(d["frame_count"]),
            frame_size=(int(d["frame_size"][0]), int(d["frame_size"][1])),
            tracks=tracks,
            target_class_ids={int(c) for c in d["target_class_ids"]},
        )

    def save(self, path: Path | str) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict(), indent=2, sort_keys=True))

    @classmethod
    def load(cls, path: Path | str) -> "VideoManifest":
        return cls.from_json_dict(json.loads(Path(path).read_text()))


@dataclass
class FilterRules:
    min_videos_per_class: int = 3
    max_videos_per_class: int = 30
    min_box_area: float = 0.0


def _class_video_counts(manifests: list[VideoManifest]) -> dict[int, list[str]]:
    out: dict[int, list[str]] = {}
    for m in manifests:
        for c in sorted(m.target_class_ids):
            out.setdefault(c, []).append(m.video_id)
    return out


def filter_manifests(
    manifests: list[VideoManifest],
    rules: FilterRules = FilterRules(),
    seed: int = 0,
) -> list[VideoManifest]:
    """Enforce per-class video-count bounds and drop tiny-object videos.

    Over-cap classes are reduced by seeded uniform subsampling; classes that
    end below the minimum are removed entirely.  Input order is preserved and
    inputs are not mutated.
    """
    if rules.min_videos_per_class > rules.max_videos_per_class:
        raise ValueError("min_videos_per_class must be <= max_videos_per_class")
    rng = np.random.default_rng([seed, 0xF117])

    kept = []
    for m in manifests:
        tiny = any(
            (x2 - x1) * (y2 - y1) < rules.min_box_area
            for t in m.tracks for (x1, y1, x2, y2) in t.boxes.values()
        )
        if not tiny:
            kept.append(copy.deepcopy(m))

    # cap over-represented classes by seeded subsampling of their videos
    counts = _class_video_counts(kept)
    drop_pairs: set[tuple[str, int]] = set()  # (video_id, class_id) to strip
    for c in sorted(counts):
        vids = counts[c]
        if len(vids) > rules.max_videos_per_class:
            keep_idx = rng.choice(len(vids), size=rules.max_videos_per_class, replace=False)
            keep = {vids[i] for i in keep_idx}
            drop_pairs.update((v, c) for v in vids if v not in keep)

    def strip(ms: list[VideoManifest], pairs: set[tuple[str, int]]) -> list[VideoManifest]:
        out = []
        for m in ms:
            doomed = {c for v, c in pairs if v == m.video_id}
            if doomed:
                m.tracks = [t for t in m.tracks if t.class_id not in doomed]
                m.target_class_ids = m.target_class_ids - doomed
            if m.target_class_ids:
                out.append(m)
        return out

    kept = strip(kept, drop_pairs)

    # remove under-represented classes until stable
    while True:
        counts = _class_video_counts(kept)
        small = {c for c, vids in counts.items() if len(vids) < rules.min_videos_per_class}
        if not small:
            break
        kept = strip(kept, {(v, c) for c in small for v in counts[c]})
    return kept


@dataclass
class DatasetSplit:
    train_class_ids: set[int]
    val_class_ids: set[int]
    test_class_ids: set[int]
    node_assignment: dict[int, int] = field(default_factory=dict)

    def validate(self) -> None:
        sets = [self.train_class_ids, self.val_class_ids, self.test_class_ids]
        for i in range(3):
            for j in range(i + 1, 3):
                if sets[i] & sets[j]:
                    raise ValueError(f"splits overlap: {sets[i] & sets[j]}")
        node_splits: dict[int, int] = {}
        for si, s in enumerate(sets):
            for c in s:
                node = self.node_assignment.get(c)
                if node is None:
                    continue
                if node_splits.setdefault(node, si) != si:
                    raise ValueError(f"node {node} appears in more than one split")

    def classes_for(self, split: str) -> set[int]:
        return {"train": self.train_class_ids,
                "val": self.val_class_ids,
                "test": self.test_class_ids}[split]

    def to_json_dict(self) -> dict:
        return {
            "train": sorted(self.train_class_ids),
            "val": sorted(self.val_class_ids),
            "test": sorted(self.test_class_ids),
            "node_assignment": {str(c): n for c, n in sorted(self.node_assignment.items())},
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "DatasetSplit":
        return cls(
            train_class_ids=set(d["train"]),
            val_class_ids=set(d["val"]),
            test_class_ids=set(d["test"]),
            node_assignment={int(c): int(n) for c, n in d["node_assignment"].items()},
        )

    def save(self, path: Path | str) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict(), indent=2, sort_keys=True))

    @classmethod
    def load(cls, path: Path | str) -> "DatasetSplit":
        return cls.from_json_dict(json.loads(Path(path).read_text()))


def split_classes(
    class_ids: set[int],
    node_assignment: dict[int, int],
    ratios: tuple[float, float, float],
    seed: int = 0,
) -> DatasetSplit:
    """Split classes into train/val/test at node granularity.

    All classes sharing a node land in the same split, so near-duplicate
    classes never straddle the train/eval boundary.
    """
    if any(r <= 0 for r in ratios):
        raise ValueError("all split ratios must be positive")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError("split ratios must sum to 1")
    missing = [c for c in class_ids if c not in node_assignment]
    if missing:
        raise ValueError(f"classes without node assignment: {sorted(missing)}")

    nodes: dict[int, list[int]] = {}
    for c in sorted(class_ids):
        nodes.setdefault(node_assignment[c], []).append(c)
    if len(nodes) < 3:
        raise ValueError(f"need at least 3 nodes to fill 3 splits, got {len(nodes)}")

    n_classes = len(class_ids)
    # largest-remainder targets in class counts
    raw = [r * n_classes for r in ratios]
    targets = [int(v) for v in raw]
    for _ in range(n_classes - sum(targets)):
        rema = [raw[i] - targets[i] for i in range(3)]
        i = int(np.argmax(rema))
        targets[i] += 1

    rng = np.random.default_rng([seed, 0x59117])
    node_ids = sorted(nodes)
    order = rng.permutation(len(node_ids))
    assigned: list[set[int]] = [set(), set(), set()]
    filled = [0, 0, 0]
    for k in order:
        node = node_ids[k]
        deficits = [targets[i] - filled[i] for i in range(3)]
        i = int(np.argmax(deficits))
        assigned[i].update(nodes[node])
        filled[i] += len(nodes[node])
    # a split may end empty if node granularity is too coarse; re-balance by
    # stealing the smallest node from the most overfull split
    for i in range(3):
        while not assigned[i]:
            donor = int(np.argmax(filled))
            donor_nodes = sorted({node_assignment[c] for c in assigned[donor]})
            if donor == i or len(donor_nodes) < 2:
                raise ValueError("not enough nodes to make all splits nonempty")
            node = min(donor_nodes, key=lambda n: len(nodes[n]))
            moved = set(nodes[node])
            assigned[donor] -= moved
            filled[donor] -= len(moved)
            assigned[i] |= moved
            filled[i] += len(moved)

    split = DatasetSplit(
        train_class_ids=assigned[0],
        val_class_ids=assigned[1],
        test_class_ids=assigned[2],
        node_assignment={c: node_assignment[c] for c in class_ids},
    )
    split.validate()
    return split
