"""Sprite classes and deterministic rasterization.

A sprite class is defined by a star-convex shape family, a texture seed and
a base hue.  Rendering is a pure function of the class fields, an instance
seed and the requested pose (center, size, rotation), so repeated calls are
bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Shape families available to taxonomies: regular polygons and lobed blobs.
DEFAULT_SHAPE_KINDS = (
    "poly3", "poly4", "poly5", "poly6", "poly7", "poly8",
    "blob3", "blob4", "blob5", "blob6",
)

_BLOB_AMPLITUDE = 0.35
_TEXTURE_GRID = 5


@dataclass(frozen=True)
class SpriteClass:
    class_id: int
    shape_kind: str
    texture_seed: int
    base_hue: float  # in [0, 1)

    def __post_init__(self):
        if not 0.0 <= self.base_hue < 1.0:
            raise ValueError(f"base_hue must be in [0,1), got {self.base_hue}")
        _parse_kind(self.shape_kind)


def _parse_kind(kind: str) -> tuple[str, int]:
    for prefix in ("poly", "blob"):
        if kind.startswith(prefix):
            order = int(kind[len(prefix):])
            if order < 3:
                raise ValueError(f"shape order must be >= 3: {kind}")
            return prefix, order
    raise ValueError(f"unknown shape_kind {kind!r}")


def _radius_profile(kind: str, theta: np.ndarray) -> np.ndarray:
    """Boundary distance (relative to circumradius 1) at polar angle theta."""
    family, order = _parse_kind(kind)
    if family == "poly":
        step = 2.0 * math.pi / order
        local = np.mod(theta, step) - step / 2.0
        return math.cos(math.pi / order) / np.cos(local)
    # blob: lobed closed curve, normalized so the max radius is 1
    a = _BLOB_AMPLITUDE
    return (1.0 + a * np.cos(order * theta)) / (1.0 + a)


def _hsv_to_rgb(h: np.ndarray, s: float, v: np.ndarray) -> np.ndarray:
    """Vectorized HSV -> RGB for arrays of hue/value, returns float in [0,1]."""
    h6 = (h % 1.0) * 6.0
    i = np.floor(h6).astype(int) % 6
    f = h6 - np.floor(h6)
    p = v * (1.0 - s)
    q = v * (1.0 - s * f)
    t = v * (1.0 - s * (1.0 - f))
    out = np.empty(h.shape + (3,), dtype=np.float64)
    choices = [(v, t, p), (q, v, p), (p, v, t), (p, q, v), (t, p, v), (v, p, q)]
    for idx, (r, g, b) in enumerate(choices):
        sel = i == idx
        out[sel, 0] = np.broadcast_to(r, h.shape)[sel]
        out[sel, 1] = np.broadcast_to(g, h.shape)[sel]
        out[sel, 2] = np.broadcast_to(b, h.shape)[sel]
    return out


def _upsample_bilinear(grid: np.ndarray, ys: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Sample a small value-noise grid at fractional (ys, xs), tiled periodically."""
    n = grid.shape[0]
    y0 = np.floor(ys).astype(int)
    x0 = np.floor(xs).astype(int)
    fy = ys - y0
    fx = xs - x0
    y0 %= n
    x0 %= n
    y1 = (y0 + 1) % n
    x1 = (x0 + 1) % n
    top = grid[y0, x0] * (1 - fx) + grid[y0, x1] * fx
    bot = grid[y1, x0] * (1 - fx) + grid[y1, x1] * fx
    return top * (1 - fy) + bot * fy


def instance_traits(sprite: SpriteClass, instance_seed: int) -> dict:
    """Per-instance appearance jitter, a pure function of (class, seed)."""
    rng = np.random.default_rng([sprite.texture_seed, instance_seed, 0x5EED])
    return {
        "hue_jitter": float(rng.uniform(-0.02, 0.02)),
        "texture_shift": (float(rng.uniform(0, _TEXTURE_GRID)),
                          float(rng.uniform(0, _TEXTURE_GRID))),
        "size_factor": float(rng.uniform(0.8, 1.2)),
    }


def rasterize_sprite(
    sprite: SpriteClass,
    instance_seed: int,
    center: tuple[float, float],
    radius: float,
    angle: float,
) -> tuple[np.ndarray, np.ndarray, tuple[int, int]]:
    """Rasterize one sprite on the image pixel grid.

    Returns (mask, rgb, (x0, y0)) where mask/rgb are a patch of pixels whose
    top-left pixel has image coordinates (x0, y0).  Pixels are evaluated at
    their centers, so placement is subpixel-accurate and fully deterministic.
    """
    cx, cy = center
    ext = radius + 1.5
    x0 = int(math.floor(cx - ext))
    y0 = int(math.floor(cy - ext))
    x1 = int(math.ceil(cx + ext))
    y1 = int(math.ceil(cy + ext))
    xs = np.arange(x0, x1) + 0.5
    ys = np.arange(y0, y1) + 0.5
    gx, gy = np.meshgrid(xs - cx, ys - cy)
    dist = np.hypot(gx, gy)
    theta = np.arctan2(gy, gx) - angle
    mask = dist <= radius * _radius_profile(sprite.shape_kind, theta)

    traits = instance_traits(sprite, instance_seed)
    grid = np.random.default_rng(sprite.texture_seed).random((_TEXTURE_GRID, _TEXTURE_GRID))
    sy, sx = traits["texture_shift"]
    # texture sampled in sprite-local (rotated) coordinates so it spins along
    lx = (gx * math.cos(-angle) - gy * math.sin(-angle)) / max(radius, 1e-6)
    ly = (gx * math.sin(-angle) + gy * math.cos(-angle)) / max(radius, 1e-6)
    noise = _upsample_bilinear(grid, ly * 1.5 + sy, lx * 1.5 + sx)
    value = 0.55 + 0.45 * noise
    hue = np.full(mask.shape, (sprite.base_hue + traits["hue_jitter"]) % 1.0)
    rgb = _hsv_to_rgb(hue, 0.85, value)
    return mask, rgb, (x0, y0)


def build_taxonomy(
    classes: int | dict[str, int],
    seed: int = 0,
    kinds: tuple[str, ...] = DEFAULT_SHAPE_KINDS,
) -> tuple[list[SpriteClass], dict[int, int]]:
    """Create sprite classes plus a class -> node assignment.

    Nodes group classes by shape family: classes sharing a shape kind share a
    node, which is the granularity at which dataset splits are made.  Pass an
    int for round-robin kind assignment or an explicit {kind: count} map.
    """
    if isinstance(classes, int):
        if classes < 1:
            raise ValueError("need at least one class")
        counts: dict[str, int] = {}
        for i in range(classes):
            kind = kinds[i % len(kinds)]
            counts[kind] = counts.get(kind, 0) + 1
    else:
        counts = dict(classes)
    total = sum(counts.values())
    rng = np.random.default_rng([seed, 0x7A11])
    hues = (np.arange(total) / total + rng.uniform(0, 1.0 / total)) % 1.0
    hues = hues[rng.permutation(total)]
    texture_seeds = rng.integers(0, 2**31 - 1, size=total)

    node_of_kind = {kind: i for i, kind in enumerate(sorted(counts))}
    sprite_classes: list[SpriteClass] = []
    node_assignment: dict[int, int] = {}
    cid = 0
    for kind in sorted(counts):
        for _ in range(counts[kind]):
            sprite_classes.append(SpriteClass(
                class_id=cid,
                shape_kind=kind,
                texture_seed=int(texture_seeds[cid]),
                base_hue=float(hues[cid]),
            ))
            node_assignment[cid] = node_of_kind[kind]
            cid += 1
    return sprite_classes, node_assignment
