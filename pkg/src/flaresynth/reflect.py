"""Reflective-flare rendering: a chain of irises on the line through the light
source and the optical center, with clipping and caustics triggers.

Each iris sits at optical_center + k * (light_pos - optical_center); negative k
places it on the opposite side, matching how ghosts move against the light.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .imagecore import EncodedImage, screen_blend_arrays
from .scatter import _polygon_boundary_radius


@dataclass(frozen=True)
class PolygonShape:
    sides: int

    def __post_init__(self):
        if self.sides < 3:
            raise ValueError("polygon iris needs >= 3 sides")


@dataclass(frozen=True)
class RingShape:
    ratio: float  # inner/outer radius

    def __post_init__(self):
        if not (0 < self.ratio < 1):
            raise ValueError("ring ratio must be in (0, 1)")


@dataclass(frozen=True)
class LatticeShape:
    rows: int
    cols: int
    pitch: float
    cell_radius: float

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("lattice rows and cols must be >= 1")
        if self.pitch <= 0 or self.cell_radius <= 0:
            raise ValueError("lattice pitch and cell radius must be > 0")


IrisShape = PolygonShape | RingShape | LatticeShape


@dataclass(frozen=True)
class CausticsSpec:
    opacity_slope: float  # opacity per pixel of iris-light distance

    def __post_init__(self):
        if self.opacity_slope < 0:
            raise ValueError("opacity_slope must be >= 0")


@dataclass(frozen=True)
class ClipSpec:
    threshold: float  # pixels of iris-light distance before clipping starts
    mask_scale: float = 1.0

    def __post_init__(self):
        if self.threshold < 0 or self.mask_scale <= 0:
            raise ValueError("clip threshold must be >= 0 and mask_scale > 0")


@dataclass(frozen=True)
class IrisSpec:
    k: float  # signed position coefficient along the flare axis
    size: float
    rgb: tuple[float, float, float]
    opacity: float
    shape: IrisShape
    edge_feather: float = 1.5
    caustics: CausticsSpec | None = None
    clip: ClipSpec | None = None

    def __post_init__(self):
        if self.size <= 0:
            raise ValueError("iris size must be > 0")
        if not (0 <= self.opacity <= 1):
            raise ValueError("iris opacity must be in [0, 1]")
        if self.edge_feather <= 0:
            raise ValueError("edge_feather must be > 0")


@dataclass(frozen=True)
class ReflectTemplate:
    canvas: tuple[int, int]
    optical_center: tuple[float, float]
    irises: tuple[IrisSpec, ...]

    def __post_init__(self):
        w, h = self.canvas
        x, y = self.optical_center
        if not (0 <= x < w and 0 <= y < h):
            raise ValueError("optical_center must lie inside the canvas")
        irises = tuple(self.irises)
        if not irises:
            raise ValueError("template needs at least one iris")
        object.__setattr__(self, "irises", irises)


def place_irises(
    t: ReflectTemplate, light_pos: tuple[float, float]
) -> list[tuple[IrisSpec, tuple[float, float]]]:
    """Center each iris at optical_center + k * (light_pos - optical_center)."""
    cx, cy = t.optical_center
    lx, ly = light_pos
    vx, vy = lx - cx, ly - cy
    return [
        (iris, (cx + iris.k * vx, cy + iris.k * vy)) for iris in t.irises
    ]


def _feathered(field: np.ndarray, feather: float) -> np.ndarray:
    """Map a signed inside-distance field to [0, 1] alpha over `feather` px."""
    return np.clip(field / feather + 0.5, 0.0, 1.0)


def _shape_alpha(shape: IrisShape, size: float, dx, dy, feather: float):
    d = np.hypot(dx, dy)
    if isinstance(shape, PolygonShape):
        phi = np.arctan2(dy, dx)
        rb = _polygon_boundary_radius(phi, shape.sides, size)
        return _feathered(rb - d, feather)
    if isinstance(shape, RingShape):
        outer = _feathered(size - d, feather)
        inner = _feathered(d - shape.ratio * size, feather)
        return outer * inner
    if isinstance(shape, LatticeShape):
        alpha = np.zeros_like(d)
        r0 = -(shape.rows - 1) / 2.0
        c0 = -(shape.cols - 1) / 2.0
        for r in range(shape.rows):
            for c in range(shape.cols):
                ox = (c0 + c) * shape.pitch
                oy = (r0 + r) * shape.pitch
                dd = np.hypot(dx - ox, dy - oy)
                alpha = np.maximum(
                    alpha, _feathered(shape.cell_radius - dd, feather)
                )
        return alpha
    raise TypeError(f"unknown iris shape {shape!r}")


def render_iris(spec: IrisSpec, center, canvas) -> EncodedImage:
    """Antialiased filled iris shape, tinted and scaled by opacity."""
    w, h = canvas
    cx, cy = center
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    alpha = _shape_alpha(spec.shape, spec.size, xs - cx, ys - cy, spec.edge_feather)
    rgb = np.asarray(spec.rgb, dtype=np.float64)
    img = spec.opacity * alpha[:, :, None] * rgb[None, None, :]
    return EncodedImage(np.clip(img, 0.0, 1.0).astype(np.float32))


def apply_clipping(
    iris_img: EncodedImage,
    spec: IrisSpec,
    iris_light_distance: float,
    canvas,
    center: tuple[float, float],
    axis_dir: tuple[float, float] = (1.0, 0.0),
) -> EncodedImage:
    """Erase the far portion of an iris once the iris-light distance exceeds
    the clip threshold, by intersecting with an offset mask disc.

    The mask disc has radius mask_scale * size and slides along the flare axis
    proportionally to (distance - threshold), so the erased fraction grows
    monotonically with distance.
    """
    if spec.clip is None:
        raise ValueError("iris has no clip spec")
    excess = iris_light_distance - spec.clip.threshold
    if excess <= 0:
        return iris_img
    w, h = canvas
    cx, cy = center
    ax, ay = axis_dir
    norm = math.hypot(ax, ay) or 1.0
    ax, ay = ax / norm, ay / norm
    # slide the mask a quarter of the excess per pixel of distance
    offset = 0.25 * excess
    mx, my = cx + ax * offset, cy + ay * offset
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    dd = np.hypot(xs - mx, ys - my)
    mask_r = spec.clip.mask_scale * spec.size
    mask = _feathered(mask_r - dd, spec.edge_feather)
    return EncodedImage(
        (iris_img.data * mask[:, :, None].astype(np.float32)).astype(np.float32)
    )


def render_caustics(
    spec: IrisSpec, center, iris_light_distance: float, canvas
) -> EncodedImage:
    """Concentric interference-style rings inside the iris, with opacity
    proportional to the iris-light distance (zero at zero distance)."""
    if spec.caustics is None:
        raise ValueError("iris has no caustics spec")
    w, h = canvas
    cx, cy = center
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    d = np.hypot(xs - cx, ys - cy)
    support = np.clip(1.0 - d / spec.size, 0.0, 1.0)
    ring_pitch = max(spec.size / 6.0, 2.0)
    rings = 0.5 + 0.5 * np.cos(2 * math.pi * d / ring_pitch)
    opacity = min(1.0, spec.caustics.opacity_slope * iris_light_distance)
    rgb = np.asarray(spec.rgb, dtype=np.float64)
    img = opacity * rings[:, :, None] * support[:, :, None] * rgb[None, None, :]
    return EncodedImage(np.clip(img, 0.0, 1.0).astype(np.float32))


def render_reflect(
    t: ReflectTemplate, light_pos: tuple[float, float]
) -> EncodedImage:
    """Screen-blend all placed irises with their clipping and caustics."""
    w, h = t.canvas
    lx, ly = light_pos
    if not (0 <= lx < w and 0 <= ly < h):
        raise ValueError("light_pos must lie inside the canvas")
    cx, cy = t.optical_center
    out = np.zeros((h, w, 3), dtype=np.float64)
    for iris, center in place_irises(t, light_pos):
        dist = math.hypot(center[0] - lx, center[1] - ly)
        layer = render_iris(iris, center, t.canvas)
        if iris.caustics is not None:
            caustic = render_caustics(iris, center, dist, t.canvas)
            layer = EncodedImage(
                np.clip(
                    screen_blend_arrays(layer.data, caustic.data), 0.0, 1.0
                ).astype(np.float32)
            )
        if iris.clip is not None:
            vx, vy = center[0] - lx, center[1] - ly
            if vx == 0 and vy == 0:
                vx, vy = 1.0, 0.0
            layer = apply_clipping(layer, iris, dist, t.canvas, center, (vx, vy))
        out = screen_blend_arrays(out, layer.data.astype(np.float64))
    return EncodedImage(np.clip(out, 0.0, 1.0).astype(np.float32))
