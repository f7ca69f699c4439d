"""Parametric scattering-flare rendering: glare, streak, shimmer, light source.

Each component is rendered on its own layer in the gamma-encoded domain and
combined with screen blending, mirroring how compositing tools build flares.
Linearization happens only when training pairs are assembled (see compose).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .imagecore import (
    EncodedImage,
    fractal_noise,
    gaussian_blur,
    radial_blur,
    screen_blend_arrays,
)

VANISHING_FLOOR = 0.2  # opacity floor inside the vanishing sector


@dataclass(frozen=True)
class ColorCurve:
    """Piecewise-linear RGB profile over normalized distance t in [0, 1].

    The last control point must sit at t=1 with the zero triple so that the
    component fades to nothing at its radius.
    """

    control_points: tuple[tuple[float, tuple[float, float, float]], ...]

    def __post_init__(self):
        pts = tuple(
            (float(t), (float(r), float(g), float(b)))
            for t, (r, g, b) in self.control_points
        )
        if len(pts) < 2:
            raise ValueError("curve needs at least two control points")
        ts = [t for t, _ in pts]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("control point t values must be strictly increasing")
        if ts[0] != 0.0 or ts[-1] != 1.0:
            raise ValueError("curve must span t=0 to t=1")
        if any(abs(c) > 1e-12 for c in pts[-1][1]):
            raise ValueError("curve must end at the zero triple (fade to nothing)")
        object.__setattr__(self, "control_points", pts)

    def evaluate(self, t: np.ndarray) -> np.ndarray:
        """Evaluate at t (any shape), returning (..., 3). t is clipped to [0, 1]."""
        t = np.clip(np.asarray(t, dtype=np.float64), 0.0, 1.0)
        ts = np.array([p[0] for p in self.control_points])
        out = np.empty(t.shape + (3,), dtype=np.float64)
        for c in range(3):
            vals = np.array([p[1][c] for p in self.control_points])
            out[..., c] = np.interp(t, ts, vals)
        return out


def linear_fade_curve(rgb, end_t: float = 1.0) -> ColorCurve:
    """Convenience: straight fade from `rgb` at t=0 to black at t=1."""
    r, g, b = rgb
    return ColorCurve(((0.0, (r, g, b)), (1.0, (0.0, 0.0, 0.0))))


@dataclass(frozen=True)
class GlareSpec:
    radius: float
    curve: ColorCurve
    vanishing_angle: float = 0.0  # 0 disables the vanishing corner
    vanishing_direction: float = 0.0
    vanishing_feather: float = 0.3

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("glare radius must be > 0")
        if not (0 <= self.vanishing_angle < 2 * math.pi):
            raise ValueError("vanishing_angle must be in [0, 2*pi)")
        if self.vanishing_feather <= 0:
            raise ValueError("vanishing_feather must be > 0")


@dataclass(frozen=True)
class StreakSpec:
    direction: float
    length: float
    width: float
    section_curve: ColorCurve
    sharp_side_blur: float
    soft_side_blur: float
    falloff_curve: ColorCurve

    def __post_init__(self):
        if self.length <= 0 or self.width <= 0:
            raise ValueError("streak length and width must be > 0")
        if self.sharp_side_blur > self.soft_side_blur:
            raise ValueError("sharp_side_blur must be <= soft_side_blur")
        if self.sharp_side_blur < 0:
            raise ValueError("blur half-life values must be >= 0")


@dataclass(frozen=True)
class ShimmerSpec:
    spike_count: int
    radius: float
    intensity: float
    angular_jitter_seed: int
    noise_octaves: int = 4
    noise_radial_blur: float = 0.4
    rgb: tuple[float, float, float] = (1.0, 0.9, 0.8)

    def __post_init__(self):
        if self.spike_count < 3:
            raise ValueError("spike_count must be >= 3")
        if self.radius <= 0:
            raise ValueError("shimmer radius must be > 0")
        if not (0 <= self.intensity <= 1):
            raise ValueError("intensity must be in [0, 1]")
        if self.noise_octaves < 1:
            raise ValueError("noise_octaves must be >= 1")


@dataclass(frozen=True)
class LightSourceSpec:
    shape: int | str  # polygon side count (>= 3) or "disc"
    core_radius: float
    glow_radius: float
    rgb: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def __post_init__(self):
        if isinstance(self.shape, str):
            if self.shape != "disc":
                raise ValueError("shape must be a side count or 'disc'")
        elif self.shape < 3:
            raise ValueError("polygon shape needs >= 3 sides")
        if not (self.glow_radius >= self.core_radius > 0):
            raise ValueError("need glow_radius >= core_radius > 0")


@dataclass(frozen=True)
class ScatterTemplate:
    canvas: tuple[int, int]  # (width, height)
    source_pos: tuple[float, float]
    glare: GlareSpec
    streaks: tuple[StreakSpec, ...] = ()
    shimmer: ShimmerSpec | None = None
    light: LightSourceSpec | None = None

    def __post_init__(self):
        w, h = self.canvas
        x, y = self.source_pos
        if not (0 <= x < w and 0 <= y < h):
            raise ValueError("source_pos must lie inside the canvas")
        object.__setattr__(self, "streaks", tuple(self.streaks))


@dataclass(frozen=True)
class FlareLayers:
    """Rendered scattering flare split into its annotated components."""

    flare: EncodedImage
    light_source: EncodedImage
    glare_layer: EncodedImage
    streak_layer: EncodedImage
    shimmer_layer: EncodedImage

    def __post_init__(self):
        shp = self.flare.data.shape
        for name in ("light_source", "glare_layer", "streak_layer", "shimmer_layer"):
            if getattr(self, name).data.shape != shp:
                raise ValueError(f"layer {name} shape differs from flare")


def _pixel_grid(canvas, source_pos):
    w, h = canvas
    sx, sy = source_pos
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    return xs - sx, ys - sy


def render_glare(
    spec: GlareSpec, source_pos, canvas
) -> EncodedImage:
    """Round gradient colored by the descent curve, with an optional feathered
    vanishing corner dipping to a floor opacity."""
    dx, dy = _pixel_grid(canvas, source_pos)
    d = np.hypot(dx, dy)
    t = d / spec.radius
    img = spec.curve.evaluate(t)
    img[t >= 1.0] = 0.0
    if spec.vanishing_angle > 0:
        phi = np.arctan2(dy, dx)
        delta = np.abs(
            np.angle(np.exp(1j * (phi - spec.vanishing_direction)))
        )
        half = spec.vanishing_angle / 2.0
        # raised-cosine feather from the floor up to full opacity
        u = np.clip((delta - half) / spec.vanishing_feather, 0.0, 1.0)
        mask = VANISHING_FLOOR + (1.0 - VANISHING_FLOOR) * 0.5 * (
            1.0 - np.cos(math.pi * u)
        )
        img *= mask[:, :, None]
    return EncodedImage(np.clip(img, 0.0, 1.0).astype(np.float32))


# A Gaussian falls to half its peak at 1.177 sigma; half-life distances from
# the section curve convert to blur sigmas through this factor.
HALF_LIFE_TO_SIGMA = 1.0 / 1.1774100225


def _streak_profile(spec: StreakSpec, step: float = 0.25):
    """1-D perpendicular profile: section curve blurred one-sidedly.

    Returns (v_grid, profile[N, 3]). The two half-profiles are normalized to
    agree with the raw curve value at v=0 so the ridge stays at the source.
    """
    margin = 4.0 * max(spec.soft_side_blur, 1.0)
    extent = spec.width + margin
    v = np.arange(-extent, extent + step, step)
    base = spec.section_curve.evaluate(np.abs(v) / spec.width)
    base[np.abs(v) >= spec.width] = 0.0

    def blurred(half_life):
        sigma = half_life * HALF_LIFE_TO_SIGMA
        if sigma < step / 4:
            return base.copy()
        ks = int(math.ceil(4 * sigma / step))
        kx = np.arange(-ks, ks + 1) * step
        kernel = np.exp(-0.5 * (kx / sigma) ** 2)
        kernel /= kernel.sum()
        out = np.empty_like(base)
        for c in range(3):
            out[:, c] = np.convolve(base[:, c], kernel, mode="same")
        return out

    sharp = blurred(spec.sharp_side_blur)
    soft = blurred(spec.soft_side_blur)
    i0 = len(v) // 2
    peak = base[i0]
    for prof in (sharp, soft):
        for c in range(3):
            if prof[i0, c] > 1e-12:
                prof[:, c] *= peak[c] / prof[i0, c]
    profile = np.where(v[:, None] < 0, sharp, soft)
    profile[i0] = peak
    return v, np.clip(profile, 0.0, 1.0)


def render_streak(spec: StreakSpec, source_pos, canvas) -> EncodedImage:
    """Line segment through the source with an asymmetrically blurred section
    profile and a longitudinal falloff."""
    dx, dy = _pixel_grid(canvas, source_pos)
    # a streak is an undirected line: normalize direction mod pi so that
    # direction and direction + pi render identically
    theta = spec.direction % math.pi
    c, s = math.cos(theta), math.sin(theta)
    u = dx * c + dy * s
    v = -dx * s + dy * c
    v_grid, profile = _streak_profile(spec)
    half_len = spec.length / 2.0
    fall = spec.falloff_curve.evaluate(np.abs(u) / half_len)
    fall[np.abs(u) >= half_len] = 0.0
    img = np.empty(u.shape + (3,), dtype=np.float64)
    for ch in range(3):
        sect = np.interp(v, v_grid, profile[:, ch], left=0.0, right=0.0)
        img[:, :, ch] = sect * fall[:, :, ch]
    return EncodedImage(np.clip(img, 0.0, 1.0).astype(np.float32))


def render_shimmer(spec: ShimmerSpec, source_pos, canvas) -> EncodedImage:
    """Angular spike lobes over a radial falloff, screen-blended with a
    radially blurred fractal-noise patch confined to the shimmer radius."""
    dx, dy = _pixel_grid(canvas, source_pos)
    d = np.hypot(dx, dy)
    phi = np.arctan2(dy, dx)
    inside = d < spec.radius
    falloff = np.clip(1.0 - d / spec.radius, 0.0, 1.0)

    rng = np.random.default_rng(spec.angular_jitter_seed)
    phase = rng.uniform(0, 2 * math.pi)
    lobes = (0.5 + 0.5 * np.cos(spec.spike_count * (phi - phase))) ** 3
    spikes = spec.intensity * lobes * falloff

    noise = fractal_noise(
        canvas[0], canvas[1], spec.noise_octaves,
        base_scale=max(spec.radius / 8.0, 2.0),
        seed=spec.angular_jitter_seed ^ 0x9E3779B97F4A7C15,
    ).astype(np.float64)
    if spec.noise_radial_blur > 0:
        noise = radial_blur(
            noise.astype(np.float32), source_pos, spec.noise_radial_blur
        ).astype(np.float64)
    noise_layer = 0.35 * noise * falloff ** 2
    noise_layer[~inside] = 0.0
    spikes[~inside] = 0.0

    mono = screen_blend_arrays(spikes, noise_layer)
    rgb = np.asarray(spec.rgb, dtype=np.float64)
    img = mono[:, :, None] * rgb[None, None, :]
    return EncodedImage(np.clip(img, 0.0, 1.0).astype(np.float32))


def _polygon_boundary_radius(phi: np.ndarray, sides: int, circumradius: float):
    """Distance from a regular polygon's center to its boundary at angle phi."""
    sector = 2 * math.pi / sides
    local = np.mod(phi, sector) - sector / 2.0
    return circumradius * math.cos(sector / 2.0) / np.cos(local)


def render_light_source(spec: LightSourceSpec, source_pos, canvas) -> EncodedImage:
    """Saturated core shape plus a smooth glow decaying to zero at glow_radius."""
    dx, dy = _pixel_grid(canvas, source_pos)
    d = np.hypot(dx, dy)
    if spec.shape == "disc":
        boundary = np.full_like(d, spec.core_radius)
    else:
        phi = np.arctan2(dy, dx)
        boundary = _polygon_boundary_radius(phi, int(spec.shape), spec.core_radius)
    core = d <= boundary
    span = max(spec.glow_radius - spec.core_radius, 1e-6)
    t = np.clip((d - boundary) / span, 0.0, 1.0)
    glow = 0.5 * (1.0 + np.cos(math.pi * t))
    glow[d > spec.glow_radius] = 0.0
    rgb = np.asarray(spec.rgb, dtype=np.float64)
    img = glow[:, :, None] * rgb[None, None, :]
    img[core] = 1.0
    return EncodedImage(np.clip(img, 0.0, 1.0).astype(np.float32))


def render_scatter(t: ScatterTemplate) -> FlareLayers:
    """Render every component and combine with screen blends; the light source
    goes on top so the flare dominates it pointwise."""
    w, h = t.canvas
    zero = np.zeros((h, w, 3), dtype=np.float32)

    glare = render_glare(t.glare, t.source_pos, t.canvas).data
    streak = zero.copy()
    for s in t.streaks:
        streak = screen_blend_arrays(
            streak, render_streak(s, t.source_pos, t.canvas).data
        )
    shimmer = (
        render_shimmer(t.shimmer, t.source_pos, t.canvas).data
        if t.shimmer is not None
        else zero.copy()
    )
    light = (
        render_light_source(t.light, t.source_pos, t.canvas).data
        if t.light is not None
        else zero.copy()
    )

    base = screen_blend_arrays(screen_blend_arrays(glare, streak), shimmer)
    flare = screen_blend_arrays(base, light)
    clip = lambda a: EncodedImage(np.clip(a, 0.0, 1.0).astype(np.float32))
    return FlareLayers(
        flare=clip(flare),
        light_source=clip(light),
        glare_layer=clip(glare),
        streak_layer=clip(streak),
        shimmer_layer=clip(shimmer),
    )
