"""Training-pair assembly: augmentation sampling, linearization, flare and
background blending, ground-truth construction, segmentation masks, and the
threshold-plus-feathering light-source baseline.

One paired sample consists of the flare-corrupted input I, the flare-free
ground truth I0 (background plus light source), the flare ground truth
F (flare minus light source, floored at zero), the augmented light-source
layer, and a per-pixel segmentation map. All additions happen in the linear
gamma-decoded domain and are clipped to [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .imagecore import (
    AffineParams,
    EncodedImage,
    GammaCodec,
    LinearImage,
    affine_warp,
    gaussian_blur,
)

CROP_SIZE = 512

# linear-luminance thresholds for mask derivation; tunable per dataset
DEFAULT_TAU_LIGHT = 0.5
DEFAULT_TAU_STREAK = 0.05
DEFAULT_TAU_GLARE = 0.02

CLASS_BACKGROUND = 0
CLASS_GLARE = 1
CLASS_STREAK = 2
CLASS_LIGHT_SOURCE = 3

# background=black, glare=yellow, streak=red, light_source=blue
SEG_PALETTE = np.array(
    [[0, 0, 0], [255, 255, 0], [255, 0, 0], [0, 0, 255]], dtype=np.uint8
)
CLASS_NAMES = ("background", "glare", "streak", "light_source")

LUMA_WEIGHTS = np.array([0.2126, 0.7152, 0.0722])


def luminance(arr: np.ndarray) -> np.ndarray:
    a = np.asarray(arr, dtype=np.float64)
    if a.ndim == 3 and a.shape[2] == 3:
        return a @ LUMA_WEIGHTS
    return a[..., 0] if a.ndim == 3 else a


@dataclass(frozen=True)
class SegMap:
    """Per-pixel flare-component classes with a fixed color palette."""

    classes: np.ndarray  # (H, W) uint8 in {0, 1, 2, 3}

    def __post_init__(self):
        arr = np.asarray(self.classes, dtype=np.uint8)
        if arr.ndim != 2:
            raise ValueError("seg classes must be a 2-D array")
        if arr.max(initial=0) > 3:
            raise ValueError("seg classes must be in {0..3}")
        object.__setattr__(self, "classes", arr)

    def to_rgb(self) -> np.ndarray:
        """Palette rendering as (H, W, 3) uint8; round-trips bit-exactly."""
        return SEG_PALETTE[self.classes]

    @classmethod
    def from_rgb(cls, rgb: np.ndarray) -> "SegMap":
        rgb = np.asarray(rgb, dtype=np.uint8)
        classes = np.zeros(rgb.shape[:2], dtype=np.uint8)
        for idx, color in enumerate(SEG_PALETTE):
            classes[np.all(rgb == color, axis=2)] = idx
        return cls(classes)


@dataclass(frozen=True)
class AugmentationParams:
    """One draw of the per-sample augmentation distributions."""

    gamma: float
    affine: AffineParams
    blur_sigma: float
    color_offset: tuple[float, float, float]
    bg_gain: float
    noise_variance: float
    flip_h: bool
    flip_v: bool

    def __post_init__(self):
        if not (1.8 <= self.gamma <= 2.2):
            raise ValueError("gamma outside [1.8, 2.2]")
        a = self.affine
        if not (0 <= a.rotation < 2 * math.pi):
            raise ValueError("rotation outside [0, 2*pi)")
        if any(abs(t) > 300 for t in a.translation):
            raise ValueError("translation outside [-300, 300]")
        if abs(a.shear) > math.pi / 9:
            raise ValueError("shear outside [-pi/9, pi/9]")
        if not (0.8 <= a.scale <= 1.5):
            raise ValueError("scale outside [0.8, 1.5]")
        if not (0.1 <= self.blur_sigma <= 3.0):
            raise ValueError("blur_sigma outside [0.1, 3]")
        if any(abs(c) > 0.02 for c in self.color_offset):
            raise ValueError("color_offset channel outside [-0.02, 0.02]")
        if not (0.5 <= self.bg_gain <= 1.2):
            raise ValueError("bg_gain outside [0.5, 1.2]")
        if self.noise_variance < 0:
            raise ValueError("noise_variance must be >= 0")

    def to_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "rotation": self.affine.rotation,
            "translation": list(self.affine.translation),
            "shear": self.affine.shear,
            "scale": self.affine.scale,
            "blur_sigma": self.blur_sigma,
            "color_offset": list(self.color_offset),
            "bg_gain": self.bg_gain,
            "noise_variance": self.noise_variance,
            "flip_h": self.flip_h,
            "flip_v": self.flip_v,
        }


@dataclass(frozen=True)
class PairedSample:
    """One training datum plus its provenance record."""

    input: EncodedImage
    flare_free: EncodedImage
    flare_gt: LinearImage
    light_source: EncodedImage
    seg: SegMap
    provenance: dict


def sample_augmentation(rng_seed: int) -> AugmentationParams:
    """Draw augmentation parameters from their distributions, deterministically
    in the seed: rotation U(0,2pi), translation U(-300,300), shear
    U(-pi/9,pi/9), scale U(0.8,1.5), blur U(0.1,3), per-channel color offset
    U(-0.02,0.02), background gain U(0.5,1.2), noise variance 0.01*chi2(1)."""
    rng = np.random.default_rng(rng_seed)
    gamma = rng.uniform(1.8, 2.2)
    rotation = rng.uniform(0, 2 * math.pi)
    translation = (rng.uniform(-300, 300), rng.uniform(-300, 300))
    shear = rng.uniform(-math.pi / 9, math.pi / 9)
    scale = rng.uniform(0.8, 1.5)
    blur_sigma = rng.uniform(0.1, 3.0)
    color_offset = tuple(rng.uniform(-0.02, 0.02, size=3))
    bg_gain = rng.uniform(0.5, 1.2)
    noise_variance = 0.01 * rng.standard_normal() ** 2
    flip_h = bool(rng.random() < 0.5)
    flip_v = bool(rng.random() < 0.5)
    affine = AffineParams(
        rotation=rotation,
        translation=translation,
        shear=shear,
        scale=scale,
        flip_h=flip_h,
        flip_v=flip_v,
    )
    return AugmentationParams(
        gamma=gamma,
        affine=affine,
        blur_sigma=blur_sigma,
        color_offset=color_offset,
        bg_gain=bg_gain,
        noise_variance=noise_variance,
        flip_h=flip_h,
        flip_v=flip_v,
    )


def _center_crop_or_pad(arr: np.ndarray, size: int) -> np.ndarray:
    h, w = arr.shape[:2]
    out = np.zeros((size, size, arr.shape[2]), dtype=arr.dtype)
    sy = max((h - size) // 2, 0)
    sx = max((w - size) // 2, 0)
    dy = max((size - h) // 2, 0)
    dx = max((size - w) // 2, 0)
    ch = min(h, size)
    cw = min(w, size)
    out[dy : dy + ch, dx : dx + cw] = arr[sy : sy + ch, sx : sx + cw]
    return out


def _augment_geometry(
    arr: np.ndarray, p: AugmentationParams, crop: int
) -> np.ndarray:
    """Decoded-domain geometric pipeline shared by every flare layer: warp
    (flips folded into the affine), blur, center crop to the training size."""
    warped = affine_warp(arr, p.affine)
    blurred = gaussian_blur(warped, p.blur_sigma)
    return _center_crop_or_pad(blurred, crop)


def augment_flare_pair(
    flare: EncodedImage,
    light: EncodedImage,
    p: AugmentationParams,
    crop: int = CROP_SIZE,
) -> tuple[LinearImage, LinearImage]:
    """Gamma-decode the paired flare and light-source images, apply identical
    geometry to both, and add the global color offset to the flare only."""
    if flare.data.shape != light.data.shape:
        raise ValueError("flare and light images must share a shape")
    codec = GammaCodec(p.gamma)
    flare_lin, _ = codec.decode(flare)
    light_lin, _ = codec.decode(light)
    f = _augment_geometry(flare_lin.data, p, crop)
    l = _augment_geometry(light_lin.data, p, crop)
    f = f + np.asarray(p.color_offset, dtype=np.float32)[None, None, :]
    return (
        LinearImage(np.maximum(f, 0.0)),
        LinearImage(np.maximum(l, 0.0)),
    )


def augment_background(
    bg: EncodedImage,
    p: AugmentationParams,
    rng: np.random.Generator,
    crop: int = CROP_SIZE,
) -> LinearImage:
    """Random crop, gamma-decode, gain, and additive Gaussian noise."""
    h, w = bg.data.shape[:2]
    if h < crop or w < crop:
        raise ValueError(f"background {w}x{h} smaller than crop {crop}")
    y0 = int(rng.integers(0, h - crop + 1))
    x0 = int(rng.integers(0, w - crop + 1))
    patch = EncodedImage(bg.data[y0 : y0 + crop, x0 : x0 + crop, :3])
    lin, _ = GammaCodec(p.gamma).decode(patch)
    out = lin.data * p.bg_gain
    if p.noise_variance > 0:
        out = out + rng.normal(
            0.0, math.sqrt(p.noise_variance), size=out.shape
        ).astype(np.float32)
    return LinearImage(np.maximum(out, 0.0))


def derive_masks(
    light_lin: np.ndarray,
    streak_lin: np.ndarray | None,
    glare_lin: np.ndarray | None,
    tau_light: float = DEFAULT_TAU_LIGHT,
    tau_streak: float = DEFAULT_TAU_STREAK,
    tau_glare: float = DEFAULT_TAU_GLARE,
) -> SegMap:
    """Threshold linear layer luminances into a segmentation map with priority
    light_source > streak > glare > background."""
    lum_light = luminance(light_lin)
    classes = np.zeros(lum_light.shape, dtype=np.uint8)
    if glare_lin is not None:
        if glare_lin.shape[:2] != classes.shape:
            raise ValueError("layer shapes differ")
        classes[luminance(glare_lin) > tau_glare] = CLASS_GLARE
    if streak_lin is not None:
        if streak_lin.shape[:2] != classes.shape:
            raise ValueError("layer shapes differ")
        classes[luminance(streak_lin) > tau_streak] = CLASS_STREAK
    classes[lum_light > tau_light] = CLASS_LIGHT_SOURCE
    return SegMap(classes)


def compose_pair(
    bg: EncodedImage,
    flare: EncodedImage,
    light: EncodedImage,
    seed: int,
    glare_layer: EncodedImage | None = None,
    streak_layer: EncodedImage | None = None,
    provenance_extra: dict | None = None,
    crop: int = CROP_SIZE,
) -> PairedSample:
    """Build one training pair, deterministically in the seed.

    With augmented linear-domain background B, light L, and flare ground truth
    F = max(flare - light, 0):

        input       I  = encode(clip(B + L + F))
        flare-free  I0 = encode(clip(B + L))
        light layer    = encode(clip(L))

    so that clip(decode(I0) + F) reproduces decode(I) exactly wherever
    B + L <= 1.
    """
    ss = np.random.SeedSequence(seed)
    param_seed, bg_seed = [int(c.generate_state(1)[0]) for c in ss.spawn(2)]
    p = sample_augmentation(param_seed)
    codec = GammaCodec(p.gamma)

    f_lin, l_lin = augment_flare_pair(flare, light, p, crop)
    b_lin = augment_background(bg, p, np.random.default_rng(bg_seed), crop)

    flare_gt = np.maximum(f_lin.data - l_lin.data, 0.0)
    base = b_lin.data.astype(np.float64) + l_lin.data.astype(np.float64)
    i0_lin = np.clip(base, 0.0, 1.0)
    i_lin = np.clip(base + flare_gt.astype(np.float64), 0.0, 1.0)

    enc = lambda a: codec.encode(LinearImage(a.astype(np.float32)))
    input_img = enc(i_lin)
    flare_free = enc(i0_lin)
    light_out = enc(np.clip(l_lin.data, 0.0, 1.0))

    if glare_layer is not None or streak_layer is not None:
        g = (
            _augment_geometry(codec.decode(glare_layer)[0].data, p, crop)
            if glare_layer is not None
            else None
        )
        s = (
            _augment_geometry(codec.decode(streak_layer)[0].data, p, crop)
            if streak_layer is not None
            else None
        )
    else:
        # no component layers (real captured flare): everything that is not
        # light source counts as glare
        g = flare_gt
        s = None
    seg = derive_masks(l_lin.data, s, g)

    provenance = {"seed": seed, "augmentation": p.to_dict()}
    if provenance_extra:
        provenance.update(provenance_extra)
    return PairedSample(
        input=input_img,
        flare_free=flare_free,
        flare_gt=LinearImage(flare_gt),
        light_source=light_out,
        seg=seg,
        provenance=provenance,
    )


def extract_light_source_baseline(
    img: EncodedImage,
    threshold: float = 0.97,
    opening_radius: int = 2,
    feather_sigma: float = 2.0,
) -> tuple[np.ndarray, EncodedImage]:
    """Threshold-plus-feathering light-source extraction baseline.

    Returns the feathered mask and the image blended back through it. Opening
    with a small structuring element removes speckle but also erases light
    sources smaller than the opening radius, which is exactly the failure mode
    that motivates annotation-derived light-source layers.
    """
    lum = luminance(img.data)
    mask = lum >= threshold
    if opening_radius > 0:
        r = opening_radius
        ys, xs = np.mgrid[-r : r + 1, -r : r + 1]
        disc = (xs ** 2 + ys ** 2) <= r ** 2
        mask = ndimage.binary_opening(mask, structure=disc)
    feathered = gaussian_blur(mask.astype(np.float32), feather_sigma)
    feathered = np.clip(feathered, 0.0, 1.0)
    rgb = img.data[:, :, :3]
    blended = rgb * feathered[:, :, None]
    return feathered, EncodedImage(np.clip(blended, 0.0, 1.0))
