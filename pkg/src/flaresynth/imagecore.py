"""Raster primitives: gamma codec, blend modes, warps, blurs, and procedural noise.

Images are float32 arrays of shape (H, W, C). Two domains are distinguished by
type: :class:`EncodedImage` holds gamma-encoded values in [0, 1] (the stored
form), :class:`LinearImage` holds linear radiance >= 0 (the domain where flare
light adds physically). All operations are pure functions; images are treated
as immutable values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import cv2
import numpy as np
from scipy import ndimage


def _as_image_array(data, channels_allowed):
    arr = np.asarray(data, dtype=np.float32)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3:
        raise ValueError(f"image data must be HxWxC, got shape {arr.shape}")
    if arr.shape[2] not in channels_allowed:
        raise ValueError(
            f"channel count {arr.shape[2]} not in allowed {channels_allowed}"
        )
    if not np.all(np.isfinite(arr)):
        raise ValueError("image contains non-finite samples")
    return arr


@dataclass(frozen=True)
class EncodedImage:
    """Gamma-encoded raster with samples in [0, 1]; 1, 3, or 4 channels."""

    data: np.ndarray

    def __post_init__(self):
        arr = _as_image_array(self.data, (1, 3, 4))
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError("encoded samples must lie in [0, 1]")
        object.__setattr__(self, "data", arr)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def channels(self) -> int:
        return self.data.shape[2]


@dataclass(frozen=True)
class LinearImage:
    """Linear-radiance raster with samples >= 0 (may exceed 1 before clipping)."""

    data: np.ndarray

    def __post_init__(self):
        arr = _as_image_array(self.data, (1, 3))
        if arr.min() < 0.0:
            raise ValueError("linear samples must be >= 0")
        object.__setattr__(self, "data", arr)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def channels(self) -> int:
        return self.data.shape[2]


@dataclass(frozen=True)
class GammaCodec:
    """Power-law transfer curve with exponent in [1.8, 2.2].

    decode(x) = x ** gamma maps encoded values to linear radiance;
    encode(y) = y ** (1 / gamma) is its inverse on [0, 1].
    """

    gamma: float

    def __post_init__(self):
        if not (1.8 <= self.gamma <= 2.2):
            raise ValueError(f"gamma {self.gamma} outside [1.8, 2.2]")

    def decode(self, img: EncodedImage) -> tuple[LinearImage, np.ndarray | None]:
        """Gamma-decode into linear radiance.

        A 4th (alpha) channel, when present, is passed through unchanged and
        returned separately as an (H, W) mask.
        """
        arr = img.data
        alpha = None
        if arr.shape[2] == 4:
            alpha = arr[:, :, 3].copy()
            arr = arr[:, :, :3]
        # float64 keeps the round trip well under 1e-6
        lin = np.power(arr.astype(np.float64), self.gamma).astype(np.float32)
        return LinearImage(lin), alpha

    def encode(self, img: LinearImage) -> EncodedImage:
        """Gamma-encode linear radiance; caller must have clipped to [0, 1]."""
        arr = img.data
        if arr.max() > 1.0:
            raise ValueError("encode requires samples in [0, 1]; clip first")
        enc = np.power(arr.astype(np.float64), 1.0 / self.gamma).astype(np.float32)
        return EncodedImage(np.clip(enc, 0.0, 1.0))

    def decode_array(self, arr: np.ndarray) -> np.ndarray:
        """Decode a bare [0, 1] array (convenience for loss functions)."""
        return np.power(np.asarray(arr, dtype=np.float64), self.gamma)

    def encode_array(self, arr: np.ndarray) -> np.ndarray:
        return np.power(np.asarray(arr, dtype=np.float64), 1.0 / self.gamma)


@dataclass(frozen=True)
class AffineParams:
    """Geometric augmentation parameters, applied flip -> scale -> shear ->
    rotate (about a given center) -> translate."""

    rotation: float = 0.0
    translation: tuple[float, float] = (0.0, 0.0)
    shear: float = 0.0
    scale: float = 1.0
    flip_h: bool = False
    flip_v: bool = False

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("scale must be > 0")

    def is_identity(self) -> bool:
        return (
            self.rotation == 0.0
            and self.translation == (0.0, 0.0)
            and self.shear == 0.0
            and self.scale == 1.0
            and not self.flip_h
            and not self.flip_v
        )


def gamma_decode(img: EncodedImage, codec: GammaCodec):
    return codec.decode(img)


def gamma_encode(img: LinearImage, codec: GammaCodec) -> EncodedImage:
    return codec.encode(img)


def screen_blend(a: EncodedImage, b: EncodedImage) -> EncodedImage:
    """Screen blend: 1 - (1 - a)(1 - b). Commutative; 0 is identity, 1 absorbs."""
    if a.data.shape != b.data.shape:
        raise ValueError(f"shape mismatch {a.data.shape} vs {b.data.shape}")
    return EncodedImage(
        np.clip(screen_blend_arrays(a.data, b.data), 0.0, 1.0).astype(np.float32)
    )


def screen_blend_arrays(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    # a + b - a*b == 1 - (1-a)(1-b); float64 keeps the identity (0) and
    # absorber (1) elements exact for float32 inputs
    a64 = a.astype(np.float64)
    b64 = b.astype(np.float64)
    return a64 + b64 - a64 * b64


def linear_add_clip(a: LinearImage, b: LinearImage) -> LinearImage:
    """Linear-domain addition clipped to [0, 1]."""
    if a.data.shape != b.data.shape:
        raise ValueError(f"shape mismatch {a.data.shape} vs {b.data.shape}")
    return LinearImage(np.clip(a.data + b.data, 0.0, 1.0))


def _affine_matrix(p: AffineParams, center: tuple[float, float]) -> np.ndarray:
    """Forward 3x3 pixel-coordinate transform: flip, scale, shear, rotation
    about `center`, then translation."""
    cx, cy = center

    def t(tx, ty):
        return np.array([[1, 0, tx], [0, 1, ty], [0, 0, 1]], dtype=np.float64)

    flip = np.diag(
        [-1.0 if p.flip_h else 1.0, -1.0 if p.flip_v else 1.0, 1.0]
    )
    scale = np.diag([p.scale, p.scale, 1.0])
    shear = np.array(
        [[1, math.tan(p.shear), 0], [0, 1, 0], [0, 0, 1]], dtype=np.float64
    )
    c, s = math.cos(p.rotation), math.sin(p.rotation)
    rot = np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]], dtype=np.float64)
    m = t(cx, cy) @ rot @ shear @ scale @ flip @ t(-cx, -cy)
    return t(*p.translation) @ m


def affine_warp(
    img: np.ndarray,
    p: AffineParams,
    center: tuple[float, float] | None = None,
    out_shape: tuple[int, int] | None = None,
) -> np.ndarray:
    """Warp an (H, W, C) array with bilinear sampling; outside pixels are 0.

    `center` defaults to the image center. `out_shape` is (H, W) of the output
    canvas (defaults to the input shape).
    """
    arr = np.ascontiguousarray(img, dtype=np.float32)
    h, w = arr.shape[:2]
    if center is None:
        center = ((w - 1) / 2.0, (h - 1) / 2.0)
    if out_shape is None:
        out_shape = (h, w)
    if p.is_identity() and out_shape == (h, w):
        return arr.copy()
    m = _affine_matrix(p, center)[:2, :]
    out = cv2.warpAffine(
        arr,
        m,
        (out_shape[1], out_shape[0]),
        flags=cv2.INTER_LINEAR,
        borderMode=cv2.BORDER_CONSTANT,
        borderValue=0.0,
    )
    if out.ndim == 2:
        out = out[:, :, None]
    return out


def gaussian_blur(img: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian blur with edge clamping; sigma=0 is the identity."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    arr = np.asarray(img, dtype=np.float32)
    if sigma == 0:
        return arr.copy()
    squeeze = arr.ndim == 2
    if squeeze:
        arr = arr[:, :, None]
    out = np.empty_like(arr)
    for c in range(arr.shape[2]):
        out[:, :, c] = ndimage.gaussian_filter(arr[:, :, c], sigma, mode="nearest")
    return out[:, :, 0] if squeeze else out


def radial_blur(
    img: np.ndarray,
    center: tuple[float, float],
    amount: float,
    max_samples: int = 64,
) -> np.ndarray:
    """Zoom-style radial blur about `center`.

    Each output pixel at distance r from the center averages N samples taken
    at radii r * s with s spanning [1 - amount, 1], N = max(3, ceil(amount*r))
    capped at `max_samples`. amount=0 is the identity.
    """
    if amount < 0:
        raise ValueError("amount must be >= 0")
    arr = np.asarray(img, dtype=np.float32)
    if amount == 0:
        return arr.copy()
    squeeze = arr.ndim == 2
    if squeeze:
        arr = arr[:, :, None]
    h, w, ch = arr.shape
    cx, cy = center
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    dx = xs - cx
    dy = ys - cy
    r = np.hypot(dx, dy)
    n = np.clip(np.ceil(amount * r), 3, max_samples).astype(np.int64)
    acc = np.zeros((h, w, ch), dtype=np.float64)
    denom = n.astype(np.float64)
    for j in range(int(n.max())):
        active = j < n
        # per-pixel fraction along [1 - amount, 1]
        t = np.where(n > 1, j / np.maximum(n - 1, 1), 0.0)
        s = 1.0 - amount * t
        sx = (cx + s * dx).astype(np.float32)
        sy = (cy + s * dy).astype(np.float32)
        sampled = cv2.remap(
            arr, sx, sy, cv2.INTER_LINEAR, borderMode=cv2.BORDER_CONSTANT,
            borderValue=0.0,
        )
        if sampled.ndim == 2:
            sampled = sampled[:, :, None]
        acc += np.where(active[:, :, None], sampled, 0.0)
    out = (acc / denom[:, :, None]).astype(np.float32)
    return out[:, :, 0] if squeeze else out


def _value_noise_octave(
    height: int, width: int, scale: float, rng: np.random.Generator
) -> np.ndarray:
    """One octave of bilinear-interpolated lattice (value) noise in [0, 1]."""
    scale = max(scale, 1.0)
    gh = int(np.ceil(height / scale)) + 2
    gw = int(np.ceil(width / scale)) + 2
    grid = rng.random((gh, gw))
    y = np.arange(height) / scale
    x = np.arange(width) / scale
    yi = np.floor(y).astype(int)
    xi = np.floor(x).astype(int)
    yf = (y - yi)[:, None]
    xf = (x - xi)[None, :]
    v00 = grid[np.ix_(yi, xi)]
    v01 = grid[np.ix_(yi, xi + 1)]
    v10 = grid[np.ix_(yi + 1, xi)]
    v11 = grid[np.ix_(yi + 1, xi + 1)]
    top = v00 * (1 - xf) + v01 * xf
    bot = v10 * (1 - xf) + v11 * xf
    return top * (1 - yf) + bot * yf


def fractal_noise(
    width: int, height: int, octaves: int, base_scale: float, seed: int
) -> np.ndarray:
    """Sum of value-noise octaves (amplitude halving, frequency doubling),
    normalized to [0, 1]. Deterministic in `seed`."""
    if octaves < 1:
        raise ValueError("octaves must be >= 1")
    if width <= 0 or height <= 0:
        raise ValueError("noise dimensions must be positive")
    rng = np.random.default_rng(seed)
    total = np.zeros((height, width), dtype=np.float64)
    amp_sum = 0.0
    for o in range(octaves):
        amp = 0.5 ** o
        total += amp * _value_noise_octave(height, width, base_scale / (2 ** o), rng)
        amp_sum += amp
    return (total / amp_sum).astype(np.float32)


# -- PNG I/O ------------------------------------------------------------------

def write_png(path, img: np.ndarray, bits: int = 16) -> None:
    """Write an (H, W, C) float [0, 1] array as an 8- or 16-bit PNG."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim == 3 and arr.shape[2] == 1:
        arr = arr[:, :, 0]
    if bits == 16:
        q = np.round(np.clip(arr, 0, 1) * 65535.0).astype(np.uint16)
    elif bits == 8:
        q = np.round(np.clip(arr, 0, 1) * 255.0).astype(np.uint8)
    else:
        raise ValueError("bits must be 8 or 16")
    if q.ndim == 3:
        if q.shape[2] == 3:
            q = cv2.cvtColor(q, cv2.COLOR_RGB2BGR)
        elif q.shape[2] == 4:
            q = cv2.cvtColor(q, cv2.COLOR_RGBA2BGRA)
    if not cv2.imwrite(str(path), q):
        raise IOError(f"failed to write PNG {path}")


def read_png(path) -> np.ndarray:
    """Read a PNG into an (H, W, C) float32 array in [0, 1]."""
    raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise IOError(f"failed to read PNG {path}")
    if raw.dtype == np.uint16:
        arr = raw.astype(np.float32) / 65535.0
    elif raw.dtype == np.uint8:
        arr = raw.astype(np.float32) / 255.0
    else:
        arr = raw.astype(np.float32)
    if arr.ndim == 2:
        return arr[:, :, None]
    if arr.shape[2] == 3:
        return cv2.cvtColor(arr, cv2.COLOR_BGR2RGB)
    if arr.shape[2] == 4:
        return cv2.cvtColor(arr, cv2.COLOR_BGRA2RGBA)
    return arr
