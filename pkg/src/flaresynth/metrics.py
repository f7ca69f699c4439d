"""Full-reference metrics (PSNR, SSIM, masked G-PSNR/S-PSNR) and the training
loss terms as pure reference functions.

PSNR of identical images is reported as a 100 dB sentinel (and capped there)
so corpus means stay finite. G-PSNR restricts the MSE to glare+streak pixels
of a segmentation map, S-PSNR to streak pixels only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy import signal

from .compose import CLASS_GLARE, CLASS_STREAK, SegMap
from .imagecore import EncodedImage, GammaCodec

PSNR_SENTINEL = 100.0


def _check_shapes(a: np.ndarray, b: np.ndarray):
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")


def _image_data(img) -> np.ndarray:
    return img.data if isinstance(img, EncodedImage) else np.asarray(img)


def psnr(a, b) -> float:
    """10*log10(1/MSE) over all samples, capped at the 100 dB sentinel."""
    da = _image_data(a).astype(np.float64)
    db = _image_data(b).astype(np.float64)
    _check_shapes(da, db)
    return _mse_to_db(da - db)


def _mse_to_db(diff: np.ndarray) -> float:
    # extended precision keeps e.g. a uniform 0.1 offset at exactly 20 dB
    d = diff.astype(np.longdouble)
    mse = (d * d).sum() / d.size
    if mse <= 0.0:
        return PSNR_SENTINEL
    return min(float(-10.0 * np.log10(mse)), PSNR_SENTINEL)


def masked_psnr(a, b, seg: SegMap, classes) -> float:
    """PSNR with the MSE averaged over pixels whose class is in `classes`,
    across all channels of the selected pixels."""
    da = _image_data(a).astype(np.float64)
    db = _image_data(b).astype(np.float64)
    _check_shapes(da, db)
    sel = np.isin(seg.classes, list(classes))
    if not sel.any():
        raise ValueError("mask selects no pixels")
    return _mse_to_db(da[sel] - db[sel])


def g_psnr(a, b, seg: SegMap) -> float:
    return masked_psnr(a, b, seg, {CLASS_GLARE, CLASS_STREAK})


def s_psnr(a, b, seg: SegMap) -> float:
    return masked_psnr(a, b, seg, {CLASS_STREAK})


def _gaussian_window(size: int = 11, sigma: float = 1.5) -> np.ndarray:
    half = size // 2
    x = np.arange(-half, half + 1, dtype=np.float64)
    g = np.exp(-0.5 * (x / sigma) ** 2)
    k = np.outer(g, g)
    return k / k.sum()


def ssim(a, b, k1: float = 0.01, k2: float = 0.03) -> float:
    """Mean local SSIM with an 11x11 Gaussian window (sigma 1.5), dynamic
    range 1, averaged over channels. Window statistics are taken over the
    valid interior so no padding bias enters."""
    da = _image_data(a).astype(np.float64)
    db = _image_data(b).astype(np.float64)
    _check_shapes(da, db)
    if da.ndim == 2:
        da = da[:, :, None]
        db = db[:, :, None]
    win = _gaussian_window()
    if da.shape[0] < win.shape[0] or da.shape[1] < win.shape[1]:
        raise ValueError("image smaller than the SSIM window")
    c1 = k1 ** 2
    c2 = k2 ** 2
    vals = []
    for c in range(da.shape[2]):
        x = da[:, :, c]
        y = db[:, :, c]
        mx = signal.convolve2d(x, win, mode="valid")
        my = signal.convolve2d(y, win, mode="valid")
        mxx = signal.convolve2d(x * x, win, mode="valid")
        myy = signal.convolve2d(y * y, win, mode="valid")
        mxy = signal.convolve2d(x * y, win, mode="valid")
        vx = mxx - mx * mx
        vy = myy - my * my
        cov = mxy - mx * my
        num = (2 * mx * my + c1) * (2 * cov + c2)
        den = (mx * mx + my * my + c1) * (vx + vy + c2)
        vals.append(np.mean(num / den))
    return float(np.mean(vals))


def l1_loss(a, b) -> float:
    da = _image_data(a).astype(np.float64)
    db = _image_data(b).astype(np.float64)
    _check_shapes(da, db)
    return float(np.mean(np.abs(da - db)))


def recon_loss(i, i0_hat, f_hat, codec: GammaCodec) -> float:
    """Mean absolute error between the input and the clipped linear-domain sum
    of the two predictions, re-encoded with the batch's gamma."""
    di = _image_data(i).astype(np.float64)
    d0 = _image_data(i0_hat).astype(np.float64)
    df = _image_data(f_hat).astype(np.float64)
    _check_shapes(di, d0)
    _check_shapes(di, df)
    recon = codec.encode_array(
        np.clip(codec.decode_array(d0) + codec.decode_array(df), 0.0, 1.0)
    )
    return float(np.mean(np.abs(di - recon)))


def total_loss(
    lb: float, lf: float, lrec: float, w: tuple[float, float, float] = (0.5, 0.5, 1.0)
) -> float:
    if any(wi < 0 for wi in w):
        raise ValueError("loss weights must be >= 0")
    return w[0] * lb + w[1] * lf + w[2] * lrec


@dataclass
class EvalRow:
    name: str
    psnr: float
    ssim: float
    g_psnr: float | None = None
    s_psnr: float | None = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "psnr": self.psnr,
            "ssim": self.ssim,
            "g_psnr": self.g_psnr,
            "s_psnr": self.s_psnr,
        }


@dataclass
class EvalReport:
    """Per-image metric rows plus corpus means."""

    rows: list[EvalRow] = field(default_factory=list)

    def add(self, row: EvalRow):
        self.rows.append(row)

    def means(self) -> dict:
        out = {}
        for key in ("psnr", "ssim", "g_psnr", "s_psnr"):
            vals = [getattr(r, key) for r in self.rows if getattr(r, key) is not None]
            out[key] = float(np.mean(vals)) if vals else None
        return out

    def to_text(self) -> str:
        header = f"{'image':<28}{'PSNR':>10}{'SSIM':>10}{'G-PSNR':>10}{'S-PSNR':>10}"
        lines = [header, "-" * len(header)]

        def fmt(v):
            return f"{v:>10.3f}" if v is not None else f"{'-':>10}"

        for r in self.rows:
            lines.append(
                f"{r.name:<28}{fmt(r.psnr)}{fmt(r.ssim)}{fmt(r.g_psnr)}{fmt(r.s_psnr)}"
            )
        m = self.means()
        lines.append("-" * len(header))
        lines.append(
            f"{'mean':<28}{fmt(m['psnr'])}{fmt(m['ssim'])}"
            f"{fmt(m['g_psnr'])}{fmt(m['s_psnr'])}"
        )
        return "\n".join(lines)

    def to_jsonl(self) -> str:
        lines = [json.dumps(r.to_dict()) for r in self.rows]
        lines.append(json.dumps({"name": "__mean__", **self.means()}))
        return "\n".join(lines)


def evaluate_pair(
    name: str,
    pred: EncodedImage,
    gt: EncodedImage,
    seg: SegMap | None = None,
) -> EvalRow:
    row = EvalRow(name=name, psnr=psnr(pred, gt), ssim=ssim(pred, gt))
    if seg is not None:
        if np.isin(seg.classes, [CLASS_GLARE, CLASS_STREAK]).any():
            row.g_psnr = g_psnr(pred, gt, seg)
        if (seg.classes == CLASS_STREAK).any():
            row.s_psnr = s_psnr(pred, gt, seg)
    return row
