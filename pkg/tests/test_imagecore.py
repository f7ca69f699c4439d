import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flaresynth.imagecore import (
    AffineParams,
    EncodedImage,
    GammaCodec,
    LinearImage,
    affine_warp,
    fractal_noise,
    gaussian_blur,
    linear_add_clip,
    radial_blur,
    read_png,
    screen_blend,
    write_png,
)


def enc(arr):
    return EncodedImage(np.asarray(arr, dtype=np.float32))


def lin(arr):
    return LinearImage(np.asarray(arr, dtype=np.float32))


class TestGammaCodec:
    def test_power_law_quarter(self):
        out, _ = GammaCodec(2.0).decode(enc([[[0.25]]]))
        assert out.data[0, 0, 0] == pytest.approx(0.0625, abs=1e-7)

    def test_fixed_points(self):
        for gamma in (1.8, 2.0, 2.2):
            out, _ = GammaCodec(gamma).decode(enc([[[0.0, 1.0, 0.5]]]))
            assert out.data[0, 0, 0] == 0.0
            assert out.data[0, 0, 1] == 1.0

    def test_half_power_against_extended_precision(self):
        # 0.5 ** 1.8 evaluated at 50 decimal digits
        out, _ = GammaCodec(1.8).decode(enc([[[0.5]]]))
        assert out.data[0, 0, 0] == pytest.approx(
            0.28717458874925875169965673669448, abs=1e-7
        )

    def test_encode_power_law(self):
        out = GammaCodec(2.0).encode(lin([[[0.0625]]]))
        assert out.data[0, 0, 0] == pytest.approx(0.25, abs=1e-7)

    def test_encode_against_extended_precision(self):
        # 0.3 ** (1 / 2.2) evaluated at 50 decimal digits
        out = GammaCodec(2.2).encode(lin([[[0.3]]]))
        assert out.data[0, 0, 0] == pytest.approx(
            0.57853260908141711776902764028360, abs=1e-7
        )

    @pytest.mark.parametrize("gamma", [1.8, 2.0, 2.2])
    def test_round_trip(self, gamma):
        codec = GammaCodec(gamma)
        x = np.linspace(0, 1, 11, dtype=np.float32).reshape(1, 11, 1)
        decoded, _ = codec.decode(enc(x))
        back = codec.encode(decoded)
        assert np.abs(back.data - x).max() < 1e-6

    def test_alpha_passes_through(self):
        rgba = np.zeros((2, 2, 4), dtype=np.float32)
        rgba[:, :, 3] = 0.7
        out, alpha = GammaCodec(2.0).decode(EncodedImage(rgba))
        assert out.channels == 3
        assert np.all(alpha == np.float32(0.7))

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            EncodedImage(np.full((2, 2, 3), np.nan, dtype=np.float32))

    def test_encode_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            GammaCodec(2.0).encode(lin([[[1.5]]]))

    def test_gamma_range_enforced(self):
        with pytest.raises(ValueError):
            GammaCodec(2.5)


class TestScreenBlend:
    def test_identity_element(self, random_encoded):
        a = random_encoded()
        zero = enc(np.zeros_like(a.data))
        assert np.array_equal(screen_blend(zero, a).data, a.data)

    def test_absorbing_element(self, random_encoded):
        a = random_encoded()
        one = enc(np.ones_like(a.data))
        assert np.all(screen_blend(one, a).data == 1.0)

    def test_direct_formula(self):
        out = screen_blend(enc([[[0.5]]]), enc([[[0.5]]]))
        assert out.data[0, 0, 0] == pytest.approx(0.75)

    def test_commutative_and_dominant(self, random_encoded):
        a, b = random_encoded(), random_encoded()
        ab = screen_blend(a, b).data
        ba = screen_blend(b, a).data
        assert np.allclose(ab, ba, atol=1e-7)
        assert np.all(ab >= np.maximum(a.data, b.data) - 1e-7)

    def test_shape_mismatch(self, random_encoded):
        with pytest.raises(ValueError):
            screen_blend(random_encoded(8, 8), random_encoded(8, 9))

    @given(
        a=st.floats(0, 1, width=32), b=st.floats(0, 1, width=32),
        c=st.floats(0, 1, width=32),
    )
    @settings(max_examples=200, deadline=None)
    def test_monotone_in_each_argument(self, a, b, c):
        lo, hi = sorted((b, c))
        va = screen_blend(enc([[[a]]]), enc([[[lo]]])).data[0, 0, 0]
        vb = screen_blend(enc([[[a]]]), enc([[[hi]]])).data[0, 0, 0]
        assert va <= vb + 1e-7


class TestLinearAddClip:
    def test_plain_sum(self):
        out = linear_add_clip(lin([[[0.3]]]), lin([[[0.4]]]))
        assert out.data[0, 0, 0] == pytest.approx(0.7)

    def test_clips(self):
        out = linear_add_clip(lin([[[0.8]]]), lin([[[0.5]]]))
        assert out.data[0, 0, 0] == 1.0

    def test_zero_identity(self, rng):
        x = rng.random((8, 8, 3)).astype(np.float32)
        out = linear_add_clip(lin(x), lin(np.zeros_like(x)))
        assert np.array_equal(out.data, x)

    def test_dominates_and_exact_below_one(self, rng):
        a = rng.random((16, 16, 3)).astype(np.float32)
        b = rng.random((16, 16, 3)).astype(np.float32)
        out = linear_add_clip(lin(a), lin(b)).data
        assert np.all(out >= np.maximum(a, b) - 1e-7)
        ok = a + b <= 1.0
        assert np.allclose(out[ok], (a + b)[ok])


class TestAffineWarp:
    def test_identity_bit_exact(self, rng):
        img = rng.random((31, 33, 3)).astype(np.float32)
        out = affine_warp(img, AffineParams())
        assert np.array_equal(out, img)

    def test_point_reflection(self):
        img = np.zeros((41, 41, 1), dtype=np.float32)
        img[20, 28, 0] = 1.0
        out = affine_warp(img, AffineParams(rotation=math.pi))
        peak = np.unravel_index(np.argmax(out[:, :, 0]), out.shape[:2])
        assert peak == (20, 12)
        assert out[20, 12, 0] == pytest.approx(1.0, abs=1e-3)

    def test_rotation_conserves_mass(self):
        ys, xs = np.mgrid[0:101, 0:101]
        blob = np.exp(-(((xs - 50) ** 2 + (ys - 50) ** 2) / (2 * 8.0 ** 2)))
        img = blob[:, :, None].astype(np.float32)
        out = affine_warp(img, AffineParams(rotation=math.pi / 4))
        assert out.sum() == pytest.approx(img.sum(), rel=0.01)

    def test_scale_zero_rejected(self):
        with pytest.raises(ValueError):
            AffineParams(scale=0.0)

    def test_flip_h_mirrors(self):
        img = np.zeros((9, 9, 1), dtype=np.float32)
        img[4, 1, 0] = 1.0
        out = affine_warp(img, AffineParams(flip_h=True))
        assert out[4, 7, 0] == pytest.approx(1.0, abs=1e-6)


class TestGaussianBlur:
    def test_sigma_zero_identity(self, rng):
        img = rng.random((12, 12, 3)).astype(np.float32)
        assert np.array_equal(gaussian_blur(img, 0.0), img)

    def test_constant_unchanged(self):
        img = np.full((20, 20, 1), 0.4, dtype=np.float32)
        assert np.allclose(gaussian_blur(img, 2.5), img, atol=1e-6)

    def test_impulse_matches_dense_convolution(self):
        sigma = 2.0
        img = np.zeros((33, 33, 1), dtype=np.float32)
        img[16, 16, 0] = 1.0
        out = gaussian_blur(img, sigma)[:, :, 0]
        # dense convolution oracle with the same truncated kernel
        radius = int(4.0 * sigma + 0.5)
        x = np.arange(-radius, radius + 1)
        k1 = np.exp(-0.5 * (x / sigma) ** 2)
        k1 /= k1.sum()
        expected = np.outer(k1, k1)
        got = out[16 - radius : 16 + radius + 1, 16 - radius : 16 + radius + 1]
        assert np.abs(got - expected).max() < 1e-6

    def test_negative_sigma_rejected(self):
        with pytest.raises(ValueError):
            gaussian_blur(np.zeros((4, 4, 1), dtype=np.float32), -1.0)

    def test_mass_conserved_interior(self, rng):
        img = np.zeros((64, 64, 1), dtype=np.float32)
        img[24:40, 24:40, 0] = rng.random((16, 16))
        out = gaussian_blur(img, 2.0)
        assert out.sum() == pytest.approx(img.sum(), rel=0.005)


def _radial_blur_oracle(img, center, amount, max_samples=64):
    """Straight per-pixel ray integration with hand-rolled bilinear sampling."""
    h, w = img.shape[:2]
    cx, cy = center
    out = np.zeros_like(img, dtype=np.float64)

    def sample(x, y):
        x0, y0 = int(np.floor(x)), int(np.floor(y))
        fx, fy = x - x0, y - y0
        acc = np.zeros(img.shape[2])
        for dy, wy in ((0, 1 - fy), (1, fy)):
            for dx, wx in ((0, 1 - fx), (1, fx)):
                yy, xx = y0 + dy, x0 + dx
                if 0 <= yy < h and 0 <= xx < w:
                    acc += wy * wx * img[yy, xx]
        return acc

    for py in range(h):
        for px in range(w):
            dx, dy = px - cx, py - cy
            r = math.hypot(dx, dy)
            n = int(min(max(3, math.ceil(amount * r)), max_samples))
            total = np.zeros(img.shape[2])
            for j in range(n):
                t = j / (n - 1) if n > 1 else 0.0
                s = 1.0 - amount * t
                total += sample(cx + s * dx, cy + s * dy)
            out[py, px] = total / n
    return out


class TestRadialBlur:
    def test_amount_zero_identity(self, rng):
        img = rng.random((16, 16, 1)).astype(np.float32)
        assert np.array_equal(radial_blur(img, (8, 8), 0.0), img)

    def test_rotational_symmetry_preserved(self):
        h = w = 41
        c = (w - 1) / 2.0
        ys, xs = np.mgrid[0:h, 0:w]
        d = np.hypot(xs - c, ys - c)
        img = np.clip(1 - d / 18.0, 0, 1).astype(np.float32)[:, :, None]
        out = radial_blur(img, (c, c), 0.5)[:, :, 0]
        # quarter-turn rotations of a symmetric input stay identical
        assert np.abs(out - np.rot90(out)).max() < 1e-5

    def test_matches_reference_ray_sampler(self, rng):
        img = rng.random((24, 24, 1)).astype(np.float32)
        out = radial_blur(img, (11.5, 11.5), 0.35)
        expected = _radial_blur_oracle(
            img.astype(np.float64), (11.5, 11.5), 0.35
        )
        assert np.abs(out - expected).max() < 1e-5

    def test_negative_amount_rejected(self):
        with pytest.raises(ValueError):
            radial_blur(np.zeros((4, 4, 1), dtype=np.float32), (2, 2), -0.1)


class TestFractalNoise:
    def test_deterministic_in_seed(self):
        a = fractal_noise(40, 30, octaves=4, base_scale=12, seed=9)
        b = fractal_noise(40, 30, octaves=4, base_scale=12, seed=9)
        assert np.array_equal(a, b)

    def test_different_seeds_differ(self):
        a = fractal_noise(40, 40, octaves=4, base_scale=12, seed=1)
        b = fractal_noise(40, 40, octaves=4, base_scale=12, seed=2)
        assert np.mean(np.abs(a - b) > 1e-6) > 0.5

    def test_mean_over_seeds(self):
        means = [
            fractal_noise(64, 64, octaves=4, base_scale=16, seed=s).mean()
            for s in range(10)
        ]
        assert 0.35 < np.mean(means) < 0.65

    def test_range_and_shape(self):
        img = fractal_noise(50, 30, octaves=3, base_scale=10, seed=0)
        assert img.shape == (30, 50)
        assert img.min() >= 0.0 and img.max() <= 1.0

    def test_zero_dimension_rejected(self):
        with pytest.raises(ValueError):
            fractal_noise(0, 10, octaves=1, base_scale=4, seed=0)


class TestPngIO:
    def test_round_trip_16_bit(self, tmp_path, rng):
        img = rng.random((12, 14, 3)).astype(np.float32)
        path = tmp_path / "x.png"
        write_png(path, img, bits=16)
        back = read_png(path)
        assert np.abs(back - img).max() <= 0.5 / 65535 + 1e-7

    def test_round_trip_8_bit_gray(self, tmp_path, rng):
        img = rng.random((9, 9, 1)).astype(np.float32)
        path = tmp_path / "g.png"
        write_png(path, img, bits=8)
        back = read_png(path)
        assert back.shape == (9, 9, 1)
        assert np.abs(back - img).max() <= 0.5 / 255 + 1e-6
