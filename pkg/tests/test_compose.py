import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flaresynth.compose import (
    CLASS_BACKGROUND,
    CLASS_GLARE,
    CLASS_LIGHT_SOURCE,
    CLASS_STREAK,
    SEG_PALETTE,
    AugmentationParams,
    SegMap,
    augment_background,
    augment_flare_pair,
    compose_pair,
    derive_masks,
    extract_light_source_baseline,
    luminance,
    sample_augmentation,
)
from flaresynth.imagecore import AffineParams, EncodedImage, GammaCodec, LinearImage


def flat_params(gamma=2.0, **kw):
    defaults = dict(
        gamma=gamma,
        affine=AffineParams(),
        blur_sigma=0.1,
        color_offset=(0.0, 0.0, 0.0),
        bg_gain=1.0,
        noise_variance=0.0,
        flip_h=False,
        flip_v=False,
    )
    defaults.update(kw)
    return AugmentationParams(**defaults)


class TestSegMap:
    def test_rgb_round_trip_bit_exact(self):
        rng = np.random.default_rng(7)
        classes = rng.integers(0, 4, size=(64, 64), endpoint=False).astype(np.uint8)
        seg = SegMap(classes)
        back = SegMap.from_rgb(seg.to_rgb())
        assert np.array_equal(back.classes, classes)

    def test_palette_colors(self):
        assert SEG_PALETTE[CLASS_BACKGROUND].tolist() == [0, 0, 0]
        assert SEG_PALETTE[CLASS_GLARE].tolist() == [255, 255, 0]
        assert SEG_PALETTE[CLASS_STREAK].tolist() == [255, 0, 0]
        assert SEG_PALETTE[CLASS_LIGHT_SOURCE].tolist() == [0, 0, 255]

    def test_rejects_out_of_range_class(self):
        with pytest.raises(ValueError):
            SegMap(np.full((4, 4), 5, dtype=np.uint8))


class TestSampleAugmentation:
    def test_deterministic_in_seed(self):
        assert sample_augmentation(123).to_dict() == sample_augmentation(123).to_dict()
        assert sample_augmentation(123).to_dict() != sample_augmentation(124).to_dict()

    @given(st.integers(min_value=0, max_value=2 ** 32 - 1))
    @settings(max_examples=200, deadline=None)
    def test_draws_respect_ranges(self, seed):
        # AugmentationParams.__post_init__ enforces every range
        p = sample_augmentation(seed)
        assert p.noise_variance >= 0.0


class TestAugmentFlarePair:
    def flare_and_light(self):
        flare = np.zeros((128, 128, 3), dtype=np.float32)
        flare[40:90, 40:90] = 0.8
        light = np.zeros_like(flare)
        light[60:70, 60:70] = 0.9
        return EncodedImage(flare), EncodedImage(light)

    def test_identical_geometry_for_both_layers(self):
        flare, light = self.flare_and_light()
        p = flat_params(
            affine=AffineParams(rotation=0.7, translation=(10.0, -5.0), scale=1.1),
            blur_sigma=1.0,
        )
        f, l = augment_flare_pair(flare, light, p, crop=128)
        # the light layer support must stay inside the flare support
        assert np.all(f.data[l.data[:, :, 0] > 0.01, 0] > 0.0)

    def test_color_offset_applies_to_flare_only(self):
        flare, light = self.flare_and_light()
        p0 = flat_params()
        p1 = flat_params(color_offset=(0.02, -0.01, 0.0))
        f0, l0 = augment_flare_pair(flare, light, p0, crop=128)
        f1, l1 = augment_flare_pair(flare, light, p1, crop=128)
        assert np.array_equal(l0.data, l1.data)
        inside = f0.data[:, :, 0] > 0.1
        np.testing.assert_allclose(
            f1.data[inside, 0] - f0.data[inside, 0], 0.02, atol=1e-5
        )

    def test_negative_offset_floored_at_zero(self):
        flare, light = self.flare_and_light()
        p = flat_params(color_offset=(-0.02, -0.02, -0.02))
        f, _ = augment_flare_pair(flare, light, p, crop=128)
        assert f.data.min() == 0.0

    def test_shape_mismatch_rejected(self):
        flare, _ = self.flare_and_light()
        small = EncodedImage(np.zeros((64, 64, 3), dtype=np.float32))
        with pytest.raises(ValueError):
            augment_flare_pair(flare, small, flat_params())


class TestAugmentBackground:
    def bg(self):
        rng = np.random.default_rng(11)
        return EncodedImage(rng.uniform(0.2, 0.8, (600, 600, 3)).astype(np.float32))

    def test_gain_scales_linear_values(self):
        bg = self.bg()
        rng_a = np.random.default_rng(3)
        rng_b = np.random.default_rng(3)
        a = augment_background(bg, flat_params(bg_gain=1.0), rng_a)
        b = augment_background(bg, flat_params(bg_gain=0.5), rng_b)
        np.testing.assert_allclose(b.data, 0.5 * a.data, atol=1e-6)

    def test_noise_variance_measured(self):
        bg = EncodedImage(np.full((600, 600, 3), 0.5, dtype=np.float32))
        var = 0.004
        out = augment_background(
            bg, flat_params(noise_variance=var), np.random.default_rng(5)
        )
        clean = GammaCodec(2.0).decode_array(np.full(3, 0.5))[0]
        resid = out.data - 0.5 ** 2.0
        assert float(resid.var()) == pytest.approx(var, rel=0.05)

    def test_small_background_rejected(self):
        bg = EncodedImage(np.zeros((100, 100, 3), dtype=np.float32))
        with pytest.raises(ValueError):
            augment_background(bg, flat_params(), np.random.default_rng(0))


class TestDeriveMasks:
    def test_priority_ordering(self):
        shape = (8, 8, 3)
        light = np.zeros(shape, dtype=np.float32)
        streak = np.zeros(shape, dtype=np.float32)
        glare = np.zeros(shape, dtype=np.float32)
        glare[:] = 0.1  # above tau_glare everywhere
        streak[2:6, 2:6] = 0.3
        light[3:5, 3:5] = 0.9
        seg = derive_masks(light, streak, glare).classes
        assert seg[0, 0] == CLASS_GLARE
        assert seg[2, 2] == CLASS_STREAK
        assert seg[3, 3] == CLASS_LIGHT_SOURCE

    def test_thresholds_are_exclusive(self):
        light = np.full((4, 4, 3), 0.5, dtype=np.float32)  # luminance exactly 0.5
        seg = derive_masks(light, None, None).classes
        assert np.all(seg == CLASS_BACKGROUND)

    def test_missing_layers_default_background(self):
        light = np.zeros((4, 4, 3), dtype=np.float32)
        seg = derive_masks(light, None, None).classes
        assert np.all(seg == CLASS_BACKGROUND)


class TestComposePair:
    def inputs(self):
        rng = np.random.default_rng(21)
        bg = EncodedImage(rng.uniform(0.1, 0.5, (600, 600, 3)).astype(np.float32))
        flare = np.zeros((560, 560, 3), dtype=np.float32)
        ys, xs = np.mgrid[0:560, 0:560]
        d = np.hypot(xs - 280, ys - 280)
        flare[:, :, :] = np.clip(1.0 - d / 200.0, 0, 1)[:, :, None]
        light = np.zeros_like(flare)
        light[d <= 12] = 1.0
        return bg, EncodedImage(flare), EncodedImage(light)

    def test_deterministic_in_seed(self):
        bg, flare, light = self.inputs()
        a = compose_pair(bg, flare, light, seed=42)
        b = compose_pair(bg, flare, light, seed=42)
        assert np.array_equal(a.input.data, b.input.data)
        assert np.array_equal(a.flare_gt.data, b.flare_gt.data)
        assert a.provenance == b.provenance

    def test_different_seeds_differ(self):
        bg, flare, light = self.inputs()
        a = compose_pair(bg, flare, light, seed=42)
        b = compose_pair(bg, flare, light, seed=43)
        assert not np.array_equal(a.input.data, b.input.data)

    def test_reconstruction_identity(self):
        bg, flare, light = self.inputs()
        s = compose_pair(bg, flare, light, seed=7)
        gamma = s.provenance["augmentation"]["gamma"]
        codec = GammaCodec(gamma)
        i0 = codec.decode(s.flare_free)[0].data.astype(np.float64)
        i = codec.decode(s.input)[0].data.astype(np.float64)
        rebuilt = np.clip(i0 + s.flare_gt.data.astype(np.float64), 0.0, 1.0)
        ok = i0 <= 1.0 - 1e-6  # below the clip there is no information loss
        assert np.abs(rebuilt - i)[ok].max() < 1e-6

    def test_output_shapes(self):
        bg, flare, light = self.inputs()
        s = compose_pair(bg, flare, light, seed=3)
        assert s.input.data.shape == (512, 512, 3)
        assert s.flare_free.data.shape == (512, 512, 3)
        assert s.flare_gt.data.shape == (512, 512, 3)
        assert s.seg.classes.shape == (512, 512)

    def test_real_flare_fallback_marks_glare(self):
        bg, flare, light = self.inputs()
        s = compose_pair(bg, flare, light, seed=9)
        assert CLASS_GLARE in s.seg.classes

    def test_provenance_extra_merged(self):
        bg, flare, light = self.inputs()
        s = compose_pair(
            bg, flare, light, seed=1, provenance_extra={"template": "t0"}
        )
        assert s.provenance["template"] == "t0"
        assert s.provenance["seed"] == 1


class TestLightSourceBaseline:
    def scene(self, radius):
        img = np.full((128, 128, 3), 0.2, dtype=np.float32)
        ys, xs = np.mgrid[0:128, 0:128]
        d = np.hypot(xs - 64, ys - 64)
        img[d <= radius] = 1.0
        return EncodedImage(img)

    def test_large_source_recovered(self):
        mask, _ = extract_light_source_baseline(self.scene(10))
        assert mask.max() > 0.9

    def test_three_pixel_source_erased_by_opening(self):
        mask, blended = extract_light_source_baseline(self.scene(1.5))
        assert mask.max() == 0.0
        assert np.all(blended.data == 0.0)

    def test_mask_extent_tracks_source(self):
        mask, _ = extract_light_source_baseline(self.scene(20))
        area = (mask > 0.5).sum()
        assert area == pytest.approx(math.pi * 400, rel=0.10)


class TestLuminance:
    def test_grey_is_identity(self):
        arr = np.full((2, 2, 3), 0.37, dtype=np.float32)
        assert luminance(arr) == pytest.approx(0.37, abs=1e-6)

    def test_weights_sum_to_one(self):
        white = np.ones((1, 1, 3), dtype=np.float32)
        assert luminance(white)[0, 0] == pytest.approx(1.0, abs=1e-6)
