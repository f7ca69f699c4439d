import json

import numpy as np
import pytest

from flaresynth import library
from flaresynth.catalog import (
    Catalog,
    DatasetJobSpec,
    DatasetManifest,
    TemplateDoc,
    choose_source,
    file_sha256,
    generate_dataset,
    per_sample_seed,
    reflect_from_dict,
    reflect_to_dict,
    scatter_from_dict,
    scatter_to_dict,
    validate_template,
)
from flaresynth.imagecore import write_png


class TestSerialization:
    def test_scatter_round_trip(self):
        t = library.warm_streetlight()
        d = scatter_to_dict(t)
        json.dumps(d)  # must be plain JSON types
        assert scatter_to_dict(scatter_from_dict(d)) == d

    def test_cool_led_round_trip(self):
        t = library.cool_led()
        d = scatter_to_dict(t)
        assert scatter_to_dict(scatter_from_dict(d)) == d

    def test_reflect_round_trip(self):
        t = library.ghost_chain()
        d = reflect_to_dict(t)
        json.dumps(d)
        assert reflect_to_dict(reflect_from_dict(d)) == d

    def test_builtin_docs_validate_and_build(self):
        for doc in library.builtin_documents():
            assert validate_template(doc) == []
            doc.build()


class TestValidation:
    def scatter_doc(self):
        return TemplateDoc(
            id="t",
            kind="scatter",
            body=scatter_to_dict(library.warm_streetlight()),
        )

    def test_missing_field_reports_path(self):
        doc = self.scatter_doc()
        del doc.body["glare"]["radius"]
        violations = validate_template(doc)
        assert any(v.path == "glare.radius" for v in violations)

    def test_bad_curve_reports_path(self):
        doc = self.scatter_doc()
        doc.body["glare"]["curve"]["control_points"][-1][1] = [0.5, 0.0, 0.0]
        violations = validate_template(doc)
        assert any(v.path.startswith("glare.curve") for v in violations)

    def test_reflect_iris_path_indexed(self):
        doc = TemplateDoc(
            id="r", kind="reflect", body=reflect_to_dict(library.ghost_chain())
        )
        doc.body["irises"][0]["size"] = -3.0
        violations = validate_template(doc)
        assert any(v.path.startswith("irises[0]") for v in violations)

    def test_unknown_kind_rejected(self):
        doc = TemplateDoc(id="x", kind="prism", body={})
        assert validate_template(doc)


class TestSeeds:
    def test_per_sample_seed_deterministic(self):
        assert per_sample_seed(5, 7) == per_sample_seed(5, 7)

    def test_per_sample_seed_unique_over_many_indices(self):
        seeds = {per_sample_seed(1, i) for i in range(10_000)}
        assert len(seeds) == 10_000

    def test_per_sample_seed_sensitive_to_master(self):
        assert per_sample_seed(1, 0) != per_sample_seed(2, 0)

    def test_choose_source_deterministic(self):
        assert choose_source(99, 3, 2, 0.5) == choose_source(99, 3, 2, 0.5)

    def test_choose_source_mix_ratio(self):
        ratio = 0.3
        n = 10_000
        reals = sum(
            choose_source(per_sample_seed(3, i), 4, 4, ratio)[0] == "real"
            for i in range(n)
        )
        # binomial(10000, 0.3): 4 sigma ~ 183
        assert abs(reals - ratio * n) < 200

    def test_choose_source_falls_back_when_pool_empty(self):
        for seed in range(50):
            kind, idx, _ = choose_source(seed, 3, 0, 1.0)
            assert kind == "synthetic" and 0 <= idx < 3
            kind, idx, _ = choose_source(seed, 0, 2, 0.0)
            assert kind == "real" and 0 <= idx < 2

    def test_choose_source_empty_catalog_rejected(self):
        with pytest.raises(ValueError):
            choose_source(0, 0, 0, 0.5)


class TestCatalog:
    def test_save_load_list(self, tmp_path):
        cat = Catalog(tmp_path / "cat")
        library.seed_catalog(cat)
        ids = cat.list_templates()
        assert len(ids) == 3
        assert cat.list_templates(kind="reflect") == ["ghost-chain"]
        doc = cat.load_template(ids[0])
        assert validate_template(doc) == []

    def test_save_invalid_rejected(self, tmp_path):
        cat = Catalog(tmp_path / "cat")
        with pytest.raises(ValueError):
            cat.save_template(TemplateDoc(id="bad", kind="scatter", body={}))

    def test_load_unknown_raises_keyerror(self, tmp_path):
        cat = Catalog(tmp_path / "cat")
        with pytest.raises(KeyError):
            cat.load_template("nope")

    def real_pair(self, tmp_path, hot_light=False):
        rng = np.random.default_rng(13)
        flare = rng.uniform(0.1, 0.6, (64, 64, 3)).astype(np.float32)
        light = np.zeros_like(flare)
        light[30:34, 30:34] = 1.0 if hot_light else flare[30:34, 30:34]
        flare = np.maximum(flare, light) if not hot_light else flare
        fp, lp = tmp_path / "f.png", tmp_path / "l.png"
        write_png(fp, flare, bits=16)
        write_png(lp, light, bits=16)
        return fp, lp

    def test_import_real_round_trip(self, tmp_path):
        cat = Catalog(tmp_path / "cat")
        fp, lp = self.real_pair(tmp_path)
        rid = cat.import_real_flare(fp, lp, {"scene": "street"})
        flare, light, meta = cat.load_real(rid)
        assert flare.data.shape == (64, 64, 3)
        assert meta["scene"] == "street"
        assert "dominance_warning" not in meta
        assert cat.list_real() == [rid]

    def test_import_flags_light_dominance(self, tmp_path):
        cat = Catalog(tmp_path / "cat")
        fp, lp = self.real_pair(tmp_path, hot_light=True)
        rid = cat.import_real_flare(fp, lp, {})
        _, _, meta = cat.load_real(rid)
        assert meta["dominance_warning"]["pixels_light_above_flare"] == 16

    def test_import_requires_light(self, tmp_path):
        cat = Catalog(tmp_path / "cat")
        fp, _ = self.real_pair(tmp_path)
        with pytest.raises(ValueError):
            cat.import_real_flare(fp, None, {})

    def test_import_dimension_mismatch(self, tmp_path):
        cat = Catalog(tmp_path / "cat")
        fp, _ = self.real_pair(tmp_path)
        small = tmp_path / "small.png"
        write_png(small, np.zeros((32, 32, 3), dtype=np.float32), bits=16)
        with pytest.raises(ValueError):
            cat.import_real_flare(fp, small, {})


class TestDatasetGeneration:
    def job(self, out, backgrounds, n=2, seed=11):
        return DatasetJobSpec(
            out_dir=out,
            backgrounds_dir=backgrounds,
            n=n,
            master_seed=seed,
            mix_ratio=0.0,
        )

    def test_generate_writes_verified_manifest(
        self, tmp_path, seeded_catalog, background_dir
    ):
        out = tmp_path / "ds"
        manifest = generate_dataset(
            seeded_catalog, self.job(out, background_dir)
        )
        assert len(manifest.records) == 2
        assert manifest.verify(out) == []
        loaded = DatasetManifest.load(out / "manifest.jsonl")
        assert loaded.header == manifest.header
        assert loaded.records == manifest.records

    def test_regeneration_is_byte_identical(
        self, tmp_path, seeded_catalog, background_dir
    ):
        a = generate_dataset(
            seeded_catalog, self.job(tmp_path / "a", background_dir)
        )
        b = generate_dataset(
            seeded_catalog, self.job(tmp_path / "b", background_dir)
        )
        checks_a = [r["files"] for r in a.records]
        checks_b = [r["files"] for r in b.records]
        assert checks_a == checks_b

    def test_verify_detects_corruption(
        self, tmp_path, seeded_catalog, background_dir
    ):
        out = tmp_path / "ds"
        manifest = generate_dataset(
            seeded_catalog, self.job(out, background_dir, n=1)
        )
        target = out / "000000" / "input.png"
        data = bytearray(target.read_bytes())
        data[-1] ^= 0xFF
        target.write_bytes(bytes(data))
        problems = manifest.verify(out)
        assert any("input.png" in p for p in problems)

    def test_verify_detects_missing_file(
        self, tmp_path, seeded_catalog, background_dir
    ):
        out = tmp_path / "ds"
        manifest = generate_dataset(
            seeded_catalog, self.job(out, background_dir, n=1)
        )
        (out / "000000" / "mask.png").unlink()
        problems = manifest.verify(out)
        assert any("mask.png" in p and "missing" in p for p in problems)

    def test_seed_changes_samples(self, tmp_path, seeded_catalog, background_dir):
        a = generate_dataset(
            seeded_catalog, self.job(tmp_path / "a", background_dir, seed=1)
        )
        b = generate_dataset(
            seeded_catalog, self.job(tmp_path / "b", background_dir, seed=2)
        )
        assert [r["files"] for r in a.records] != [r["files"] for r in b.records]


class TestFileSha256:
    def test_matches_hashlib(self, tmp_path):
        import hashlib

        p = tmp_path / "blob.bin"
        payload = b"flare" * 1000
        p.write_bytes(payload)
        assert file_sha256(p) == hashlib.sha256(payload).hexdigest()
