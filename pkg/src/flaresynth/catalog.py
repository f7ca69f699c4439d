"""Template and dataset persistence.

Templates are human-readable JSON documents with an explicit schema_version.
The catalog directory holds synthetic templates (templates/*.json) and
imported real flare/light image pairs (real/<id>/). Dataset generation
writes one directory per sample plus a line-delimited manifest with
checksums, and is byte-reproducible from the master seed.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import reflect as rf
from . import scatter as sc
from .compose import PairedSample, compose_pair
from .imagecore import EncodedImage, read_png, write_png, screen_blend_arrays

SCHEMA_VERSION = 1


# -- template (de)serialization ------------------------------------------------

def _curve_to_dict(c: sc.ColorCurve) -> dict:
    return {"control_points": [[t, list(rgb)] for t, rgb in c.control_points]}


def _curve_from_dict(d: dict) -> sc.ColorCurve:
    return sc.ColorCurve(tuple((t, tuple(rgb)) for t, rgb in d["control_points"]))


def scatter_to_dict(t: sc.ScatterTemplate) -> dict:
    return {
        "canvas": list(t.canvas),
        "source_pos": list(t.source_pos),
        "glare": {
            "radius": t.glare.radius,
            "curve": _curve_to_dict(t.glare.curve),
            "vanishing_angle": t.glare.vanishing_angle,
            "vanishing_direction": t.glare.vanishing_direction,
            "vanishing_feather": t.glare.vanishing_feather,
        },
        "streaks": [
            {
                "direction": s.direction,
                "length": s.length,
                "width": s.width,
                "section_curve": _curve_to_dict(s.section_curve),
                "sharp_side_blur": s.sharp_side_blur,
                "soft_side_blur": s.soft_side_blur,
                "falloff_curve": _curve_to_dict(s.falloff_curve),
            }
            for s in t.streaks
        ],
        "shimmer": None
        if t.shimmer is None
        else {
            "spike_count": t.shimmer.spike_count,
            "radius": t.shimmer.radius,
            "intensity": t.shimmer.intensity,
            "angular_jitter_seed": t.shimmer.angular_jitter_seed,
            "noise_octaves": t.shimmer.noise_octaves,
            "noise_radial_blur": t.shimmer.noise_radial_blur,
            "rgb": list(t.shimmer.rgb),
        },
        "light": None
        if t.light is None
        else {
            "shape": t.light.shape,
            "core_radius": t.light.core_radius,
            "glow_radius": t.light.glow_radius,
            "rgb": list(t.light.rgb),
        },
    }


def scatter_from_dict(d: dict) -> sc.ScatterTemplate:
    g = d["glare"]
    shim = d.get("shimmer")
    light = d.get("light")
    return sc.ScatterTemplate(
        canvas=tuple(d["canvas"]),
        source_pos=tuple(d["source_pos"]),
        glare=sc.GlareSpec(
            radius=g["radius"],
            curve=_curve_from_dict(g["curve"]),
            vanishing_angle=g.get("vanishing_angle", 0.0),
            vanishing_direction=g.get("vanishing_direction", 0.0),
            vanishing_feather=g.get("vanishing_feather", 0.3),
        ),
        streaks=tuple(
            sc.StreakSpec(
                direction=s["direction"],
                length=s["length"],
                width=s["width"],
                section_curve=_curve_from_dict(s["section_curve"]),
                sharp_side_blur=s["sharp_side_blur"],
                soft_side_blur=s["soft_side_blur"],
                falloff_curve=_curve_from_dict(s["falloff_curve"]),
            )
            for s in d.get("streaks", [])
        ),
        shimmer=None
        if shim is None
        else sc.ShimmerSpec(
            spike_count=shim["spike_count"],
            radius=shim["radius"],
            intensity=shim["intensity"],
            angular_jitter_seed=shim["angular_jitter_seed"],
            noise_octaves=shim.get("noise_octaves", 4),
            noise_radial_blur=shim.get("noise_radial_blur", 0.4),
            rgb=tuple(shim.get("rgb", (1.0, 0.9, 0.8))),
        ),
        light=None
        if light is None
        else sc.LightSourceSpec(
            shape=light["shape"],
            core_radius=light["core_radius"],
            glow_radius=light["glow_radius"],
            rgb=tuple(light.get("rgb", (1.0, 1.0, 1.0))),
        ),
    )


def _shape_to_dict(s: rf.IrisShape) -> dict:
    if isinstance(s, rf.PolygonShape):
        return {"kind": "polygon", "sides": s.sides}
    if isinstance(s, rf.RingShape):
        return {"kind": "ring", "ratio": s.ratio}
    if isinstance(s, rf.LatticeShape):
        return {
            "kind": "lattice",
            "rows": s.rows,
            "cols": s.cols,
            "pitch": s.pitch,
            "cell_radius": s.cell_radius,
        }
    raise TypeError(f"unknown shape {s!r}")


def _shape_from_dict(d: dict) -> rf.IrisShape:
    kind = d["kind"]
    if kind == "polygon":
        return rf.PolygonShape(d["sides"])
    if kind == "ring":
        return rf.RingShape(d["ratio"])
    if kind == "lattice":
        return rf.LatticeShape(d["rows"], d["cols"], d["pitch"], d["cell_radius"])
    raise ValueError(f"unknown shape kind {kind!r}")


def reflect_to_dict(t: rf.ReflectTemplate) -> dict:
    return {
        "canvas": list(t.canvas),
        "optical_center": list(t.optical_center),
        "irises": [
            {
                "k": i.k,
                "size": i.size,
                "rgb": list(i.rgb),
                "opacity": i.opacity,
                "shape": _shape_to_dict(i.shape),
                "edge_feather": i.edge_feather,
                "caustics": None
                if i.caustics is None
                else {"opacity_slope": i.caustics.opacity_slope},
                "clip": None
                if i.clip is None
                else {"threshold": i.clip.threshold, "mask_scale": i.clip.mask_scale},
            }
            for i in t.irises
        ],
    }


def reflect_from_dict(d: dict) -> rf.ReflectTemplate:
    return rf.ReflectTemplate(
        canvas=tuple(d["canvas"]),
        optical_center=tuple(d["optical_center"]),
        irises=tuple(
            rf.IrisSpec(
                k=i["k"],
                size=i["size"],
                rgb=tuple(i["rgb"]),
                opacity=i["opacity"],
                shape=_shape_from_dict(i["shape"]),
                edge_feather=i.get("edge_feather", 1.5),
                caustics=None
                if i.get("caustics") is None
                else rf.CausticsSpec(i["caustics"]["opacity_slope"]),
                clip=None
                if i.get("clip") is None
                else rf.ClipSpec(
                    i["clip"]["threshold"], i["clip"].get("mask_scale", 1.0)
                ),
            )
            for i in d["irises"]
        ),
    )


@dataclass
class TemplateDoc:
    id: str
    kind: str  # "scatter" | "reflect"
    body: dict
    metadata: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "schema_version": self.schema_version,
            "body": self.body,
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TemplateDoc":
        return cls(
            id=d["id"],
            kind=d["kind"],
            body=d["body"],
            metadata=d.get("metadata", {}),
            schema_version=d.get("schema_version", SCHEMA_VERSION),
        )

    def build(self):
        """Materialize the parametric template object from the body."""
        if self.kind == "scatter":
            return scatter_from_dict(self.body)
        if self.kind == "reflect":
            return reflect_from_dict(self.body)
        raise ValueError(f"unknown template kind {self.kind!r}")


# -- validation ----------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    path: str
    message: str

    def __str__(self):
        return f"{self.path}: {self.message}"


def _require(d: dict, key: str, path: str, out: list[Violation], types=None):
    if key not in d or d[key] is None:
        out.append(Violation(f"{path}{key}", "required field missing"))
        return None
    v = d[key]
    if types is not None and not isinstance(v, types):
        out.append(Violation(f"{path}{key}", f"expected {types}, got {type(v).__name__}"))
        return None
    return v


def _validate_curve(d, path: str, out: list[Violation]):
    if not isinstance(d, dict):
        out.append(Violation(path, "curve must be an object"))
        return
    pts = d.get("control_points")
    if not isinstance(pts, list) or len(pts) < 2:
        out.append(Violation(f"{path}.control_points", "need at least two control points"))
        return
    ts = []
    for j, p in enumerate(pts):
        if (
            not isinstance(p, list)
            or len(p) != 2
            or not isinstance(p[0], (int, float))
            or not isinstance(p[1], list)
            or len(p[1]) != 3
        ):
            out.append(
                Violation(f"{path}.control_points[{j}]", "expected [t, [r, g, b]]")
            )
            return
        ts.append(p[0])
    if any(b <= a for a, b in zip(ts, ts[1:])):
        out.append(Violation(f"{path}.control_points", "t must be strictly increasing"))
    if ts and (ts[0] != 0.0 or ts[-1] != 1.0):
        out.append(Violation(f"{path}.control_points", "curve must span t=0 to t=1"))
    if pts and isinstance(pts[-1][1], list) and any(abs(c) > 1e-12 for c in pts[-1][1]):
        out.append(Violation(f"{path}.control_points", "curve must end at [0, 0, 0]"))


def _validate_scatter_body(body: dict, out: list[Violation]):
    canvas = _require(body, "canvas", "", out, list)
    pos = _require(body, "source_pos", "", out, list)
    if canvas and (len(canvas) != 2 or any(c <= 0 for c in canvas)):
        out.append(Violation("canvas", "must be [width, height] with positive sizes"))
    if canvas and pos and len(pos) == 2:
        if not (0 <= pos[0] < canvas[0] and 0 <= pos[1] < canvas[1]):
            out.append(Violation("source_pos", "must lie inside the canvas"))
    glare = _require(body, "glare", "", out, dict)
    if glare is not None:
        radius = _require(glare, "radius", "glare.", out, (int, float))
        if radius is not None and radius <= 0:
            out.append(Violation("glare.radius", "must be > 0"))
        curve = _require(glare, "curve", "glare.", out, dict)
        if curve is not None:
            _validate_curve(curve, "glare.curve", out)
        va = glare.get("vanishing_angle", 0.0)
        if not (0 <= va < 2 * np.pi):
            out.append(Violation("glare.vanishing_angle", "must be in [0, 2*pi)"))
        if glare.get("vanishing_feather", 0.3) <= 0:
            out.append(Violation("glare.vanishing_feather", "must be > 0"))
    for j, s in enumerate(body.get("streaks") or []):
        p = f"streaks[{j}]."
        for key in ("direction", "length", "width", "sharp_side_blur", "soft_side_blur"):
            _require(s, key, p, out, (int, float))
        if s.get("length", 1) <= 0 or s.get("width", 1) <= 0:
            out.append(Violation(p + "length", "length and width must be > 0"))
        if s.get("sharp_side_blur", 0) > s.get("soft_side_blur", 0):
            out.append(Violation(p + "sharp_side_blur", "must be <= soft_side_blur"))
        for key in ("section_curve", "falloff_curve"):
            c = _require(s, key, p, out, dict)
            if c is not None:
                _validate_curve(c, p + key, out)
    shim = body.get("shimmer")
    if shim is not None:
        if shim.get("spike_count", 0) < 3:
            out.append(Violation("shimmer.spike_count", "must be >= 3"))
        if shim.get("radius", 0) <= 0:
            out.append(Violation("shimmer.radius", "must be > 0"))
        if not (0 <= shim.get("intensity", 0) <= 1):
            out.append(Violation("shimmer.intensity", "must be in [0, 1]"))
        _require(shim, "angular_jitter_seed", "shimmer.", out, int)
    light = body.get("light")
    if light is not None:
        shape = light.get("shape")
        if not (shape == "disc" or (isinstance(shape, int) and shape >= 3)):
            out.append(Violation("light.shape", "must be 'disc' or a side count >= 3"))
        core = light.get("core_radius", 0)
        glow = light.get("glow_radius", 0)
        if not (glow >= core > 0):
            out.append(Violation("light.core_radius", "need glow_radius >= core_radius > 0"))


def _validate_reflect_body(body: dict, out: list[Violation]):
    canvas = _require(body, "canvas", "", out, list)
    center = _require(body, "optical_center", "", out, list)
    if canvas and center and len(canvas) == 2 and len(center) == 2:
        if not (0 <= center[0] < canvas[0] and 0 <= center[1] < canvas[1]):
            out.append(Violation("optical_center", "must lie inside the canvas"))
    irises = body.get("irises")
    if not isinstance(irises, list) or not irises:
        out.append(Violation("irises", "at least one iris required"))
        return
    for j, i in enumerate(irises):
        p = f"irises[{j}]."
        _require(i, "k", p, out, (int, float))
        size = _require(i, "size", p, out, (int, float))
        if size is not None and size <= 0:
            out.append(Violation(p + "size", "must be > 0"))
        opacity = _require(i, "opacity", p, out, (int, float))
        if opacity is not None and not (0 <= opacity <= 1):
            out.append(Violation(p + "opacity", "must be in [0, 1]"))
        shape = _require(i, "shape", p, out, dict)
        if shape is not None:
            kind = shape.get("kind")
            if kind == "polygon":
                if shape.get("sides", 0) < 3:
                    out.append(Violation(p + "shape.sides", "must be >= 3"))
            elif kind == "ring":
                if not (0 < shape.get("ratio", 0) < 1):
                    out.append(Violation(p + "shape.ratio", "must be in (0, 1)"))
            elif kind == "lattice":
                if shape.get("rows", 0) < 1 or shape.get("cols", 0) < 1:
                    out.append(Violation(p + "shape.rows", "rows and cols must be >= 1"))
            else:
                out.append(Violation(p + "shape.kind", "must be polygon, ring, or lattice"))
        clip = i.get("clip")
        if clip is not None and clip.get("threshold", -1) < 0:
            out.append(Violation(p + "clip.threshold", "must be >= 0"))
        caustics = i.get("caustics")
        if caustics is not None and caustics.get("opacity_slope", -1) < 0:
            out.append(Violation(p + "caustics.opacity_slope", "must be >= 0"))


def validate_template(doc: dict | TemplateDoc) -> list[Violation]:
    """Validate a template document; returns every violation with field paths
    (empty list means ok)."""
    d = doc.to_dict() if isinstance(doc, TemplateDoc) else doc
    out: list[Violation] = []
    if not isinstance(d, dict):
        return [Violation("", "document must be an object")]
    if not d.get("id"):
        out.append(Violation("id", "required field missing"))
    kind = d.get("kind")
    body = d.get("body")
    if kind not in ("scatter", "reflect"):
        out.append(Violation("kind", "must be 'scatter' or 'reflect'"))
        return out
    if not isinstance(body, dict):
        out.append(Violation("body", "required field missing"))
        return out
    if kind == "scatter":
        _validate_scatter_body(body, out)
    else:
        _validate_reflect_body(body, out)
    return out


# -- seeded sample identity ----------------------------------------------------

def per_sample_seed(master_seed: int, index: int) -> int:
    """Stable 64-bit per-sample seed derived from (master_seed, index)."""
    h = hashlib.blake2b(
        struct.pack("<qq", master_seed & (2 ** 63 - 1), index), digest_size=8
    )
    return int.from_bytes(h.digest(), "little")


def choose_source(seed: int, n_synthetic: int, n_real: int, mix_ratio: float):
    """Pick the flare source for one sample: ('real'|'synthetic', pool index,
    background draw in [0,1)). Pure function of the per-sample seed."""
    if n_synthetic == 0 and n_real == 0:
        raise ValueError("catalog has no flare sources")
    rng = np.random.default_rng(seed)
    want_real = rng.random() < mix_ratio
    if want_real and n_real > 0:
        kind, pool = "real", n_real
    elif not want_real and n_synthetic > 0:
        kind, pool = "synthetic", n_synthetic
    else:
        kind, pool = ("real", n_real) if n_real else ("synthetic", n_synthetic)
    idx = int(rng.integers(0, pool))
    bg_draw = float(rng.random())
    return kind, idx, bg_draw


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


# -- catalog directory ---------------------------------------------------------

DOMINANCE_TOLERANCE = 2.0 / 255.0


class Catalog:
    """Flare library rooted at a directory: synthetic JSON templates plus
    imported real flare/light PNG pairs."""

    def __init__(self, root):
        self.root = Path(root)
        (self.root / "templates").mkdir(parents=True, exist_ok=True)
        (self.root / "real").mkdir(parents=True, exist_ok=True)

    # templates
    def template_path(self, template_id: str) -> Path:
        return self.root / "templates" / f"{template_id}.json"

    def save_template(self, doc: TemplateDoc) -> None:
        violations = validate_template(doc)
        if violations:
            raise ValueError(
                "template invalid: " + "; ".join(str(v) for v in violations)
            )
        path = self.template_path(doc.id)
        path.write_text(json.dumps(doc.to_dict(), indent=2, sort_keys=True))

    def load_template(self, template_id: str) -> TemplateDoc:
        path = self.template_path(template_id)
        if not path.exists():
            raise KeyError(f"unknown template {template_id!r}")
        return TemplateDoc.from_dict(json.loads(path.read_text()))

    def list_templates(self, kind: str | None = None) -> list[str]:
        ids = sorted(p.stem for p in (self.root / "templates").glob("*.json"))
        if kind is None:
            return ids
        return [i for i in ids if self.load_template(i).kind == kind]

    # real flare pairs
    def import_real_flare(self, flare_png, light_png, metadata: dict) -> str:
        """Store an externally captured flare/light pair; returns the catalog id.

        Both images must share dimensions. Pixels where light exceeds flare by
        more than 2/255 are counted into a dominance warning record rather
        than rejected.
        """
        flare = read_png(flare_png)
        if light_png is None:
            raise ValueError("real flare import requires a light-source annotation")
        light = read_png(light_png)
        if flare.shape[:2] != light.shape[:2]:
            raise ValueError(
                f"dimension mismatch {flare.shape[:2]} vs {light.shape[:2]}"
            )
        bad = int(
            np.sum(
                np.any(
                    light[:, :, :3] > flare[:, :, :3] + DOMINANCE_TOLERANCE, axis=2
                )
            )
        )
        real_id = metadata.get("id") or f"real-{len(self.list_real()):04d}"
        dest = self.root / "real" / real_id
        dest.mkdir(parents=True, exist_ok=True)
        write_png(dest / "flare.png", flare[:, :, :3], bits=16)
        write_png(dest / "light.png", light[:, :, :3], bits=16)
        meta = dict(metadata)
        meta["id"] = real_id
        if bad > 0:
            meta["dominance_warning"] = {
                "pixels_light_above_flare": bad,
                "tolerance": DOMINANCE_TOLERANCE,
            }
        (dest / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True))
        return real_id

    def list_real(self) -> list[str]:
        return sorted(
            p.name for p in (self.root / "real").iterdir() if p.is_dir()
        ) if (self.root / "real").exists() else []

    def load_real(self, real_id: str) -> tuple[EncodedImage, EncodedImage, dict]:
        dest = self.root / "real" / real_id
        if not dest.exists():
            raise KeyError(f"unknown real flare {real_id!r}")
        flare = EncodedImage(read_png(dest / "flare.png"))
        light = EncodedImage(read_png(dest / "light.png"))
        meta = json.loads((dest / "meta.json").read_text())
        return flare, light, meta


# -- dataset generation --------------------------------------------------------

@dataclass
class DatasetJobSpec:
    out_dir: Path
    backgrounds_dir: Path
    n: int
    master_seed: int
    mix_ratio: float = 0.5
    crop: int = 512
    dataset_id: str = "dataset"


@dataclass
class DatasetManifest:
    header: dict
    records: list[dict] = field(default_factory=list)

    def save(self, path) -> None:
        lines = [json.dumps(self.header, sort_keys=True)]
        lines += [json.dumps(r, sort_keys=True) for r in self.records]
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path) -> "DatasetManifest":
        lines = [l for l in Path(path).read_text().splitlines() if l.strip()]
        return cls(header=json.loads(lines[0]), records=[json.loads(l) for l in lines[1:]])

    def verify(self, root) -> list[str]:
        """Check record density and file checksums; returns problem strings."""
        problems = []
        root = Path(root)
        for want, rec in enumerate(self.records):
            if rec["index"] != want:
                problems.append(f"record {want}: index gap (got {rec['index']})")
            for rel, digest in rec["files"].items():
                path = root / rel
                if not path.exists():
                    problems.append(f"{rel}: missing file")
                elif file_sha256(path) != digest:
                    problems.append(f"{rel}: checksum mismatch")
        return problems


SAMPLE_FILES = ("input.png", "gt.png", "flare.png", "light.png", "mask.png")


def _list_backgrounds(bg_dir: Path) -> list[Path]:
    exts = {".png", ".jpg", ".jpeg"}
    files = sorted(p for p in Path(bg_dir).iterdir() if p.suffix.lower() in exts)
    if not files:
        raise ValueError(f"background corpus {bg_dir} is empty")
    return files


def _rendered_layers(catalog: Catalog, template_id: str, cache: dict):
    if template_id not in cache:
        template = catalog.load_template(template_id).build()
        layers = sc.render_scatter(template)
        glare_shimmer = EncodedImage(
            np.clip(
                screen_blend_arrays(
                    layers.glare_layer.data, layers.shimmer_layer.data
                ),
                0.0,
                1.0,
            )
        )
        cache[template_id] = (
            layers.flare,
            layers.light_source,
            glare_shimmer,
            layers.streak_layer,
        )
    return cache[template_id]


def write_sample(sample: PairedSample, out_dir: Path) -> dict[str, str]:
    """Write the five per-sample PNGs; returns relative path -> sha256."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    gamma = sample.provenance["augmentation"]["gamma"]
    from .imagecore import GammaCodec, LinearImage

    codec = GammaCodec(gamma)
    flare_enc = codec.encode(
        LinearImage(np.clip(sample.flare_gt.data, 0.0, 1.0))
    )
    write_png(out_dir / "input.png", sample.input.data, bits=16)
    write_png(out_dir / "gt.png", sample.flare_free.data, bits=16)
    write_png(out_dir / "flare.png", flare_enc.data, bits=16)
    write_png(out_dir / "light.png", sample.light_source.data, bits=16)
    write_png(out_dir / "mask.png", sample.seg.to_rgb() / 255.0, bits=8)
    return {name: file_sha256(out_dir / name) for name in SAMPLE_FILES}


def generate_dataset(
    catalog: Catalog, job: DatasetJobSpec
) -> DatasetManifest:
    """Generate `n` paired samples; byte-reproducible from the master seed."""
    synth_ids = catalog.list_templates(kind="scatter")
    real_ids = catalog.list_real()
    if not synth_ids and not real_ids:
        raise ValueError("catalog holds no flare sources")
    backgrounds = _list_backgrounds(job.backgrounds_dir)

    out_root = Path(job.out_dir)
    out_root.mkdir(parents=True, exist_ok=True)
    seeds_seen = set()
    cache: dict = {}
    records = []
    for index in range(job.n):
        seed = per_sample_seed(job.master_seed, index)
        if seed in seeds_seen:
            raise RuntimeError(f"per-sample seed collision at index {index}")
        seeds_seen.add(seed)
        ss = np.random.SeedSequence(seed)
        sel_seed, comp_seed = [int(c.generate_state(1)[0]) for c in ss.spawn(2)]
        kind, pool_idx, bg_draw = choose_source(
            sel_seed, len(synth_ids), len(real_ids), job.mix_ratio
        )
        bg_path = backgrounds[int(bg_draw * len(backgrounds))]
        bg = EncodedImage(read_png(bg_path)[:, :, :3])
        if kind == "synthetic":
            source_id = synth_ids[pool_idx]
            flare, light, glare_shimmer, streak = _rendered_layers(
                catalog, source_id, cache
            )
        else:
            source_id = real_ids[pool_idx]
            flare, light, _ = catalog.load_real(source_id)
            glare_shimmer = streak = None
        sample = compose_pair(
            bg,
            flare,
            light,
            comp_seed,
            glare_layer=glare_shimmer,
            streak_layer=streak,
            provenance_extra={"source_kind": kind, "source_id": source_id},
            crop=job.crop,
        )
        rel_dir = f"{index:06d}"
        checksums = write_sample(sample, out_root / rel_dir)
        aug_digest = hashlib.sha256(
            json.dumps(
                sample.provenance["augmentation"], sort_keys=True
            ).encode()
        ).hexdigest()
        records.append(
            {
                "index": index,
                "seed": seed,
                "source_kind": kind,
                "source_id": source_id,
                "background": bg_path.name,
                "augmentation_digest": aug_digest,
                "files": {f"{rel_dir}/{n}": d for n, d in checksums.items()},
            }
        )

    manifest = DatasetManifest(
        header={
            "kind": "flaresynth-dataset",
            "schema_version": SCHEMA_VERSION,
            "dataset_id": job.dataset_id,
            "master_seed": job.master_seed,
            "mix_ratio": job.mix_ratio,
            "n": job.n,
            "crop": job.crop,
            "catalog": str(catalog.root),
            "backgrounds": str(job.backgrounds_dir),
        },
        records=records,
    )
    manifest.save(out_root / "manifest.jsonl")
    return manifest
