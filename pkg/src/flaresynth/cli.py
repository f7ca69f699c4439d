"""Command-line facade: render, compose, dataset, eval, extract-light,
validate, plus catalog bootstrap and the designer HTTP service."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from . import catalog as cat
from . import compose as cp
from . import library
from . import metrics as mt
from .imagecore import EncodedImage, read_png, write_png


def _fail(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _write_report(report_path, payload: dict):
    if report_path:
        Path(report_path).write_text(json.dumps(payload, indent=2, sort_keys=True))


def _load_doc(template, template_id, catalog_dir) -> cat.TemplateDoc:
    if (template is None) == (template_id is None):
        raise click.UsageError("provide exactly one of --template / --id")
    if template is not None:
        return cat.TemplateDoc.from_dict(json.loads(Path(template).read_text()))
    if catalog_dir is None:
        raise click.UsageError("--id requires --catalog")
    return cat.Catalog(catalog_dir).load_template(template_id)


@click.group()
def main():
    """Procedural nighttime lens-flare synthesis toolkit."""


@main.command()
@click.option("--template", type=click.Path(exists=True), help="template JSON file")
@click.option("--id", "template_id", help="catalog template id")
@click.option("--catalog", "catalog_dir", type=click.Path(), help="catalog directory")
@click.option("--out", required=True, type=click.Path(), help="output PNG")
@click.option("--light-pos", help="x,y light position (reflect templates)")
@click.option("--seed", type=int, default=None, help="override embedded render seed")
@click.option("--bits", type=click.Choice(["8", "16"]), default="16")
@click.option("--report", "report_path", type=click.Path(), default=None)
def render(template, template_id, catalog_dir, out, light_pos, seed, bits, report_path):
    """Render a scatter or reflect template to a PNG."""
    try:
        doc = _load_doc(template, template_id, catalog_dir)
        img = _render_doc_array(doc, light_pos, seed)
        write_png(out, img, bits=int(bits))
        _write_report(
            report_path,
            {
                "command": "render",
                "template": doc.id,
                "kind": doc.kind,
                "out": str(out),
                "sha256": cat.file_sha256(out),
            },
        )
    except (ValueError, KeyError, IOError) as e:
        _fail(str(e))


def _render_doc_array(doc, light_pos=None, seed=None) -> np.ndarray:
    from . import scatter as sc
    from . import reflect as rf

    violations = cat.validate_template(doc)
    if violations:
        raise ValueError("; ".join(str(v) for v in violations))
    if doc.kind == "scatter":
        body = dict(doc.body)
        if seed is not None and body.get("shimmer"):
            shim = dict(body["shimmer"])
            shim["angular_jitter_seed"] = int(seed)
            body["shimmer"] = shim
        layers = sc.render_scatter(cat.scatter_from_dict(body))
        return layers.flare.data
    template = cat.reflect_from_dict(doc.body)
    if light_pos is None:
        pos = (template.canvas[0] * 0.75, template.canvas[1] * 0.5)
    elif isinstance(light_pos, str):
        x, y = (float(v) for v in light_pos.split(","))
        pos = (x, y)
    else:
        pos = tuple(light_pos)
    return rf.render_reflect(template, pos).data


@main.command()
@click.option("--template", type=click.Path(exists=True))
@click.option("--id", "template_id", help="catalog template id")
@click.option("--catalog", "catalog_dir", type=click.Path())
@click.option("--flare", "flare_png", type=click.Path(exists=True), help="flare PNG (with --light)")
@click.option("--light", "light_png", type=click.Path(exists=True), help="light-source PNG")
@click.option("--background", required=True, type=click.Path(exists=True))
@click.option("--seed", type=int, required=True)
@click.option("--out-dir", required=True, type=click.Path())
@click.option("--report", "report_path", type=click.Path(), default=None)
def compose(template, template_id, catalog_dir, flare_png, light_png, background,
            seed, out_dir, report_path):
    """Compose one paired training sample from a flare source and background."""
    try:
        from . import scatter as sc
        from .imagecore import screen_blend_arrays

        if flare_png is not None:
            if light_png is None:
                raise ValueError("--flare requires --light")
            flare = EncodedImage(read_png(flare_png)[:, :, :3])
            light = EncodedImage(read_png(light_png)[:, :, :3])
            glare_shimmer = streak = None
            source_id = Path(flare_png).name
        else:
            doc = _load_doc(template, template_id, catalog_dir)
            if doc.kind != "scatter":
                raise ValueError("compose requires a scatter template")
            layers = sc.render_scatter(cat.scatter_from_dict(doc.body))
            flare, light = layers.flare, layers.light_source
            glare_shimmer = EncodedImage(
                np.clip(
                    screen_blend_arrays(
                        layers.glare_layer.data, layers.shimmer_layer.data
                    ),
                    0, 1,
                )
            )
            streak = layers.streak_layer
            source_id = doc.id
        bg = EncodedImage(read_png(background)[:, :, :3])
        sample = cp.compose_pair(
            bg, flare, light, seed,
            glare_layer=glare_shimmer, streak_layer=streak,
            provenance_extra={"source_id": source_id},
        )
        checksums = cat.write_sample(sample, out_dir)
        Path(out_dir, "provenance.json").write_text(
            json.dumps(sample.provenance, indent=2, sort_keys=True)
        )
        _write_report(
            report_path,
            {"command": "compose", "out_dir": str(out_dir), "files": checksums},
        )
    except (ValueError, KeyError, IOError) as e:
        _fail(str(e))


@main.command()
@click.option("--catalog", "catalog_dir", required=True, type=click.Path())
@click.option("--backgrounds", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--n", type=int, required=True)
@click.option("--seed", type=int, required=True, help="master seed")
@click.option("--mix-ratio", type=float, default=0.5, show_default=True,
              help="probability of drawing a real flare over a synthetic one")
@click.option("--report", "report_path", type=click.Path(), default=None)
def dataset(catalog_dir, backgrounds, out_dir, n, seed, mix_ratio, report_path):
    """Generate a deterministic annotated paired dataset with a manifest."""
    try:
        catalog = cat.Catalog(catalog_dir)
        job = cat.DatasetJobSpec(
            out_dir=Path(out_dir),
            backgrounds_dir=Path(backgrounds),
            n=n,
            master_seed=seed,
            mix_ratio=mix_ratio,
        )
        manifest = cat.generate_dataset(catalog, job)
        problems = manifest.verify(out_dir)
        if problems:
            _fail("manifest verification failed: " + "; ".join(problems))
        _write_report(
            report_path,
            {
                "command": "dataset",
                "n": n,
                "manifest": str(Path(out_dir) / "manifest.jsonl"),
                "real": sum(1 for r in manifest.records if r["source_kind"] == "real"),
                "synthetic": sum(
                    1 for r in manifest.records if r["source_kind"] == "synthetic"
                ),
            },
        )
        click.echo(f"wrote {n} samples to {out_dir}")
    except (ValueError, RuntimeError, IOError) as e:
        _fail(str(e))


@main.command("eval")
@click.option("--pred", required=True, type=click.Path(exists=True))
@click.option("--gt", required=True, type=click.Path(exists=True))
@click.option("--masks", type=click.Path(exists=True), default=None,
              help="segmentation maps in the yellow/red/blue palette")
@click.option("--report", "report_path", type=click.Path(), default=None)
def eval_cmd(pred, gt, masks, report_path):
    """Evaluate prediction/ground-truth folders with PSNR, SSIM, G/S-PSNR."""
    try:
        pred_dir, gt_dir = Path(pred), Path(gt)
        names = sorted(p.name for p in pred_dir.glob("*.png"))
        if not names:
            raise ValueError(f"no PNG files in {pred}")
        report = mt.EvalReport()
        for name in names:
            gt_path = gt_dir / name
            if not gt_path.exists():
                raise ValueError(f"missing ground truth for {name}")
            a = EncodedImage(read_png(pred_dir / name)[:, :, :3])
            b = EncodedImage(read_png(gt_path)[:, :, :3])
            seg = None
            if masks:
                mask_path = Path(masks) / name
                if mask_path.exists():
                    rgb = np.round(read_png(mask_path)[:, :, :3] * 255).astype(np.uint8)
                    seg = cp.SegMap.from_rgb(rgb)
            report.add(mt.evaluate_pair(name, a, b, seg))
        click.echo(report.to_text())
        if report_path:
            Path(report_path).write_text(report.to_jsonl() + "\n")
    except (ValueError, IOError) as e:
        _fail(str(e))


@main.command("extract-light")
@click.option("--input", "input_png", required=True, type=click.Path(exists=True))
@click.option("--threshold", type=float, default=0.97, show_default=True)
@click.option("--out-mask", required=True, type=click.Path())
@click.option("--out-blended", type=click.Path(), default=None)
@click.option("--report", "report_path", type=click.Path(), default=None)
def extract_light(input_png, threshold, out_mask, out_blended, report_path):
    """Threshold + feathering light-source extraction baseline."""
    try:
        img = EncodedImage(read_png(input_png)[:, :, :3])
        mask, blended = cp.extract_light_source_baseline(img, threshold)
        write_png(out_mask, mask, bits=8)
        if out_blended:
            write_png(out_blended, blended.data, bits=16)
        _write_report(
            report_path,
            {
                "command": "extract-light",
                "threshold": threshold,
                "mask_pixels": int(np.count_nonzero(mask > 0.5)),
            },
        )
    except (ValueError, IOError) as e:
        _fail(str(e))


@main.command()
@click.option("--template", required=True, type=click.Path(exists=True))
@click.option("--report", "report_path", type=click.Path(), default=None)
def validate(template, report_path):
    """Validate a template document; lists violations with field paths."""
    try:
        doc = json.loads(Path(template).read_text())
    except json.JSONDecodeError as e:
        _fail(f"parse error at line {e.lineno}, column {e.colno}: {e.msg}")
    violations = cat.validate_template(doc)
    _write_report(
        report_path,
        {
            "command": "validate",
            "ok": not violations,
            "violations": [{"path": v.path, "message": v.message} for v in violations],
        },
    )
    if violations:
        for v in violations:
            click.echo(str(v), err=True)
        sys.exit(1)
    click.echo("ok")


@main.command()
@click.option("--catalog", "catalog_dir", required=True, type=click.Path())
def init(catalog_dir):
    """Create a catalog directory seeded with the builtin template library."""
    catalog = cat.Catalog(catalog_dir)
    ids = library.seed_catalog(catalog)
    click.echo(f"seeded {len(ids)} templates: {', '.join(ids)}")


@main.command()
@click.option("--catalog", "catalog_dir", required=True, type=click.Path())
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8765, show_default=True)
def serve(catalog_dir, host, port):
    """Run the designer backend HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(catalog_dir), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
