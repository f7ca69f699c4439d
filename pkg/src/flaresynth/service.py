"""Designer backend: a small stateless HTTP service over one catalog directory.

Endpoints:
    POST /render            render a template (body or catalog id) to PNG/stats
    POST /compose-preview   full five-image paired-sample bundle for a seed
    GET  /templates         list template ids
    GET  /templates/{id}    fetch a template document
    PUT  /templates/{id}    persist a document through catalog validation
    POST /validate          run the validator, returning every violation
"""

from __future__ import annotations

import base64
import io
import json
import time
from pathlib import Path

import cv2
import numpy as np
from fastapi import FastAPI, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import catalog as cat
from . import compose as cp
from . import scatter as sc
from .imagecore import EncodedImage, screen_blend_arrays

PREVIEW_MAX_SIDE = 512


class RenderRequest(BaseModel):
    template: dict | None = None  # full TemplateDoc body
    id: str | None = None
    light_pos: tuple[float, float] | None = None
    canvas: tuple[int, int] | None = None
    encoding: str = "preview"  # "preview" (8-bit, <=512) | "full" (16-bit)
    seed: int | None = None
    stats: bool = False


class ComposePreviewRequest(BaseModel):
    template: dict | None = None
    id: str | None = None
    seed: int = 0
    background_color: tuple[float, float, float] = (0.05, 0.06, 0.09)


def _png_bytes(img: np.ndarray, bits: int) -> bytes:
    arr = np.clip(np.asarray(img, dtype=np.float64), 0, 1)
    if bits == 16:
        q = np.round(arr * 65535.0).astype(np.uint16)
    else:
        q = np.round(arr * 255.0).astype(np.uint8)
    if q.ndim == 3 and q.shape[2] == 3:
        q = cv2.cvtColor(q, cv2.COLOR_RGB2BGR)
    ok, buf = cv2.imencode(".png", q)
    if not ok:
        raise RuntimeError("PNG encode failed")
    return buf.tobytes()


def _violations_payload(violations):
    return [{"path": v.path, "message": v.message} for v in violations]


def create_app(catalog_dir) -> FastAPI:
    catalog = cat.Catalog(catalog_dir)
    app = FastAPI(title="flaresynth designer backend")
    # the designer frontend is served from its own origin (file:// or a dev
    # server), so the API must answer cross-origin requests
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def resolve_doc(template: dict | None, template_id: str | None):
        if (template is None) == (template_id is None):
            return None, JSONResponse(
                {"error": "provide exactly one of template body / id"}, 400
            )
        if template_id is not None:
            try:
                return catalog.load_template(template_id), None
            except KeyError:
                return None, JSONResponse(
                    {"error": f"unknown template {template_id!r}"}, 404
                )
        doc = cat.TemplateDoc.from_dict(template)
        return doc, None

    @app.post("/render")
    def render(req: RenderRequest):
        doc, err = resolve_doc(req.template, req.id)
        if err:
            return err
        violations = cat.validate_template(doc)
        if violations:
            return JSONResponse({"violations": _violations_payload(violations)}, 422)
        from .cli import _render_doc_array

        if req.canvas is not None:
            body = dict(doc.body)
            old_w, old_h = body["canvas"]
            new_w, new_h = req.canvas
            pos_key = "source_pos" if doc.kind == "scatter" else "optical_center"
            px, py = body[pos_key]
            body["canvas"] = [new_w, new_h]
            body[pos_key] = [px * new_w / old_w, py * new_h / old_h]
            doc = cat.TemplateDoc(doc.id, doc.kind, body, doc.metadata)
        t0 = time.perf_counter()
        img = _render_doc_array(doc, light_pos=req.light_pos, seed=req.seed)
        millis = (time.perf_counter() - t0) * 1000.0
        bits = 16 if req.encoding == "full" else 8
        if req.encoding != "full":
            h, w = img.shape[:2]
            side = max(h, w)
            if side > PREVIEW_MAX_SIDE:
                f = PREVIEW_MAX_SIDE / side
                img = cv2.resize(
                    img, (int(w * f), int(h * f)), interpolation=cv2.INTER_AREA
                )
        png = _png_bytes(img, bits)
        if req.stats:
            return JSONResponse(
                {
                    "image_base64": base64.b64encode(png).decode(),
                    "render_millis": millis,
                    "mean_luminance": float(np.mean(cp.luminance(img))),
                    "max_luminance": float(np.max(cp.luminance(img))),
                    "width": int(img.shape[1]),
                    "height": int(img.shape[0]),
                }
            )
        return Response(
            content=png,
            media_type="image/png",
            headers={"X-Render-Millis": f"{millis:.2f}"},
        )

    @app.post("/compose-preview")
    def compose_preview(req: ComposePreviewRequest):
        doc, err = resolve_doc(req.template, req.id)
        if err:
            return err
        if doc.kind != "scatter":
            return JSONResponse(
                {"error": "compose preview requires a scatter template"}, 422
            )
        violations = cat.validate_template(doc)
        if violations:
            return JSONResponse({"violations": _violations_payload(violations)}, 422)
        layers = sc.render_scatter(cat.scatter_from_dict(doc.body))
        glare_shimmer = EncodedImage(
            np.clip(
                screen_blend_arrays(
                    layers.glare_layer.data, layers.shimmer_layer.data
                ),
                0, 1,
            )
        )
        h = w = cp.CROP_SIZE
        bg = EncodedImage(
            np.full((h, w, 3), np.asarray(req.background_color), dtype=np.float32)
        )
        sample = cp.compose_pair(
            bg, layers.flare, layers.light_source, req.seed,
            glare_layer=glare_shimmer, streak_layer=layers.streak_layer,
        )
        bundle = {
            "input": sample.input.data,
            "gt": sample.flare_free.data,
            "flare": np.clip(sample.flare_gt.data, 0, 1),
            "light": sample.light_source.data,
            "mask": sample.seg.to_rgb() / 255.0,
        }
        return JSONResponse(
            {
                "seed": req.seed,
                "images": {
                    name: base64.b64encode(_png_bytes(img, 8)).decode()
                    for name, img in bundle.items()
                },
                "provenance": sample.provenance,
            }
        )

    @app.get("/templates")
    def list_templates():
        return {"templates": catalog.list_templates()}

    @app.get("/templates/{template_id}")
    def get_template(template_id: str):
        try:
            return catalog.load_template(template_id).to_dict()
        except KeyError:
            return JSONResponse({"error": f"unknown template {template_id!r}"}, 404)

    @app.put("/templates/{template_id}")
    def put_template(template_id: str, body: dict):
        doc = cat.TemplateDoc.from_dict({**body, "id": template_id})
        violations = cat.validate_template(doc)
        if violations:
            return JSONResponse({"violations": _violations_payload(violations)}, 422)
        catalog.save_template(doc)
        return {"ok": True, "id": template_id}

    @app.post("/validate")
    def validate(body: dict):
        violations = cat.validate_template(body)
        return {"ok": not violations, "violations": _violations_payload(violations)}

    return app
