"""Builtin template documents: a small starter library of scattering and
reflective flares used by tests, demos, and freshly created catalogs."""

from __future__ import annotations

from .catalog import TemplateDoc, reflect_to_dict, scatter_to_dict
from .reflect import (
    CausticsSpec,
    ClipSpec,
    IrisSpec,
    LatticeShape,
    PolygonShape,
    ReflectTemplate,
    RingShape,
)
from .scatter import (
    ColorCurve,
    GlareSpec,
    LightSourceSpec,
    ScatterTemplate,
    ShimmerSpec,
    StreakSpec,
)


def warm_streetlight(canvas=(512, 512), source=(256.0, 256.0)) -> ScatterTemplate:
    """Warm sodium-lamp look: amber glare, one horizontal streak, mild shimmer."""
    glare_curve = ColorCurve(
        (
            (0.0, (1.0, 0.82, 0.55)),
            (0.25, (0.55, 0.40, 0.22)),
            (0.6, (0.18, 0.12, 0.10)),
            (1.0, (0.0, 0.0, 0.0)),
        )
    )
    section = ColorCurve(
        ((0.0, (1.0, 0.9, 0.7)), (0.5, (0.5, 0.42, 0.3)), (1.0, (0.0, 0.0, 0.0)))
    )
    falloff = ColorCurve(
        ((0.0, (1.0, 1.0, 1.0)), (0.7, (0.35, 0.3, 0.35)), (1.0, (0.0, 0.0, 0.0)))
    )
    return ScatterTemplate(
        canvas=canvas,
        source_pos=source,
        glare=GlareSpec(radius=190.0, curve=glare_curve),
        streaks=(
            StreakSpec(
                direction=0.12,
                length=460.0,
                width=7.0,
                section_curve=section,
                sharp_side_blur=1.2,
                soft_side_blur=4.5,
                falloff_curve=falloff,
            ),
        ),
        shimmer=ShimmerSpec(
            spike_count=12,
            radius=120.0,
            intensity=0.55,
            angular_jitter_seed=1234,
        ),
        light=LightSourceSpec(shape="disc", core_radius=9.0, glow_radius=40.0),
    )


def cool_led(canvas=(512, 512), source=(230.0, 250.0)) -> ScatterTemplate:
    """Bluish LED: tight glare with a vanishing corner, two crossing streaks."""
    glare_curve = ColorCurve(
        (
            (0.0, (0.85, 0.92, 1.0)),
            (0.3, (0.3, 0.42, 0.6)),
            (1.0, (0.0, 0.0, 0.0)),
        )
    )
    section = ColorCurve(((0.0, (0.9, 0.95, 1.0)), (1.0, (0.0, 0.0, 0.0))))
    falloff = ColorCurve(
        ((0.0, (1.0, 1.0, 1.0)), (0.5, (0.4, 0.45, 0.55)), (1.0, (0.0, 0.0, 0.0)))
    )
    return ScatterTemplate(
        canvas=canvas,
        source_pos=source,
        glare=GlareSpec(
            radius=150.0,
            curve=glare_curve,
            vanishing_angle=0.5,
            vanishing_direction=1.65,
            vanishing_feather=0.35,
        ),
        streaks=(
            StreakSpec(
                direction=1.65,
                length=430.0,
                width=5.0,
                section_curve=section,
                sharp_side_blur=0.8,
                soft_side_blur=3.0,
                falloff_curve=falloff,
            ),
            StreakSpec(
                direction=0.1,
                length=300.0,
                width=4.0,
                section_curve=section,
                sharp_side_blur=1.0,
                soft_side_blur=2.2,
                falloff_curve=falloff,
            ),
        ),
        shimmer=ShimmerSpec(
            spike_count=8,
            radius=100.0,
            intensity=0.4,
            angular_jitter_seed=77,
            rgb=(0.8, 0.88, 1.0),
        ),
        light=LightSourceSpec(
            shape=6, core_radius=7.0, glow_radius=32.0, rgb=(0.92, 0.96, 1.0)
        ),
    )


def ghost_chain(canvas=(512, 512), center=(256.0, 256.0)) -> ReflectTemplate:
    """Classic ghosting chain: polygon and ring irises on the anti-light axis,
    one clipping iris and one caustic iris, plus a small lattice ghost."""
    return ReflectTemplate(
        canvas=canvas,
        optical_center=center,
        irises=(
            IrisSpec(
                k=-0.45,
                size=26.0,
                rgb=(0.45, 0.75, 0.55),
                opacity=0.55,
                shape=PolygonShape(6),
            ),
            IrisSpec(
                k=-0.85,
                size=40.0,
                rgb=(0.75, 0.5, 0.75),
                opacity=0.4,
                shape=RingShape(0.72),
            ),
            IrisSpec(
                k=-1.3,
                size=34.0,
                rgb=(0.95, 0.65, 0.35),
                opacity=0.6,
                shape=PolygonShape(8),
                caustics=CausticsSpec(opacity_slope=0.004),
            ),
            IrisSpec(
                k=-1.8,
                size=46.0,
                rgb=(0.4, 0.55, 0.95),
                opacity=0.5,
                shape=PolygonShape(6),
                clip=ClipSpec(threshold=120.0, mask_scale=1.0),
            ),
            IrisSpec(
                k=0.5,
                size=30.0,
                rgb=(0.8, 0.8, 0.5),
                opacity=0.35,
                shape=LatticeShape(rows=2, cols=3, pitch=9.0, cell_radius=3.2),
            ),
        ),
    )


def builtin_documents() -> list[TemplateDoc]:
    return [
        TemplateDoc(
            id="warm-streetlight",
            kind="scatter",
            body=scatter_to_dict(warm_streetlight()),
            metadata={"name": "Warm streetlight", "tags": ["sodium", "streak"]},
        ),
        TemplateDoc(
            id="cool-led",
            kind="scatter",
            body=scatter_to_dict(cool_led()),
            metadata={"name": "Cool LED", "tags": ["led", "vanishing-corner"]},
        ),
        TemplateDoc(
            id="ghost-chain",
            kind="reflect",
            body=reflect_to_dict(ghost_chain()),
            metadata={"name": "Ghost chain", "tags": ["ghost", "clipping", "caustics"]},
        ),
    ]


def seed_catalog(catalog) -> list[str]:
    """Save every builtin document into a catalog; returns the ids."""
    ids = []
    for doc in builtin_documents():
        catalog.save_template(doc)
        ids.append(doc.id)
    return ids
