"""Procedural nighttime lens-flare synthesis, paired training-data generation,
and masked flare-removal metrics."""

from .imagecore import (
    AffineParams,
    EncodedImage,
    GammaCodec,
    LinearImage,
    affine_warp,
    fractal_noise,
    gamma_decode,
    gamma_encode,
    gaussian_blur,
    linear_add_clip,
    radial_blur,
    screen_blend,
)
from .scatter import (
    ColorCurve,
    FlareLayers,
    GlareSpec,
    LightSourceSpec,
    ScatterTemplate,
    ShimmerSpec,
    StreakSpec,
    render_glare,
    render_light_source,
    render_scatter,
    render_shimmer,
    render_streak,
)
from .reflect import (
    CausticsSpec,
    ClipSpec,
    IrisSpec,
    LatticeShape,
    PolygonShape,
    ReflectTemplate,
    RingShape,
    apply_clipping,
    place_irises,
    render_caustics,
    render_iris,
    render_reflect,
)
from .compose import (
    AugmentationParams,
    PairedSample,
    SegMap,
    augment_background,
    augment_flare_pair,
    compose_pair,
    derive_masks,
    extract_light_source_baseline,
    sample_augmentation,
)
from .metrics import (
    EvalReport,
    EvalRow,
    g_psnr,
    l1_loss,
    masked_psnr,
    psnr,
    recon_loss,
    s_psnr,
    ssim,
    total_loss,
)
from .catalog import (
    Catalog,
    DatasetJobSpec,
    DatasetManifest,
    TemplateDoc,
    generate_dataset,
    validate_template,
)

__version__ = "0.1.0"
