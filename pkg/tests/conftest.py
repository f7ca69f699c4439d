import numpy as np
import pytest

from flaresynth import Catalog, EncodedImage
from flaresynth.library import seed_catalog


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def random_encoded(rng):
    def make(h=32, w=32, c=3):
        return EncodedImage(rng.random((h, w, c)).astype(np.float32))

    return make


@pytest.fixture
def seeded_catalog(tmp_path):
    catalog = Catalog(tmp_path / "catalog")
    seed_catalog(catalog)
    return catalog


@pytest.fixture
def background_dir(tmp_path, rng):
    bg_dir = tmp_path / "backgrounds"
    bg_dir.mkdir()
    from flaresynth.imagecore import write_png

    for i in range(3):
        img = rng.random((560, 560, 3)).astype(np.float32) * 0.6
        write_png(bg_dir / f"bg{i}.png", img, bits=16)
    return bg_dir
