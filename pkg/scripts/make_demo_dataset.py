"""Build a small self-contained demo dataset: seeds a catalog, synthesizes a
few night-scene backgrounds, generates annotated pairs, and verifies the
manifest.

Usage:
    python3 scripts/make_demo_dataset.py --out demo/ --n 8 --seed 1
"""

import argparse
from pathlib import Path

import numpy as np

from flaresynth import library
from flaresynth.catalog import Catalog, DatasetJobSpec, generate_dataset
from flaresynth.imagecore import write_png


def synthesize_backgrounds(out_dir: Path, count: int, seed: int):
    """Dim gradient-plus-noise frames standing in for night street photos."""
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    ys, xs = np.mgrid[0:560, 0:560] / 560.0
    for i in range(count):
        base = 0.05 + 0.25 * (1.0 - ys)[:, :, None] * rng.uniform(0.5, 1.0, 3)
        noise = rng.normal(0.0, 0.02, (560, 560, 3))
        img = np.clip(base + noise, 0.0, 1.0).astype(np.float32)
        write_png(out_dir / f"night_{i:02d}.png", img, bits=16)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("demo"))
    parser.add_argument("--n", type=int, default=8)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()

    catalog = Catalog(args.out / "catalog")
    ids = library.seed_catalog(catalog)
    print(f"seeded catalog with {', '.join(ids)}")

    bg_dir = args.out / "backgrounds"
    synthesize_backgrounds(bg_dir, 4, args.seed)

    job = DatasetJobSpec(
        out_dir=args.out / "dataset",
        backgrounds_dir=bg_dir,
        n=args.n,
        master_seed=args.seed,
        mix_ratio=0.0,
    )
    manifest = generate_dataset(catalog, job)
    problems = manifest.verify(job.out_dir)
    if problems:
        raise SystemExit("manifest verification failed: " + "; ".join(problems))
    print(f"wrote {len(manifest.records)} verified samples to {job.out_dir}")


if __name__ == "__main__":
    main()
