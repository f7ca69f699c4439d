"""Time paired-sample composition end to end on one core.

Usage:
    python3 scripts/benchmark_throughput.py --n 100
"""

import argparse
import time

import numpy as np

from flaresynth import library
from flaresynth.compose import compose_pair
from flaresynth.imagecore import EncodedImage
from flaresynth.scatter import render_scatter


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    bg = EncodedImage(rng.uniform(0.1, 0.5, (600, 600, 3)).astype(np.float32))

    t0 = time.perf_counter()
    layers = render_scatter(library.warm_streetlight())
    render_s = time.perf_counter() - t0

    t0 = time.perf_counter()
    for seed in range(args.n):
        compose_pair(bg, layers.flare, layers.light_source, seed=seed)
    compose_s = time.perf_counter() - t0

    print(f"template render: {render_s * 1000:.1f} ms (cached across samples)")
    print(
        f"compose: {args.n} samples in {compose_s:.2f} s "
        f"({compose_s / args.n * 1000:.1f} ms/sample, "
        f"{args.n / compose_s:.1f} samples/s)"
    )


if __name__ == "__main__":
    main()
