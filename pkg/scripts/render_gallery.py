"""Render every builtin template to PNG for visual inspection.

Usage:
    python3 scripts/render_gallery.py --out gallery/
"""

import argparse
from pathlib import Path

from flaresynth import library
from flaresynth.imagecore import write_png
from flaresynth.reflect import render_reflect
from flaresynth.scatter import render_scatter


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("gallery"))
    parser.add_argument("--bits", type=int, choices=(8, 16), default=16)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    for name, template in (
        ("warm_streetlight", library.warm_streetlight()),
        ("cool_led", library.cool_led()),
    ):
        layers = render_scatter(template)
        write_png(args.out / f"{name}.png", layers.flare.data, bits=args.bits)
        write_png(
            args.out / f"{name}_light.png", layers.light_source.data, bits=args.bits
        )
        print(f"wrote {name} (+light layer)")

    ghosts = library.ghost_chain()
    w, h = ghosts.canvas
    for frac in (0.6, 0.75, 0.9):
        img = render_reflect(ghosts, (w * frac, h * 0.45))
        write_png(args.out / f"ghost_chain_{frac:.2f}.png", img.data, bits=args.bits)
        print(f"wrote ghost_chain at light x={frac:.2f}w")


if __name__ == "__main__":
    main()
