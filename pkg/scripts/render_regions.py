"""Rasterize the scalar convergence regions of every iteration family to PGM files."""
import argparse
from pathlib import Path

from oproots.dynamics import FAMILIES, rasterize_convergence_region

WINDOWS = {
    "BinomialQ": (-2.0, 2.0, -2.0, 2.0),
    "NewtonSqrtF": (-3.0, 3.0, -3.0, 3.0),
    "NewtonPthQ": (-1.0, 3.0, -2.0, 2.0),
    "HalleyQ": (-3.0, 3.0, -3.0, 3.0),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="regions")
    ap.add_argument("--resolution", type=int, default=512)
    ap.add_argument("-p", type=int, default=3)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for family in FAMILIES:
        p = 2 if family in ("BinomialQ", "NewtonSqrtF") else args.p
        raster = rasterize_convergence_region(family, WINDOWS[family], args.resolution, p=p)
        pgm, _ = raster.write(out / f"{family}_p{p}.pgm")
        print(pgm, raster.sidecar()["counts"])


if __name__ == "__main__":
    main()
