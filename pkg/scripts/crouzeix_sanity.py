"""Check ||f(a)|| <= 12 max |f| over the boundary of W(a) for random a and polynomials f."""
import argparse

import numpy as np

from oproots.spectral import crouzeix_ratio


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    ratios = []
    for _ in range(args.trials):
        n = int(rng.integers(2, 9))
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        deg = int(rng.integers(1, 5))
        coeffs = rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1)
        ratios.append(crouzeix_ratio(a, coeffs))
    print(f"max ||f(a)|| / max_W |f| over {args.trials} trials: {max(ratios):.4f} (bound 12)")


if __name__ == "__main__":
    main()
