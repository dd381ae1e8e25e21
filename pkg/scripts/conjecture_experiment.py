"""Exploratory runs: the shifted Newton square root X + X^{-1}(a + 3^{-k}) and the bound with K = 2.

Nothing here is asserted; the script prints how often each variant converges and how
often the bound with the conjectured constant holds.
"""
import argparse
import math

import numpy as np

from oproots.errors import IterationError
from oproots.generators import GeneratorSpec, generate
from oproots.iterative import IterationConfig, newton_sqrt


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=50)
    ap.add_argument("--singular", type=int, default=1)
    args = ap.parse_args()
    stats = {"plain": [], "shifted": [], "k2_bound": []}
    for seed in range(args.seeds):
        n = 2 + seed % 7
        a = generate(GeneratorSpec("RandomAccretive", n=n, seed=seed, theta=math.pi / 2,
                                   singular=min(args.singular, n - 1)))
        for name, cfg in (("plain", IterationConfig(strict=False)),
                          ("shifted", IterationConfig(strict=False, shift_experiment=True)),
                          ("k2_bound", IterationConfig(strict=False, crouzeix_k=2.0))):
            try:
                _, trace = newton_sqrt(a, cfg)
            except IterationError as exc:
                stats[name].append((False, None, exc.trace.n_steps if exc.trace else None))
                continue
            stats[name].append((trace.converged, trace.checks.get("bound_onset"), trace.n_steps))
    for name, rows in stats.items():
        conv = sum(r[0] for r in rows)
        onsets = [r[1] for r in rows if r[1] is not None]
        steps = [r[2] for r in rows if r[2] is not None]
        print(f"{name:9s} converged {conv}/{len(rows)}  max onset {max(onsets) if onsets else '-'}"
              f"  median steps {np.median(steps) if steps else '-'}")


if __name__ == "__main__":
    main()
