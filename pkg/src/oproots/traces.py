"""Per-step iteration records, CSV export and convergence-order fits."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

STOP_REASONS = ("ResidualTol", "Stagnation", "MaxIter", "Divergence")
CSV_COLUMNS = ("k", "norm_Xk", "norm_Xk_inv", "err_ref", "residual")
MISSING = "—"


@dataclass(frozen=True)
class Step:
    k: int
    norm_x: float
    norm_x_inv: Optional[float]
    err_ref: Optional[float]
    residual: float


@dataclass
class IterationTrace:
    """Record of one matrix iteration.

    ``checks`` maps a check name to a boolean (or a small dict of numbers) and is
    filled by the method that produced the trace; ``hypothesis`` names the
    sufficient condition that was verified, if any.
    """

    method: str
    steps: list = field(default_factory=list)
    converged: bool = False
    stop_reason: Optional[str] = None
    checks: dict = field(default_factory=dict)
    hypothesis: Optional[str] = None
    warnings: list = field(default_factory=list)

    def add(self, k, norm_x, norm_x_inv, err_ref, residual) -> None:
        if self.steps and k <= self.steps[-1].k:
            raise ValueError("step index must increase")
        self.steps.append(Step(int(k), float(norm_x),
                               None if norm_x_inv is None else float(norm_x_inv),
                               None if err_ref is None else float(err_ref), float(residual)))

    def finish(self, reason: str) -> "IterationTrace":
        if reason not in STOP_REASONS:
            raise ValueError(f"unknown stop reason {reason!r}")
        self.stop_reason = reason
        self.converged = reason in ("ResidualTol", "Stagnation")
        return self

    @property
    def n_steps(self) -> int:
        return len(self.steps) - 1 if self.steps else 0

    def errors(self) -> np.ndarray:
        return np.array([np.nan if s.err_ref is None else s.err_ref for s in self.steps])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for s in self.steps:
            w.writerow([s.k, _fmt(s.norm_x), _fmt(s.norm_x_inv), _fmt(s.err_ref), _fmt(s.residual)])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "converged": self.converged,
            "stop_reason": self.stop_reason,
            "hypothesis": self.hypothesis,
            "warnings": list(self.warnings),
            "checks": _jsonable(self.checks),
            "steps": [[s.k, s.norm_x, s.norm_x_inv, s.err_ref, s.residual] for s in self.steps],
        }


def _fmt(v) -> str:
    return MISSING if v is None else repr(float(v))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in sorted(obj.items())}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_jsonable(float(obj.real)), _jsonable(float(obj.imag))]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def fit_order(errors: Sequence[float], floor: float, ceiling: float = 0.5) -> Optional[float]:
    """Least-squares slope of ``log e_{k+1}`` against ``log e_k`` in the superlinear phase.

    Pairs are kept when ``e_k < ceiling * e_0`` and ``e_{k+1} > floor``; ``None``
    when fewer than two pairs qualify.
    """
    e = np.asarray(errors, dtype=float)
    e = e[np.isfinite(e) & (e > 0)]
    if len(e) < 3:
        return None
    keep = (e[:-1] < ceiling * e[0]) & (e[1:] > floor)
    if keep.sum() < 2:
        return None
    x, y = np.log(e[:-1]), np.log(e[1:])
    slope, _ = np.polyfit(x[keep], y[keep], 1)
    return float(slope)
