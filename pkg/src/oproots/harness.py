"""Experiment suite: (generator x method x tolerance) cross-products with certified outcomes.

Each run ends in exactly one state: ``certified``, ``hypothesis-warned`` or ``errored``.
Reports are sorted by run id and serialized with sorted keys, so identical configs
give byte-identical ``report.json`` and trace CSVs; wall-clock times go to a
separate ``timings.json``.
"""
from __future__ import annotations

import json
import math
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import BadMatrix, HypothesisWarning, IterationError, OpRootsError
from .generators import GeneratorSpec, generate, random_pair
from .iterative import IterationConfig, binomial_method, halley_pth_root, newton_pth_root, newton_sqrt, visser_method
from .matrix_core import norm2, rel_diff
from .mean import geometric_mean, mean_integral
from .roots import principal_power, riesz_negative_power
from .sign import pth_root_via_sign, sign_direct, sign_integral, sign_newton, sylvester_solve
from .traces import _jsonable

STATES = ("certified", "hypothesis-warned", "errored")
SIGN_METHODS = ("SignNewton", "SignDirect", "SignIntegral")
ROOT_METHODS = ("NewtonSqrt", "Binomial", "Visser", "NewtonPth", "HalleyPth", "PthViaSign",
                "SchurPower", "RieszQuadrature")
PAIR_METHODS = ("GeometricMean", "MeanIntegral", "Sylvester")
METHODS = SIGN_METHODS + ROOT_METHODS + PAIR_METHODS
NEWTON_SQRT_MAX_ONSET = 30
CERT_RTOL = 1e-6


@dataclass(frozen=True)
class ExperimentConfig:
    """One block of the cross-product: a generator, its dimensions and the methods to run on it."""

    generator: dict
    methods: tuple = ()
    tolerances: tuple = (1e-10,)
    seeds: int = 1
    n: tuple = ()
    p: int = 2
    max_iter: int = 200

    def __post_init__(self):
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ValueError(f"unknown methods {unknown}")
        if self.seeds < 1 or self.p < 2 or self.max_iter < 1:
            raise ValueError("seeds, p and max_iter must be positive (p >= 2)")
        if any(not t > 0 for t in self.tolerances):
            raise ValueError("tolerances must be positive")
        GeneratorSpec.from_json(self.generator)  # validates

    @classmethod
    def from_json(cls, doc: dict) -> "ExperimentConfig":
        doc = dict(doc)
        for key in ("methods", "tolerances", "n"):
            if key in doc:
                doc[key] = tuple(doc[key])
        return cls(**doc)


@dataclass(frozen=True)
class SuiteConfig:
    master_seed: int = 0
    experiments: tuple = ()
    workers: int = 1
    keep_traces: bool = True

    @classmethod
    def from_json(cls, doc: dict) -> "SuiteConfig":
        if not isinstance(doc, dict):
            raise BadMatrix("suite config must be a JSON object")
        try:
            exps = tuple(ExperimentConfig.from_json(e) for e in doc.get("experiments", ()))
            return cls(master_seed=int(doc.get("master_seed", 0)), experiments=exps,
                       workers=int(doc.get("workers", 1)), keep_traces=bool(doc.get("keep_traces", True)))
        except (TypeError, ValueError) as exc:
            raise BadMatrix(f"invalid suite config: {exc}") from exc

    @classmethod
    def load(cls, path) -> "SuiteConfig":
        try:
            with open(path) as fh:
                return cls.from_json(json.load(fh))
        except json.JSONDecodeError as exc:
            raise BadMatrix(f"config is not valid JSON: {exc}") from exc

    def to_json(self) -> dict:
        return _jsonable(asdict(self))


def run_seed(master: int, counter: int) -> int:
    """Per-instance seed derived from the master seed and a counter."""
    return int(np.random.SeedSequence([master, counter]).generate_state(1, np.uint64)[0])


def plan(config: SuiteConfig) -> list:
    """Expand the config into run descriptions (one instance per counter value)."""
    runs, counter = [], 0
    for ei, exp in enumerate(config.experiments):
        for si in range(exp.seeds):
            seed = run_seed(config.master_seed, counter)
            counter += 1
            gen = dict(exp.generator, seed=seed)
            if exp.n:
                gen["n"] = exp.n[si % len(exp.n)]
            for method in exp.methods:
                for ti, tol in enumerate(exp.tolerances):
                    runs.append({"id": f"e{ei:02d}-s{si:03d}-{method}-t{ti}", "experiment": ei,
                                 "generator": gen, "seed": seed, "method": method, "tol": tol,
                                 "p": exp.p, "max_iter": exp.max_iter})
    return runs


# -- single runs ------------------------------------------------------------------

def _sector(x) -> float:
    lam = np.linalg.eigvals(x)
    lam = lam[np.abs(lam) > 1e-10 * max(1.0, norm2(x))]
    return float(np.max(np.abs(np.angle(lam)))) if len(lam) else 0.0


def _root_ok(x, a, p) -> tuple:
    res = norm2(np.linalg.matrix_power(x, p) - a) / max(norm2(a), 1e-300)
    return res, bool(res <= CERT_RTOL and _sector(x) <= math.pi / p + 1e-6)


def _run_sign(method, a, tol, max_iter):
    if method == "SignNewton":
        r = sign_newton(a, tol=tol, max_iter=max_iter)
    else:
        r = (sign_direct if method == "SignDirect" else sign_integral)(a)
    eye = np.eye(a.shape[0])
    s = r.S
    res = norm2(s @ s - eye) / max(1.0, norm2(s) ** 2)
    ok = res <= 1e-8 and norm2(s @ a - a @ s) <= 1e-8 * max(1.0, norm2(s) * norm2(a))
    return r.trace, res, ok


def _run_root(method, a, tol, max_iter, p):
    if method in ("NewtonSqrt", "NewtonPth", "HalleyPth"):
        cfg = IterationConfig(method=method, p=p if method != "NewtonSqrt" else 2, tol=tol,
                              max_iter=max_iter, strict=False)
        fn = {"NewtonSqrt": lambda: newton_sqrt(a, cfg), "NewtonPth": lambda: newton_pth_root(a, p, cfg),
              "HalleyPth": lambda: halley_pth_root(a, p, cfg)}[method]
        res, trace = fn()
        rel = res.residual / max(norm2(a), 1e-300)
        return trace, rel, bool(trace.checks.get("certified"))
    if method in ("Binomial", "Visser"):
        cfg = IterationConfig(method=method, tol=tol, max_iter=max_iter, strict=False)
        if method == "Binomial":
            # the binomial iteration targets 1 - a^{1/2} through b = 1 - a
            eye = np.eye(a.shape[0])
            x, trace = binomial_method(eye - a, cfg)
            rel, _ = _root_ok(eye - x, a, 2)
        else:
            r, trace = visser_method(a, 1.0, cfg)
            x = r.value
            rel, _ = _root_ok(x, a, 2)
        lim = trace.checks.get("limit_rel_diff")
        return trace, rel, bool(trace.converged and rel <= CERT_RTOL and lim is not None and lim <= CERT_RTOL)
    if method == "PthViaSign":
        r = pth_root_via_sign(a, p)
        rel, ok = _root_ok(r.value, a, p)
        return None, rel, ok
    if method == "SchurPower":
        r = principal_power(a, 1.0 / p)
        rel, ok = _root_ok(r.value, a, p)
        return None, rel, ok
    r = riesz_negative_power(a, 1.0 / p)
    dev = rel_diff(r.value, principal_power(a, -1.0 / p).value)
    return None, dev, bool(dev <= CERT_RTOL)


def _run_pair(method, a, b, seed):
    if method == "Sylvester":
        rng = np.random.default_rng(seed)
        bl = -b
        y = rng.standard_normal(a.shape) + 1j * rng.standard_normal(a.shape)
        x = sylvester_solve(a, bl, y)
        res = norm2(a @ x - x @ bl - y) / max((norm2(a) + norm2(bl)) * norm2(x), 1e-300)
        return res, bool(res <= CERT_RTOL)
    r = geometric_mean(a, b) if method == "GeometricMean" else mean_integral(a, b)
    res = (r.riccati_residual or 0.0) / max(norm2(b), 1e-300)
    ok = r.riccati_residual is not None and res <= CERT_RTOL and (r.sector_angle or 0.0) <= math.pi / 2 + 1e-6
    return res, bool(ok)


def _violation(method, checks) -> Optional[bool]:
    if method == "SignNewton":
        return not checks.get("bound", True)
    if method == "NewtonSqrt" and "bound_onset" in checks:
        return checks["bound_onset"] > NEWTON_SQRT_MAX_ONSET
    if method == "NewtonPth" and "ball_bound_half" in checks:
        return not checks["ball_bound_half"]
    return None


def execute(run: dict, keep_trace: bool = True) -> tuple:
    """Run one description; returns ``(record, seconds, csv_or_None)``. Never raises on method errors."""
    t0 = time.perf_counter()
    method, tol = run["method"], run["tol"]
    rec = {k: run[k] for k in ("id", "experiment", "generator", "seed", "method", "tol", "p")}
    rec.update(state="errored", error=None, warnings=[], residual=None, certified=False,
               stop_reason=None, steps=None, order=None, bound_violation=None, checks={},
               hypothesis=None)
    trace = None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            spec = GeneratorSpec.from_json(run["generator"])
            if method in PAIR_METHODS:
                a, b = random_pair(spec) if spec.kind != "FixedInstance" else generate(spec)
                res, ok = _run_pair(method, a, b, run["seed"])
            else:
                a = generate(spec)
                if isinstance(a, tuple):
                    raise BadMatrix(f"{spec.name} is a pair; {method} needs a single matrix")
                if method in SIGN_METHODS:
                    trace, res, ok = _run_sign(method, a, tol, run["max_iter"])
                else:
                    trace, res, ok = _run_root(method, a, tol, run["max_iter"], run["p"])
            rec.update(residual=res, certified=ok)
            if not ok:
                rec["error"] = {"type": "CertificateFailed", "message": "result failed its certificate"}
        except IterationError as exc:
            trace = exc.trace
            rec["error"] = {"type": type(exc).__name__, "message": str(exc)}
        except (OpRootsError, np.linalg.LinAlgError, ValueError) as exc:
            rec["error"] = {"type": type(exc).__name__, "message": str(exc)}
    msgs = sorted({str(w.message) for w in caught if issubclass(w.category, HypothesisWarning)})
    if trace is not None:
        msgs = sorted(set(msgs) | set(trace.warnings))
        rec.update(stop_reason=trace.stop_reason, steps=trace.n_steps, order=trace.checks.get("order"),
                   checks=trace.checks, hypothesis=trace.hypothesis,
                   bound_violation=_violation(method, trace.checks))
        if not trace.converged and rec["error"] is None:
            rec["error"] = {"type": "NoConvergence", "message": trace.stop_reason}
    rec["warnings"] = msgs
    if rec["error"] is None:
        rec["state"] = "hypothesis-warned" if msgs else "certified"
    csv = trace.to_csv() if (trace is not None and keep_trace) else None
    return _jsonable(rec), time.perf_counter() - t0, csv


def _execute_star(args):
    return execute(*args)


def summarize(records: list) -> dict:
    counts = {s: 0 for s in STATES}
    per_method = {}
    for r in records:
        counts[r["state"]] += 1
        m = per_method.setdefault(r["method"], {"runs": 0, "max_residual": None, "orders": [],
                                                "bound_violations": 0, **{s: 0 for s in STATES}})
        m["runs"] += 1
        m[r["state"]] += 1
        if isinstance(r["residual"], float):
            m["max_residual"] = r["residual"] if m["max_residual"] is None else max(m["max_residual"], r["residual"])
        if isinstance(r["order"], float):
            m["orders"].append(r["order"])
        m["bound_violations"] += int(bool(r["bound_violation"]))
    for m in per_method.values():
        orders = m.pop("orders")
        m["order_fit"] = ({"min": min(orders), "max": max(orders), "mean": float(np.mean(orders)),
                           "count": len(orders)} if orders else None)
    return {"runs": len(records), "states": counts,
            "bound_violations": sum(m["bound_violations"] for m in per_method.values()),
            "methods": dict(sorted(per_method.items()))}


@dataclass
class ExperimentReport:
    config: dict
    runs: list
    summary: dict
    timings: dict = field(default_factory=dict)
    traces: dict = field(default_factory=dict, repr=False)

    def to_json(self) -> dict:
        return {"config": self.config, "runs": self.runs, "summary": self.summary}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=1) + "\n"

    @classmethod
    def loads(cls, text: str) -> "ExperimentReport":
        doc = json.loads(text)
        return cls(doc["config"], doc["runs"], doc["summary"])

    @property
    def has_warnings(self) -> bool:
        return self.summary["states"]["hypothesis-warned"] > 0

    @property
    def has_errors(self) -> bool:
        return self.summary["states"]["errored"] > 0

    def write(self, out_dir) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(self.dumps())
        (out / "timings.json").write_text(json.dumps(self.timings, sort_keys=True, indent=1) + "\n")
        if self.traces:
            tdir = out / "traces"
            tdir.mkdir(exist_ok=True)
            for rid, csv in sorted(self.traces.items()):
                (tdir / f"{rid}.csv").write_text(csv)
        return out / "report.json"


def run_suite(config, out_dir=None) -> ExperimentReport:
    """Execute every run of ``config`` (a :class:`SuiteConfig`, dict or JSON path).

    Method errors are captured per run and never abort the suite.
    """
    if isinstance(config, (str, os.PathLike)):
        config = SuiteConfig.load(config)
    elif isinstance(config, dict):
        config = SuiteConfig.from_json(config)
    runs = plan(config)
    jobs = [(r, config.keep_traces) for r in runs]
    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_execute_star, jobs, chunksize=8))
    else:
        results = [execute(*j) for j in jobs]
    records, timings, traces = [], {}, {}
    for rec, seconds, csv in results:
        records.append(rec)
        timings[rec["id"]] = seconds
        if csv is not None:
            traces[rec["id"]] = csv
    records.sort(key=lambda r: r["id"])
    report = ExperimentReport(config.to_json(), records, summarize(records), timings, traces)
    if out_dir is not None:
        report.write(out_dir)
    return report


DEFAULT_SUITE = {
    "master_seed": 20240611,
    "workers": 1,
    "keep_traces": True,
    "experiments": [
        {"generator": {"kind": "RandomAccretive", "theta": math.pi / 2, "margin": 0.05},
         "methods": ["NewtonSqrt", "SchurPower"], "seeds": 50, "n": [2, 4, 6, 8, 10, 12]},
        {"generator": {"kind": "RandomAccretive", "theta": math.pi / 2, "margin": 0.05, "singular": 1},
         "methods": ["NewtonSqrt"], "seeds": 50, "n": [2, 4, 6, 8]},
        {"generator": {"kind": "DiagonalPlusSimilarity", "gap": 0.05, "half": "both"},
         "methods": ["SignNewton", "SignDirect"], "seeds": 50, "n": [2, 4, 6, 8, 10, 12]},
        {"generator": {"kind": "ContractionBall", "radius": 0.9},
         "methods": ["Binomial", "NewtonPth"], "seeds": 50, "n": [2, 4, 6, 8, 10, 12], "p": 3},
        {"generator": {"kind": "RandomAccretive", "theta": math.pi / 2, "margin": 0.05, "min_real": 0.05},
         "methods": ["HalleyPth", "PthViaSign", "RieszQuadrature"], "seeds": 50, "n": [2, 4, 6, 8], "p": 3},
        {"generator": {"kind": "RandomAccretive", "theta": math.pi / 2, "margin": 0.05, "min_real": 0.05},
         "methods": ["GeometricMean", "MeanIntegral"], "seeds": 50, "n": [2, 4, 6, 8]},
        {"generator": {"kind": "DiagonalPlusSimilarity", "gap": 0.1, "half": "right"},
         "methods": ["Sylvester"], "seeds": 50, "n": [2, 4, 6, 8]},
    ],
}
