"""Command-line entry point ``oproots``.

Exit codes: 0 success, 2 a hypothesis warning was issued, 3 a run errored, 4 bad input.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from .dynamics import FAMILIES, rasterize_convergence_region
from .errors import BadMatrix, HypothesisWarning, IterationError, OpRootsError
from .generators import FIXED_NAMES, KINDS, GeneratorSpec, generate
from .harness import DEFAULT_SUITE, SuiteConfig, run_suite
from .iterative import (IterationConfig, binomial_method, halley_pth_root, newton_pth_root, newton_sqrt,
                        visser_method)
from .matrix_core import from_json_dict, norm2, to_json_dict
from .mean import geometric_mean, mean_counterexamples, mean_identities, mean_integral
from .roots import eigen_power, principal_power, riesz_negative_power
from .sign import pth_root_via_sign, scalar_arctan_sign, sign
from .traces import _jsonable

EXIT_OK, EXIT_WARNING, EXIT_ERROR, EXIT_BAD_INPUT = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_BAD_INPUT)


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise BadMatrix(f"cannot read {path}: {exc}") from exc


def _matrix(args):
    if args.instance:
        m = generate(GeneratorSpec("FixedInstance", name=args.instance))
        if isinstance(m, tuple):
            raise BadMatrix(f"instance {args.instance} is a pair")
        return m
    if not args.inp:
        raise BadMatrix("no input: give --in matrix.json or --instance NAME")
    return from_json_dict(_read_json(args.inp))


def _pair(args):
    if args.instance:
        m = generate(GeneratorSpec("FixedInstance", name=args.instance))
        if not isinstance(m, tuple):
            raise BadMatrix(f"instance {args.instance} is not a pair")
        return m
    if not args.inp:
        raise BadMatrix("no input: give --in pair.json ({\"a\": ..., \"b\": ...}) or --instance NAME")
    doc = _read_json(args.inp)
    if not isinstance(doc, dict) or "a" not in doc or "b" not in doc:
        raise BadMatrix("pair document needs keys 'a' and 'b'")
    return from_json_dict(doc["a"]), from_json_dict(doc["b"])


def _emit(args, summary: dict, matrix=None, trace=None, name="result"):
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        if matrix is not None:
            (out / f"{name}.json").write_text(json.dumps(to_json_dict(matrix)) + "\n")
        if trace is not None:
            (out / "trace.csv").write_text(trace.to_csv())
        (out / "summary.json").write_text(json.dumps(_jsonable(summary), sort_keys=True, indent=1) + "\n")
    print(json.dumps(_jsonable(summary), sort_keys=True, default=str))


def _trace_summary(trace) -> dict:
    return {} if trace is None else {"stop_reason": trace.stop_reason, "steps": trace.n_steps,
                                     "converged": trace.converged, "checks": trace.checks,
                                     "hypothesis": trace.hypothesis}


# -- subcommands ---------------------------------------------------------------------

def cmd_sign(args) -> int:
    if args.arctan is not None:
        z = complex(args.arctan.replace(" ", ""))
        rows = scalar_arctan_sign(z)
        _emit(args, {"z": [z.real, z.imag], "sign": 1.0 if z.real > 0 else -1.0,
                     "arctan": [[t, v.real, v.imag] for t, v in rows]})
        return EXIT_OK
    a = _matrix(args)
    kw = {"tol": args.tol, "max_iter": args.max_iter} if args.method == "newton" else {}
    r = sign(a, method=args.method, **kw)
    eye = np.eye(a.shape[0])
    _emit(args, {"method": args.method, "involution_residual": norm2(r.S @ r.S - eye),
                 **_trace_summary(r.trace)}, r.S, r.trace, "sign")
    return EXIT_OK


def _root_summary(r, trace=None) -> dict:
    return {"method": r.method, "residual": r.residual, "sector_check": r.sector_check,
            **_trace_summary(trace)}


def cmd_sqrt(args) -> int:
    a = _matrix(args)
    x0 = {"identity": "Identity", "half": "HalfAPlusI"}[args.x0]
    if args.method == "newton":
        r, t = newton_sqrt(a, IterationConfig("NewtonSqrt", x0=x0, tol=args.tol, max_iter=args.max_iter,
                                              strict=False, crouzeix_k=args.crouzeix_k))
        _emit(args, _root_summary(r, t), r.value, t, "sqrt")
    elif args.method == "binomial":
        eye = np.eye(a.shape[0])
        x, t = binomial_method(eye - a, IterationConfig("Binomial", tol=args.tol, max_iter=args.max_iter))
        _emit(args, {"method": "Binomial", "residual": norm2((eye - x) @ (eye - x) - a), **_trace_summary(t)},
              eye - x, t, "sqrt")
    elif args.method == "visser":
        r, t = visser_method(a, args.visser_t, IterationConfig("Visser", tol=args.tol, max_iter=args.max_iter))
        _emit(args, _root_summary(r, t), r.value, t, "sqrt")
    else:
        r = _direct_power(a, 2, args.method)
        _emit(args, _root_summary(r), r.value, None, "sqrt")
    return EXIT_OK


def _direct_power(a, p, method):
    if method == "schur":
        return principal_power(a, 1.0 / p)
    if method == "eigen":
        return eigen_power(a, 1.0 / p)
    if method == "riesz":
        # the quadrature gives a^{-1/p}; a^{1/p} = a a^{-(p-1)/p}
        r = riesz_negative_power(a, (p - 1) / p)
        value = a @ r.value
        return type(r)(value, "RieszQuadrature", norm2(np.linalg.matrix_power(value, p) - a), r.sector_check, r.info)
    if method == "sign":
        return pth_root_via_sign(a, p)
    raise BadMatrix(f"unknown method {method!r}")


def cmd_root(args) -> int:
    a = _matrix(args)
    p = args.p
    if args.method in ("newton", "halley"):
        cfg = IterationConfig("NewtonPth" if args.method == "newton" else "HalleyPth", p=p, tol=args.tol,
                              max_iter=args.max_iter, strict=False)
        fn = newton_pth_root if args.method == "newton" else halley_pth_root
        r, t = fn(a, p, cfg)
        _emit(args, _root_summary(r, t), r.value, t, "root")
    else:
        r = _direct_power(a, p, args.method)
        _emit(args, {**_root_summary(r), "info": {k: v for k, v in r.info.items() if k != "path"}},
              r.value, None, "root")
    return EXIT_OK


def cmd_mean(args) -> int:
    if args.counterexamples:
        _emit(args, mean_counterexamples())
        return EXIT_OK
    a, b = _pair(args)
    if args.identities:
        _emit(args, {"identities": mean_identities(a, b)})
        return EXIT_OK
    if args.method == "integral":
        r = mean_integral(a, b)
    else:
        r = geometric_mean(a, b, route=args.method)
    info = {k: v for k, v in r.info.items() if k != "history"}
    _emit(args, {"route": r.route, "riccati_residual": r.riccati_residual, "sector_angle": r.sector_angle,
                 "info": info}, r.G, None, "mean")
    return EXIT_OK


def cmd_region(args) -> int:
    raster = rasterize_convergence_region(args.family, tuple(args.window), args.resolution, args.max_iter, args.p)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        raster.write(out / f"{args.family}.pgm")
    print(json.dumps(raster.sidecar(), sort_keys=True))
    return EXIT_OK


def cmd_suite(args) -> int:
    doc = _read_json(args.inp) if args.inp else json.loads(json.dumps(DEFAULT_SUITE))
    if args.seed is not None:
        doc["master_seed"] = args.seed
    cfg = SuiteConfig.from_json(doc)
    report = run_suite(cfg, args.out)
    print(json.dumps({"states": report.summary["states"], "bound_violations": report.summary["bound_violations"],
                      "runs": report.summary["runs"]}, sort_keys=True))
    if report.has_errors:
        return EXIT_ERROR
    return EXIT_WARNING if report.has_warnings else EXIT_OK


def cmd_gen(args) -> int:
    spec = GeneratorSpec(args.kind, n=args.n, seed=args.seed or 0, theta=args.theta, margin=args.margin,
                         min_real=args.min_real, singular=args.singular, gap=args.gap, half=args.half,
                         radius=args.radius, lam=complex(args.lam), name=args.name)
    m = generate(spec)
    doc = ({"a": to_json_dict(m[0]), "b": to_json_dict(m[1])} if isinstance(m, tuple) else to_json_dict(m))
    text = json.dumps(doc) + "\n"
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="oproots", description="Roots, sign function and geometric mean of matrices.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, methods=None, default=None):
        p.add_argument("--in", dest="inp", metavar="PATH", help="matrix JSON {n, re, im}")
        p.add_argument("--instance", choices=FIXED_NAMES, help="use a named fixed instance instead of --in")
        if methods:
            p.add_argument("--method", choices=methods, default=default)
        p.add_argument("--tol", type=float, default=1e-10)
        p.add_argument("--max-iter", type=int, default=200)
        p.add_argument("--out", metavar="DIR")
        p.add_argument("--seed", type=int)

    p = sub.add_parser("sign", help="matrix sign function")
    common(p, ("newton", "direct", "integral"), "newton")
    p.add_argument("--arctan", metavar="Z", help="scalar check of (2/pi) arctan(t z) -> sign(z), e.g. 1+2j")
    p.set_defaults(func=cmd_sign)

    p = sub.add_parser("sqrt", help="principal square root")
    common(p, ("newton", "binomial", "visser", "schur", "eigen", "riesz", "sign"), "newton")
    p.add_argument("--x0", choices=("identity", "half"), default="identity")
    p.add_argument("--visser-t", type=float, default=1.0)
    p.add_argument("--crouzeix-k", type=float, default=12.0)
    p.set_defaults(func=cmd_sqrt)

    p = sub.add_parser("root", help="principal p-th root")
    common(p, ("newton", "halley", "sign", "schur", "eigen", "riesz"), "schur")
    p.add_argument("-p", type=int, required=True)
    p.set_defaults(func=cmd_root)

    p = sub.add_parser("mean", help="geometric mean a # b")
    common(p, ("auto", "direct", "epsilon", "integral"), "auto")
    p.add_argument("--identities", action="store_true", help="report both sides of the mean identities")
    p.add_argument("--counterexamples", action="store_true", help="reproduce the documented pathologies")
    p.set_defaults(func=cmd_mean)

    p = sub.add_parser("region", help="rasterize a scalar convergence region to PGM")
    p.add_argument("--family", choices=FAMILIES, default="BinomialQ")
    p.add_argument("--window", type=float, nargs=4, default=(-1.0, 3.0, -2.0, 2.0), metavar=("X0", "X1", "Y0", "Y1"))
    p.add_argument("--resolution", type=int, default=256)
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("-p", type=int, default=2)
    p.add_argument("--out", metavar="DIR")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("suite", help="run an experiment suite (default config when --in is absent)")
    p.add_argument("--in", dest="inp", metavar="CONFIG")
    p.add_argument("--out", metavar="DIR")
    p.add_argument("--seed", type=int, help="override the master seed")
    p.set_defaults(func=cmd_suite)

    p = sub.add_parser("gen", help="generate a matrix")
    p.add_argument("--kind", choices=KINDS, default="RandomAccretive")
    p.add_argument("-n", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--theta", type=float, default=math.pi / 2)
    p.add_argument("--margin", type=float, default=0.05)
    p.add_argument("--min-real", type=float, default=0.0)
    p.add_argument("--singular", type=int, default=0)
    p.add_argument("--gap", type=float, default=0.05)
    p.add_argument("--half", choices=("right", "left", "both"), default="both")
    p.add_argument("--radius", type=float, default=0.9)
    p.add_argument("--lam", default="0")
    p.add_argument("--name", choices=FIXED_NAMES)
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", HypothesisWarning)
        try:
            code = args.func(args)
        except (BadMatrix, ValueError) as exc:
            print(f"oproots: bad input: {exc}", file=sys.stderr)
            return EXIT_BAD_INPUT
        except IterationError as exc:
            if exc.trace is not None and getattr(args, "out", None):
                Path(args.out).mkdir(parents=True, exist_ok=True)
                (Path(args.out) / "trace.csv").write_text(exc.trace.to_csv())
            print(f"oproots: {type(exc).__name__}: {exc}", file=sys.stderr)
            return EXIT_ERROR
        except OpRootsError as exc:
            print(f"oproots: {type(exc).__name__}: {exc}", file=sys.stderr)
            return EXIT_ERROR
    hyp = [w for w in caught if issubclass(w.category, HypothesisWarning)]
    for w in hyp:
        print(f"oproots: warning: {w.message}", file=sys.stderr)
    if code == EXIT_OK and hyp:
        return EXIT_WARNING
    return code


if __name__ == "__main__":
    sys.exit(main())
