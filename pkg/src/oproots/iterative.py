"""Root iterations: Newton square root, binomial and Visser, Newton and Halley p-th roots.

Every run returns an :class:`~oproots.traces.IterationTrace` whose ``checks`` hold the
theorem-specific certificates (bounds, identities, contracts) evaluated along the way.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
import scipy.linalg as sla

from .errors import (HypothesisWarning, MaxIter, PreconditionFailed, RankAmbiguous, RegionViolation,
                     SeriesTruncation, Singular, SingularIterate)
from .matrix_core import as_cmatrix, eye_like, inverse, norm2, rel_diff, solve
from .roots import RootResult, principal_power
from .spectral import (ACCRETIVE_TOL, CARDIOID_OR_DISK, RegionSpec, argument_interval, classify,
                       numerical_range, range_in_region)
from .traces import IterationTrace, fit_order

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 200
CROUZEIX_K = 12.0
STAGNATION_ONSET = 1e-6
DIVERGENCE_NORM = 1e15
CAYLEY_MAX_N = 6
METHODS = ("NewtonSqrt", "Binomial", "Visser", "NewtonPth", "HalleyPth")


@dataclass(frozen=True)
class IterationConfig:
    """Settings shared by the matrix iterations.

    ``x0`` is ``"Identity"``, ``"HalfAPlusI"`` or an explicit matrix.
    ``crouzeix_k`` is the constant used in the Newton square-root bound (12 is
    proven; 2 is the conjectured value, for exploration). ``shift_experiment`` runs
    the regularized Newton step ``X + X^{-1}(a + 3^{-k})`` instead, traces only.
    """

    method: str = "NewtonSqrt"
    p: int = 2
    x0: Union[str, np.ndarray] = "Identity"
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    visser_t: float = 1.0
    crouzeix_k: float = CROUZEIX_K
    shift_experiment: bool = False
    strict: bool = True

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.p < 2:
            raise ValueError("p must be at least 2")
        if isinstance(self.x0, str) and self.x0 not in ("Identity", "HalfAPlusI"):
            raise ValueError(f"unknown starting value {self.x0!r}")

    def start(self, a: np.ndarray) -> np.ndarray:
        eye = eye_like(a)
        if isinstance(self.x0, str):
            return eye if self.x0 == "Identity" else 0.5 * (a + eye)
        return as_cmatrix(self.x0)


def _inv_norm(x: np.ndarray) -> Optional[float]:
    try:
        return norm2(inverse(x))
    except Singular:
        return None


def _run(a: np.ndarray, x0: np.ndarray, step: Callable, residual: Callable, ref: Optional[np.ndarray],
         cfg: IterationConfig, trace: IterationTrace, on_step: Optional[Callable] = None) -> list:
    """Drive ``X_{k+1} = step(X_k, k)`` and fill ``trace``; returns the iterates.

    Stops on ``residual(X) <= tol`` (ResidualTol), on the residual rising twice in a
    row after dropping below ``1e-6`` (Stagnation), or on blow-up (Divergence).
    Raises :class:`MaxIter` / :class:`SingularIterate` with the trace attached.
    """
    x = x0
    iterates = [x]
    prev, rises, reason = math.inf, 0, None
    for k in range(cfg.max_iter + 1):
        res = residual(x)
        err = None if ref is None else norm2(x - ref)
        trace.add(k, norm2(x), _inv_norm(x), err, res)
        if on_step is not None:
            on_step(k, x)
        if not math.isfinite(res) or norm2(x) > DIVERGENCE_NORM:
            reason = "Divergence"
            break
        if res <= cfg.tol:
            reason = "ResidualTol"
            break
        rises = rises + 1 if (prev < STAGNATION_ONSET and res > prev) else 0
        prev = res
        if rises >= 2:
            reason = "Stagnation"
            break
        if k == cfg.max_iter:
            break
        try:
            x = step(x, k)
        except Singular as exc:
            trace.finish("Divergence")
            raise SingularIterate(f"{trace.method}: iterate {k} is singular", trace) from exc
        iterates.append(x)
    if reason is None:
        trace.finish("MaxIter")
        raise MaxIter(f"{trace.method}: no convergence in {cfg.max_iter} steps", trace)
    trace.finish(reason)
    return iterates


def _floor(ref: Optional[np.ndarray], a: np.ndarray) -> float:
    scale = max(1.0, norm2(a) if ref is None else norm2(ref))
    return 1e4 * np.finfo(float).eps * scale


def _certify(trace: IterationTrace, x: np.ndarray, a: np.ndarray, p: int, tol: float) -> None:
    res = norm2(np.linalg.matrix_power(x, p) - a)
    lam = np.linalg.eigvals(x)
    lam = lam[np.abs(lam) > 1e-10 * max(1.0, norm2(x))]
    sector = float(np.max(np.abs(np.angle(lam)))) if len(lam) else 0.0
    trace.checks["certified"] = bool(trace.converged and res <= 10 * tol * max(norm2(a), 1e-300)
                                     and sector <= math.pi / p + 1e-6)


def _result(x, a, p, method, trace, info=None) -> RootResult:
    lam = np.linalg.eigvals(x)
    lam = lam[np.abs(lam) > 1e-10 * max(1.0, norm2(x))]
    sector = float(np.max(np.abs(np.angle(lam)))) if len(lam) else 0.0
    return RootResult(x, method, norm2(np.linalg.matrix_power(x, p) - a), sector,
                      dict(info or {}, steps=trace.n_steps, stop_reason=trace.stop_reason))


def _hypothesis(trace: IterationTrace, ok: bool, name: str, strict: bool, category=HypothesisWarning):
    if ok:
        trace.hypothesis = name
        return
    msg = f"{trace.method}: hypothesis not verified ({name})"
    if strict:
        raise PreconditionFailed(msg)
    trace.warnings.append(msg)
    warnings.warn(msg, category, stacklevel=3)


def _reference_root(a: np.ndarray, p: int) -> Optional[np.ndarray]:
    try:
        return principal_power(a, 1.0 / p, allow_singular=True).value
    except Exception:
        return None


# -- Newton square root --------------------------------------------------------

def _sqrt_regimes(a: np.ndarray, x0: np.ndarray, start_kind):
    """Which sufficient hypothesis holds: ``invertible``, ``sectorial``, both or neither."""
    regimes = []
    lam = np.linalg.eigvals(a)
    tol = 1e-10 * max(1.0, norm2(a))
    off_cut = not np.any((np.abs(lam.imag) <= tol) & (lam.real <= tol))
    if off_cut:
        commutes = norm2(x0 @ a - a @ x0) <= 1e-10 * max(1.0, norm2(a) * norm2(x0))
        if commutes:
            d = solve(principal_power(a, 0.5).value, x0)
            if np.all(np.linalg.eigvals(d).real > 0):
                regimes.append("invertible")
    report = classify(a)
    if report.sector_angle is not None and report.sector_angle < math.pi and start_kind in ("Identity", "HalfAPlusI"):
        regimes.append("sectorial")
    return regimes, report


def small_last_schur(a: np.ndarray, rtol: float = 1e-6) -> tuple:
    """Complex Schur form ``a = Q T Q*`` with eigenvalues below ``rtol ||a||`` ordered last.

    Newton-type iterates are rational functions of ``a``, so running them on ``T`` gives
    the same ``X_k`` up to the unitary change of basis. With the small eigenvalues last,
    their rows of ``T`` carry no off-diagonal entries, which keeps rounding errors from
    being amplified by ``||X_k^{-1}||`` when ``a`` is (nearly) singular.
    """
    cut = rtol * max(norm2(a), 1e-300)
    t, q, _ = sla.schur(a, output="complex", sort=lambda z: abs(z) > cut)
    return t, q


def newton_sqrt(a, cfg: Optional[IterationConfig] = None):
    """Newton's iteration ``X_{k+1} = (X_k + X_k^{-1} a) / 2`` for the principal square root.

    Hypotheses (one must hold unless ``cfg.strict`` is off):

    * invertible regime: ``Sp(a)`` off ``(-inf, 0]``, ``X_0`` commutes with ``a`` and
      ``Sp(a^{-1/2} X_0)`` is in the open right half-plane;
    * sectorial regime: ``W(a)`` in a sector ``S_rho``, ``rho < pi``, ``X_0`` in
      {Identity, HalfAPlusI}; ``a`` may be singular.

    Trace checks
    ------------
    ``bound``: in the sectorial regime, ``||X_k - a^{1/2}|| <= K/2^{k-1}`` (accretive)
    or ``<= 1.05 sec(rho/2) K / 2^k``, from the reported ``bound_onset`` on.
    ``cayley``: for invertible accretive ``a`` and ``X_0 = I``, relative deviation of
    ``X_n^{-1} c`` from ``(1 - G^{2^n})(1 + G^{2^n})^{-1}``, ``G = (1 - c)(1 + c)^{-1}``, ``n <= 6``.
    ``contract``: for the same runs, ``X_k`` and ``X_k^{-2} a`` accretive and
    ``W(X_k^{-1} c)`` inside ``S_{pi/4 + 1e-6}`` at every step.
    """
    cfg = cfg or IterationConfig()
    a = as_cmatrix(a)
    x0 = cfg.start(a)
    eye = eye_like(a)
    start_kind = cfg.x0 if isinstance(cfg.x0, str) else "Custom"
    regimes, report = _sqrt_regimes(a, x0, start_kind)
    trace = IterationTrace("NewtonSqrt" + ("Shifted" if cfg.shift_experiment else ""))
    _hypothesis(trace, bool(regimes), "+".join(regimes) or "none", cfg.strict)
    ref = _reference_root(a, 2)
    scale = max(norm2(a), 1e-300)
    # iterate in an ordered Schur basis; every quantity traced below is unitarily invariant
    a_orig = a
    a, q = small_last_schur(a)
    qh = q.conj().T
    x0 = cfg.start(a) if isinstance(cfg.x0, str) else qh @ x0 @ q  # keep named starts exactly triangular
    if ref is not None:
        ref = qh @ ref @ q
    accretive_inv = (report.accretive and "invertible" in regimes and start_kind == "Identity")

    cayley, contract = {}, True
    if accretive_inv and ref is not None:
        g0 = solve((eye + ref).T, (eye - ref).T).T

    def on_step(k, x):
        nonlocal contract
        if not accretive_inv or ref is None or cfg.shift_experiment:
            return
        xinv = inverse(x)
        d = xinv @ ref
        if k <= CAYLEY_MAX_N:
            g = np.linalg.matrix_power(g0, 2 ** k)
            cayley[k] = rel_diff(d, solve((eye + g).T, (eye - g).T).T)
        tol = ACCRETIVE_TOL * max(1.0, norm2(x))
        herm = lambda m: float(np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0])
        ok = herm(x) >= -tol and herm(xinv @ xinv @ a) >= -ACCRETIVE_TOL * max(1.0, norm2(xinv @ xinv @ a))
        interval = argument_interval(d, 64)
        ok &= interval is not None and max(abs(interval[0]), abs(interval[1])) <= math.pi / 4 + 1e-6
        contract &= bool(ok)

    def step(x, k):
        rhs = a + 3.0 ** (-k) * eye if cfg.shift_experiment else a
        return 0.5 * (x + solve(x, rhs))

    iterates = _run(a, x0, step, lambda x: norm2(x @ x - a) / scale, ref, cfg, trace, on_step)
    x = q @ iterates[-1] @ qh
    a = a_orig
    if "sectorial" in regimes and ref is not None:
        rho = report.sector_angle
        errs = trace.errors()
        ks = np.arange(len(errs))
        if report.accretive:
            bound = cfg.crouzeix_k / 2.0 ** (ks - 1)
        else:
            bound = 1.05 / math.cos(rho / 2) * cfg.crouzeix_k / 2.0 ** ks
        holds = errs <= bound
        bad = np.flatnonzero(~holds)
        onset = int(bad[-1] + 1) if len(bad) else 0
        trace.checks.update(bound_onset=onset, bound=bool(onset < len(errs)))
    if cayley:
        trace.checks.update(cayley=cayley, contract=contract)
    if ref is not None:
        trace.checks["order"] = fit_order(trace.errors(), _floor(ref, a))
    _certify(trace, x, a, 2, cfg.tol)
    return _result(x, a, 2, trace.method, trace, {"regimes": regimes}), trace


def semisimple_at_zero(a, rtol: float = 1e-8) -> bool:
    """``rank(a) == rank(a^2)`` at threshold ``rtol * ||a||``.

    Raises :class:`RankAmbiguous` when a singular value lies within a factor 10 of
    the threshold.
    """
    a = as_cmatrix(a)
    thr = rtol * max(norm2(a), 1e-300)
    ranks = []
    for m in (a, a @ a):
        s = np.linalg.svd(m, compute_uv=False)
        if np.any((s > thr / 10) & (s < thr * 10)):
            raise RankAmbiguous("singular values straddle the rank threshold")
        ranks.append(int(np.sum(s > thr)))
    return ranks[0] == ranks[1]


def newton_sqrt_semisimple_check(a, max_iter: int = DEFAULT_MAX_ITER, tol: float = DEFAULT_TOL) -> dict:
    """Run Newton from ``X_0 = (a + 1)/2`` and compare convergence with semisimplicity at 0.

    Returns ``{"semisimple", "converged", "agree", "stop_reason", "err"}``; ``agree`` is
    the dichotomy: convergence to the principal root exactly when 0 is semisimple.
    """
    a = as_cmatrix(a)
    if a.shape[0] > 20:
        raise ValueError("dimension must be at most 20")
    semi = semisimple_at_zero(a)
    cfg = IterationConfig(x0="HalfAPlusI", max_iter=max_iter, tol=tol, strict=False)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", HypothesisWarning)
        try:
            res, trace = newton_sqrt(a, cfg)
            converged = trace.converged
            ref = _reference_root(a, 2)
            err = None if ref is None else rel_diff(res.value, ref)
            converged &= err is not None and err <= 1e-4
            reason = trace.stop_reason
        except (MaxIter, SingularIterate) as exc:
            converged, err, reason = False, None, exc.trace.stop_reason if exc.trace else "MaxIter"
    return {"semisimple": semi, "converged": bool(converged), "agree": semi == bool(converged),
            "stop_reason": reason, "err": err}


# -- binomial and Visser -------------------------------------------------------

def _binomial_scalar_gap(r: float, n_max: int) -> np.ndarray:
    # q(r) - q_n(r) at r = ||b||: dominates the operator error for contractions
    q, out = 0.0, []
    limit = 1.0 - math.sqrt(max(0.0, 1.0 - r))
    for _ in range(n_max + 1):
        out.append(limit - q)
        q = 0.5 * (r + q * q)
    return np.array(out)


def binomial_method(b, cfg: Optional[IterationConfig] = None):
    """``X_{n+1} = (b + X_n^2)/2`` from ``X_0 = 0``; the limit is ``1 - (1 - b)^{1/2}``.

    The hypothesis is that W(b) lies in the cardioid ``{2w - w^2 : |w| < 1}`` union the
    closed unit disk; otherwise a :class:`RegionViolation` warning is issued and the
    run continues. For contractions the trace checks that the error to the
    reference never increases (``monotone``) and stays below the scalar gap
    ``q(||b||) - q_n(||b||)`` (``dominated``).
    """
    cfg = cfg or IterationConfig(method="Binomial")
    b = as_cmatrix(b)
    eye = eye_like(b)
    trace = IterationTrace("Binomial")
    _hypothesis(trace, range_in_region(b, CARDIOID_OR_DISK, 128), "cardioid-or-disk", False, RegionViolation)
    ref = None
    ref_root = _reference_root(eye - b, 2)
    if ref_root is not None:
        ref = eye - ref_root
    iterates = _run(b, np.zeros_like(b), lambda x, k: 0.5 * (b + x @ x),
                    lambda x: norm2((eye - x) @ (eye - x) - (eye - b)), ref, cfg, trace)
    x = iterates[-1]
    if ref is not None and norm2(b) <= 1.0 + 1e-12:
        errs = trace.errors()
        floor = _floor(ref, b)
        rises = np.diff(errs) > floor
        gap = _binomial_scalar_gap(min(norm2(b), 1.0), len(errs) - 1)
        trace.checks.update(monotone=bool(not np.any(rises)),
                            dominated=bool(np.all(errs <= gap * (1 + 1e-9) + floor)))
    trace.checks["limit_rel_diff"] = None if ref is None else rel_diff(x, ref)
    return x, trace


def visser_method(a, t: float = 1.0, cfg: Optional[IterationConfig] = None):
    """Visser's iteration ``X_{k+1} = X_k + (t/2)(a - X_k^2)`` from ``X_0 = I/t``.

    Computed as ``X_k = (I - B_k)/t`` with ``B_k`` the binomial iterates for
    ``b = I - t^2 a``; the direct recurrence is run alongside and the stepwise
    relative difference is recorded as ``substitution``.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    cfg = cfg or IterationConfig(method="Visser", visser_t=t)
    a = as_cmatrix(a)
    eye = eye_like(a)
    b = eye - t * t * a
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", RegionViolation)
        _, btrace = binomial_method(b, cfg)
    for w in caught:
        if issubclass(w.category, RegionViolation):
            warnings.warn(str(w.message), RegionViolation, stacklevel=2)
    # replay: binomial iterates mapped through X = (I - B)/t against the direct recurrence
    bk = np.zeros_like(a)
    xd = eye / t
    worst = 0.0
    trace = IterationTrace("Visser", hypothesis=btrace.hypothesis, warnings=list(btrace.warnings))
    ref = _reference_root(a, 2)
    scale = max(norm2(a), 1e-300)
    for k in range(btrace.n_steps + 1):
        x = (eye - bk) / t
        worst = max(worst, rel_diff(x, xd) if norm2(xd) > 0 else norm2(x))
        trace.add(k, norm2(x), _inv_norm(x), None if ref is None else norm2(x - ref),
                  norm2(x @ x - a) / scale)
        bk = 0.5 * (b + bk @ bk)
        xd = xd + 0.5 * t * (a - xd @ xd)
    trace.finish(btrace.stop_reason)
    trace.checks.update(substitution=worst, substitution_ok=bool(worst <= 1e-10))
    _certify(trace, x, a, 2, cfg.tol / max(t * t * scale, 1e-300))
    return _result(x, a, 2, "Visser", trace, {"t": t}), trace


# -- Newton and Halley p-th roots ------------------------------------------------

def series_coefficients(p: int, m: int = 40) -> np.ndarray:
    """Coefficients ``c_0..c_m`` of ``1 - z ((p - 1 + z)/p)^{-p}`` in powers of ``1 - z``.

    With ``w = 1 - z`` the expression is ``1 - (1 - w) sum_k beta_k w^k`` where
    ``beta_k = binom(p + k - 1, k) / p^k`` are the coefficients of ``(1 - w/p)^{-p}``.
    """
    beta = np.empty(m + 1)
    beta[0] = 1.0
    for k in range(1, m + 1):
        beta[k] = beta[k - 1] * (p + k - 1) / (k * p)
    c = np.zeros(m + 1)
    c[0] = 1.0 - beta[0]
    c[1:] = beta[:-1] - beta[1:]
    return c


def newton_pth_delta(a, p: int, m: int = 40) -> tuple:
    """``delta = ||1 - a X_1^{-p}||`` directly and through the series in ``1 - a``.

    Returns ``(delta, c)`` with ``c`` the series coefficients; raises
    :class:`SeriesTruncation` when the tail ``||1 - a||^m / (1 - ||1 - a||)`` exceeds
    ``1e-10`` and ``ValueError`` when the series disagrees with the direct value.
    """
    a = as_cmatrix(a)
    eye = eye_like(a)
    r = norm2(eye - a)
    if r >= 1.0:
        raise PreconditionFailed("||1 - a|| must be below 1")
    tail = r ** m / (1.0 - r)
    if tail > 1e-10:
        raise SeriesTruncation(f"series tail bound {tail:.2e} exceeds 1e-10 at M={m}")
    x1 = ((p - 1) * eye + a) / p
    direct = eye - a @ inverse(np.linalg.matrix_power(x1, p))
    c = series_coefficients(p, m)
    w = eye - a
    acc, wk = np.zeros_like(a), eye
    for i in range(m + 1):
        acc = acc + c[i] * wk
        wk = wk @ w
    if norm2(acc - direct) > 1e-8:
        raise ValueError("series and direct evaluation of 1 - a X_1^{-p} disagree")
    return norm2(direct), c


def _pth_hypothesis(a: np.ndarray, epsilon: float) -> Optional[str]:
    if norm2(eye_like(a) - a) < 1.0:
        return "ball"
    if range_in_region(a, RegionSpec("newtonD", epsilon=epsilon), 128):
        return "regionD"
    return None


def newton_pth_root(a, p: int, cfg: Optional[IterationConfig] = None, epsilon: float = 0.0,
                    x0: Optional[np.ndarray] = None):
    """Newton's iteration ``X_{k+1} = X_k((p-1) + X_k^{-p} a)/p`` from ``X_0 = I``.

    The hypothesis recorded in the trace is ``ball`` (``||1 - a|| < 1``) or
    ``regionD`` (W(a) inside the set D with parameter ``epsilon``); with neither, a
    :class:`HypothesisWarning` is issued. In the ball case the trace holds
    ``delta = ||1 - a X_1^{-p}||`` and the checks ``ball_bound``
    (``err_k <= C delta^{2^k}``, ``C`` fitted at ``k = 2``) and ``ball_bound_half``
    (the same with exponent ``2^{k-1}``), both down to the rounding floor.
    """
    cfg = cfg or IterationConfig(method="NewtonPth", p=p)
    a = as_cmatrix(a)
    eye = eye_like(a)
    trace = IterationTrace("NewtonPth")
    hyp = _pth_hypothesis(a, epsilon)
    _hypothesis(trace, hyp is not None, hyp or "none", False)
    ref = _reference_root(a, p)
    scale = max(norm2(a), 1e-300)
    start = eye if x0 is None else as_cmatrix(x0)
    step = lambda x, k: x @ ((p - 1) * eye + solve(np.linalg.matrix_power(x, p), a)) / p
    iterates = _run(a, start, step,
                    lambda x: norm2(np.linalg.matrix_power(x, p) - a) / scale, ref, cfg, trace)
    x = iterates[-1]
    if hyp == "ball" and ref is not None and x0 is None:
        x1 = ((p - 1) * eye + a) / p
        delta = norm2(eye - a @ inverse(np.linalg.matrix_power(x1, p)))
        errs = trace.errors()
        floor = _floor(ref, a)
        checks = {"delta": delta, "delta_lt_1": bool(delta < 1.0)}
        for name, shift in (("ball_bound", 0), ("ball_bound_half", 1)):
            ok, c_fit = True, None
            if len(errs) > 2 and errs[2] > floor and delta > 0:
                c_fit = errs[2] / delta ** (2 ** (2 - shift))
                for k in range(3, len(errs)):
                    if errs[k] <= floor:
                        break
                    ok &= errs[k] <= c_fit * delta ** (2 ** (k - shift)) * (1 + 1e-6)
            checks[name] = bool(ok)
            checks[name + "_C"] = c_fit
        trace.checks.update(checks)
    if ref is not None:
        trace.checks["order"] = fit_order(trace.errors(), _floor(ref, a))
    _certify(trace, x, a, p, cfg.tol)
    return _result(x, a, p, "NewtonPth", trace, {"p": p, "hypothesis": hyp}), trace


def _halley_scalar_args(lam: np.ndarray, p: int, steps: int) -> bool:
    # |arg w_k| is nonincreasing for w_k = q_k(z) z^{-1/p}, z in the right half-plane
    q = np.ones_like(lam)
    root = np.exp(np.log(lam) / p)
    prev = np.abs(np.angle(q / root))
    for _ in range(steps):
        qp = q ** p
        q = q * ((p - 1) * qp + (p + 1) * lam) / ((p + 1) * qp + (p - 1) * lam)
        cur = np.abs(np.angle(q / root))
        if np.any(cur > prev + 1e-12):
            return False
        prev = cur
    return True


def halley_pth_root(a, p: int, cfg: Optional[IterationConfig] = None):
    """Halley's iteration ``X_{k+1} = X_k Z`` with ``((p+1)X^p + (p-1)a) Z = (p-1)X^p + (p+1)a``.

    Requires ``a`` strictly accretive (margin at least ``1e-6``). The trace records
    the largest commutation drift ``||X_k Z - Z X_k||`` (relative) and the scalar
    argument-monotonicity invariant over the eigenvalues of ``a``.
    """
    cfg = cfg or IterationConfig(method="HalleyPth", p=p)
    a = as_cmatrix(a)
    eye = eye_like(a)
    trace = IterationTrace("HalleyPth")
    margin = numerical_range(a, 64).min_real
    _hypothesis(trace, margin >= 1e-6, "strictly-accretive", cfg.strict)
    ref = _reference_root(a, p)
    scale = max(norm2(a), 1e-300)
    drift = [0.0]

    def step(x, k):
        xp = np.linalg.matrix_power(x, p)
        z = solve((p + 1) * xp + (p - 1) * a, (p - 1) * xp + (p + 1) * a)
        drift[0] = max(drift[0], norm2(x @ z - z @ x) / max(norm2(x) * norm2(z), 1e-300))
        return x @ z

    iterates = _run(a, eye, step, lambda x: norm2(np.linalg.matrix_power(x, p) - a) / scale,
                    ref, cfg, trace)
    x = iterates[-1]
    lam = np.linalg.eigvals(a)
    trace.checks.update(commutation_drift=drift[0], commutation_ok=bool(drift[0] <= 1e-8),
                        scalar_arguments=_halley_scalar_args(lam, p, max(trace.n_steps, 1)))
    if ref is not None:
        trace.checks["order"] = fit_order(trace.errors(), _floor(ref, a))
    _certify(trace, x, a, p, cfg.tol)
    return _result(x, a, p, "HalleyPth", trace, {"p": p}), trace


def rotated_newton_start(a, theta: float, p: int, cfg: Optional[IterationConfig] = None,
                         n_samples: int = 32) -> IterationTrace:
    """Newton p-th root of ``e^{i theta} a`` from ``X_0 = e^{i theta/p} I`` against the base run.

    Checks ``Y_k = e^{i theta/p} X_k`` stepwise (``stepwise``) and that the limit is
    the principal root of ``e^{i theta} a`` (``principal``).
    """
    cfg = cfg or IterationConfig(method="NewtonPth", p=p)
    a = as_cmatrix(a)
    for rho in np.linspace(0.0, theta, n_samples):
        if numerical_range(np.exp(1j * rho) * a, 64).has_negative_real_point():
            raise PreconditionFailed(f"W(e^(i*{rho:.4f}) a) meets the negative real axis")
    eye = eye_like(a)
    phase = np.exp(1j * theta / p)
    rot = np.exp(1j * theta) * a
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", HypothesisWarning)
        base_cfg = IterationConfig(method="NewtonPth", p=p, tol=cfg.tol, max_iter=cfg.max_iter)
        _, base = newton_pth_root(a, p, base_cfg)
        # replay both recurrences for the stepwise comparison
        xs, ys = [eye], [phase * eye]
        for _ in range(base.n_steps):
            x, y = xs[-1], ys[-1]
            xs.append(x @ ((p - 1) * eye + solve(np.linalg.matrix_power(x, p), a)) / p)
            ys.append(y @ ((p - 1) * eye + solve(np.linalg.matrix_power(y, p), rot)) / p)
        res, trace = newton_pth_root(rot, p, base_cfg, x0=phase * eye)
    worst = max(rel_diff(y, phase * x) for x, y in zip(xs, ys))
    target = phase * principal_power(a, 1.0 / p).value
    trace.checks.update(stepwise=worst, stepwise_ok=bool(worst <= 1e-9),
                        limit_rel_diff=rel_diff(res.value, target),
                        principal=bool(rel_diff(principal_power(rot, 1.0 / p).value, target) <= 1e-8))
    return trace
