"""Geometric mean ``a # b = a^{1/2} (a^{-1/2} b a^{-1/2})^{1/2} a^{1/2}`` of accretive matrices.

Routes: ``Direct`` (the formula, when the inner matrix keeps off the branch cut),
``EpsilonLimit`` (``lim a # (b + eps)`` along ``eps = 1e-2 * 2^{-j}``) and
``IntegralQuadrature`` (``G^{-1} = (2/pi) int (e^s a + e^{-s} b)^{-1} ds``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import CertificateFailed, EpsilonStall, HypothesisFailed, NegativeSpectrum, QuadratureStall, Singular
from .matrix_core import as_cmatrix, eye_like, inverse, is_singular, norm2, rel_diff
from .roots import principal_power
from .spectral import ACCRETIVE_TOL, STRICT_MARGIN, argument_interval, numerical_range, type_m_constant

ROUTES = ("Direct", "IntegralQuadrature", "EpsilonLimit")
EPS_START = 1e-2
EPS_STOP = 1e-7
EPS_MAX_LEVELS = 60
CUT_GUARD = 1e-8


@dataclass(frozen=True)
class MeanResult:
    G: np.ndarray
    route: str
    riccati_residual: Optional[float]
    sector_angle: Optional[float]
    info: dict = field(default_factory=dict, compare=False)


def _min_real(a: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(0.5 * (a + a.conj().T))[0])


def _accretive(a: np.ndarray) -> bool:
    return _min_real(a) >= -ACCRETIVE_TOL * max(1.0, norm2(a))


def _sector_of(g: np.ndarray) -> Optional[float]:
    iv = argument_interval(g)
    return None if iv is None else float(max(abs(iv[0]), abs(iv[1])))


def _riccati(g, a, b) -> Optional[float]:
    try:
        return norm2(g @ inverse(a) @ g - b)
    except Singular:
        return None


def _near_cut(m: np.ndarray) -> bool:
    lam = np.linalg.eigvals(m)
    tol = CUT_GUARD * max(1.0, norm2(m))
    return bool(np.any((np.abs(lam.imag) <= tol) & (lam.real <= tol)))


def mean_formula(a: np.ndarray, b: np.ndarray, allow_small: bool = False) -> np.ndarray:
    """The closed formula; raises :class:`NegativeSpectrum` when the inner matrix meets the cut.

    ``allow_small`` accepts inner eigenvalues near 0 (not on the negative axis); the
    epsilon ladder needs it once ``eps`` drops below the branch tolerance.
    """
    ah = principal_power(a, 0.5).value
    aih = inverse(ah)
    inner = aih @ b @ aih
    return ah @ principal_power(inner, 0.5, allow_singular=allow_small).value @ ah


def _epsilon_limit(a, b, stop=EPS_STOP, max_levels=EPS_MAX_LEVELS):
    eye = eye_like(a)
    prev, history = None, []
    for j in range(max_levels):
        eps = EPS_START * 2.0 ** -j
        g = mean_formula(a, b + eps * eye, allow_small=True)
        if prev is not None:
            diff = norm2(g - prev)
            history.append((eps, diff))
            if diff < stop * max(1.0, norm2(g)):
                # Richardson step for an O(sqrt(eps)) error, logged only
                r = math.sqrt(2.0)
                extrap = (r * g - prev) / (r - 1.0)
                return g, {"levels": j + 1, "eps": eps, "last_diff": diff,
                           "extrapolation_shift": norm2(extrap - g), "history": history[-5:]}
        prev = g
    raise EpsilonStall(f"epsilon ladder did not settle in {max_levels} levels")


def geometric_mean(a, b, route: str = "auto") -> MeanResult:
    """``a # b`` for accretive ``a``, ``b``.

    ``route="auto"`` picks Direct when ``a`` is strictly accretive, or ``a`` is
    invertible and ``b`` strictly accretive, unless the inner matrix has an
    eigenvalue within ``1e-8`` of ``(-inf, 0]``; with ``a`` merely invertible the
    epsilon ladder is used. ``route="direct"`` forces the formula (and so may raise
    :class:`NegativeSpectrum`); ``route="epsilon"`` forces the ladder.

    Raises
    ------
    HypothesisFailed
        ``a`` or ``b`` is not accretive, or ``a`` is singular.
    EpsilonStall
        Successive ladder values never agree to ``1e-7``.
    """
    a, b = as_cmatrix(a), as_cmatrix(b)
    if a.shape != b.shape:
        from .errors import DimensionMismatch
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    if not (_accretive(a) and _accretive(b)):
        raise HypothesisFailed("both arguments must be accretive")
    if is_singular(a):
        raise HypothesisFailed("a must be invertible (or strictly accretive)")
    strict_a, strict_b = _min_real(a) > STRICT_MARGIN, _min_real(b) > STRICT_MARGIN
    info = {"strict_a": strict_a, "strict_b": strict_b}
    if route == "direct":
        g, used = mean_formula(a, b), "Direct"
    elif route == "epsilon":
        g, extra = _epsilon_limit(a, b)
        used = "EpsilonLimit"
        info.update(extra)
    elif route == "auto":
        ah = principal_power(a, 0.5).value
        aih = inverse(ah)
        inner = aih @ b @ aih
        if (strict_a or strict_b) and not _near_cut(inner):
            g, used = ah @ principal_power(inner, 0.5).value @ ah, "Direct"
        else:
            g, extra = _epsilon_limit(a, b)
            used = "EpsilonLimit"
            info.update(extra)
    else:
        raise ValueError(f"unknown route {route!r}")
    if used == "Direct" and strict_a and strict_b:
        info["dual_rel_diff"] = rel_diff(mean_formula(b, a), g)
    return MeanResult(g, used, _riccati(g, a, b), _sector_of(g), info)


def mean_integral(a, b, rtol: float = 1e-9, s_max: float = 40.0, max_levels: int = 24) -> MeanResult:
    """``G`` from ``G^{-1} = (2/pi) int_{-s_max}^{s_max} (e^s a + e^{-s} b)^{-1} ds`` (trapezoid, halving)."""
    a, b = as_cmatrix(a), as_cmatrix(b)
    if not (_min_real(a) > STRICT_MARGIN and _min_real(b) > STRICT_MARGIN):
        raise HypothesisFailed("the integral route needs a and b strictly accretive")
    eye = eye_like(a)

    def panel(s, w):
        mats = np.exp(s)[:, None, None] * a[None] + np.exp(-s)[:, None, None] * b[None]
        sol = np.linalg.solve(mats, np.broadcast_to(eye, mats.shape))
        return np.einsum("k,kij->ij", w, sol)

    n_pts = int(2 * s_max)
    h = 2 * s_max / n_pts
    w = np.ones(n_pts + 1)
    w[0] = w[-1] = 0.5
    total = panel(-s_max + h * np.arange(n_pts + 1), w)
    prev = (2 / math.pi) * h * total
    for level in range(1, max_levels + 1):
        total = total + panel(-s_max + h * (np.arange(n_pts) + 0.5), np.ones(n_pts))
        h *= 0.5
        n_pts *= 2
        cur = (2 / math.pi) * h * total
        if norm2(cur - prev) < rtol * norm2(cur):
            g = inverse(cur)
            return MeanResult(g, "IntegralQuadrature", _riccati(g, a, b), _sector_of(g),
                              {"levels": level, "nodes": n_pts + 1})
        prev = cur
    raise QuadratureStall(f"no agreement to {rtol:g} after {max_levels} refinements")


def _row(name, lhs, rhs) -> dict:
    return {"identity": name, "lhsNorm": norm2(lhs), "rhsNorm": norm2(rhs), "relDev": rel_diff(lhs, rhs)}


def mean_identities(a, b, c=None, s: float = 2.0, t: float = 3.0) -> list:
    """Both sides of the algebraic identities of the geometric mean.

    Rows: symmetry ``a#b = b#a``; inversion ``(a#b)^{-1} = a^{-1} # b^{-1}``;
    congruence ``c*(a#b)c = (c*ac)#(c*bc)``; scaling ``(sa)#(tb) = sqrt(st) a#b``;
    and, for strictly accretive pairs, ``(a+b) # (a^{-1}+b^{-1})^{-1} = a#b``.
    """
    a, b = as_cmatrix(a), as_cmatrix(b)
    c = eye_like(a) if c is None else as_cmatrix(c)
    if s <= 0 or t <= 0:
        raise ValueError("s and t must be positive")
    g = geometric_mean(a, b).G
    ai, bi = inverse(a), inverse(b)
    ch = c.conj().T
    rows = [
        _row("symmetry", g, geometric_mean(b, a).G),
        _row("inversion", inverse(g), geometric_mean(ai, bi).G),
        _row("congruence", ch @ g @ c, geometric_mean(ch @ a @ c, ch @ b @ c).G),
        _row("scaling", geometric_mean(s * a, t * b).G, math.sqrt(s * t) * g),
    ]
    if _min_real(a) > STRICT_MARGIN and _min_real(b) > STRICT_MARGIN:
        rows.append(_row("arithmetic-harmonic", geometric_mean(a + b, inverse(ai + bi)).G, g))
    return rows


def congruence_sqrt(b, c) -> np.ndarray:
    """``(c* b c)^{1/2} = c* ((c c*)^{-1} # b) c``, checked against the Schur-route root."""
    b, c = as_cmatrix(b), as_cmatrix(c)
    ch = c.conj().T
    value = ch @ geometric_mean(inverse(c @ ch), b).G @ c
    ref = principal_power(ch @ b @ c, 0.5, allow_singular=True).value
    dev = rel_diff(value, ref)
    if dev > 1e-6:
        raise CertificateFailed(f"congruence square root deviates from the Schur route by {dev:.2e}")
    return value


def type_m_inner(a, b) -> dict:
    """Type-M constant of ``a^{-1/2} b a^{-1/2}`` against ``||a^{1/2}||^2 / margin(a)``."""
    a, b = as_cmatrix(a), as_cmatrix(b)
    eps = _min_real(a)
    if eps <= STRICT_MARGIN:
        raise HypothesisFailed("a must be strictly accretive")
    if not _accretive(b):
        raise HypothesisFailed("b must be accretive")
    ah = principal_power(a, 0.5).value
    aih = inverse(ah)
    m = type_m_constant(aih @ b @ aih)
    bound = norm2(ah) ** 2 / eps
    ok = m <= bound * (1 + 1e-3)
    if not ok:
        raise CertificateFailed(f"type-M constant {m:.4g} exceeds bound {bound:.4g}")
    return {"type_m": m, "bound": bound, "margin": eps, "ok": ok}


# -- documented pathologies ---------------------------------------------------------

AGH_PAIR = (np.diag([1 + 1j, 1 - 1j]), np.diag([1 - 1j, 1 + 1j]))
NONUNIQUE_PAIR = (np.diag([1j, 2.0]), np.diag([1j, 0.5]))
NEGATIVE_INNER_B = np.array([[1.0, 1.0], [-2.0, 1.0 / 3.0]], dtype=complex)


def mean_counterexamples() -> dict:
    """Reproduce the four pathologies; each entry carries an ``ok`` flag.

    * ``negative_inner``: with ``a^{-1} = b = [[1, 1], [-2, 1/3]]`` the inner matrix
      ``a^{-1/2} b a^{-1/2} = b^2`` has a negative real number in its numerical range.
    * ``nonunique``: ``z a^{-1} z = b`` for ``a = diag(i, 2)``, ``b = diag(i, 1/2)`` has the
      two accretive solutions ``diag(i, 1)`` and ``diag(-i, 1)``.
    * ``agh``: arithmetic, geometric and harmonic means of the pair
      ``diag(1+i, 1-i)``, ``diag(1-i, 1+i)`` are ``I``, ``sqrt(2) I``, ``2 I``.
    * ``scalar_cut``: ``a = -i``, ``b = a^{-1} = i``: the formula raises
      :class:`NegativeSpectrum`, the epsilon limit returns 1.
    """
    out = {}

    b = NEGATIVE_INNER_B
    a = inverse(b)
    aih = principal_power(a, -0.5).value
    inner = aih @ b @ aih
    nr = numerical_range(inner)
    interval = nr.real_axis_interval()
    out["negative_inner"] = {
        "inner_equals_b_squared": rel_diff(inner, b @ b),
        "real_axis_interval": None if interval is None else list(interval),
        "a_strictly_accretive": _min_real(a) > 0, "b_strictly_accretive": _min_real(b) > 0,
        "ok": bool(nr.has_negative_real_point() and rel_diff(inner, b @ b) < 1e-10),
    }

    a, b = NONUNIQUE_PAIR
    sols = [np.diag([1j, 1.0]), np.diag([-1j, 1.0])]
    res = [norm2(z @ inverse(a) @ z - b) for z in sols]
    acc = [_accretive(z) for z in sols]
    limit = geometric_mean(a, b)
    out["nonunique"] = {
        "solutions": [np.diag(z).tolist() for z in sols], "residuals": res, "accretive": acc,
        "epsilon_limit": np.diag(limit.G).tolist(), "epsilon_route": limit.route,
        "ok": bool(max(res) < 1e-12 and all(acc) and norm2(sols[0] - sols[1]) > 1),
    }

    a, b = AGH_PAIR
    eye = eye_like(a)
    arith = 0.5 * (a + b)
    geo = geometric_mean(a, b).G
    harm = 2 * inverse(inverse(a) + inverse(b))
    out["agh"] = {
        "arithmetic": np.diag(arith).tolist(), "geometric": np.diag(geo).tolist(),
        "harmonic": np.diag(harm).tolist(),
        "ok": bool(norm2(arith - eye) < 1e-12 and norm2(geo - math.sqrt(2) * eye) < 1e-12
                   and norm2(harm - 2 * eye) < 1e-12),
    }

    a, b = np.array([[-1j]]), np.array([[1j]])
    try:
        geometric_mean(a, b, route="direct")
        raised = False
    except NegativeSpectrum:
        raised = True
    lim = geometric_mean(a, b)
    out["scalar_cut"] = {"direct_raises": raised, "epsilon_limit": complex(lim.G[0, 0]),
                         "route": lim.route,
                         "ok": bool(raised and lim.route == "EpsilonLimit" and abs(lim.G[0, 0] - 1) < 1e-6)}
    return out


def doubly_regularized(a, b, levels: int = 30) -> dict:
    """Experimental: ``(a + eps) # (b + eps)`` along the epsilon ladder, for merely accretive pairs.

    Reports successive differences only; nothing is asserted.
    """
    a, b = as_cmatrix(a), as_cmatrix(b)
    eye = eye_like(a)
    prev, diffs = None, []
    for j in range(levels):
        eps = EPS_START * 2.0 ** -j
        try:
            g = mean_formula(a + eps * eye, b + eps * eye)
        except (NegativeSpectrum, Singular) as exc:
            return {"stable": False, "failed_at_eps": eps, "error": type(exc).__name__, "diffs": diffs}
        if prev is not None:
            diffs.append((eps, norm2(g - prev)))
        prev = g
    return {"stable": bool(diffs and diffs[-1][1] < 1e-6), "last": prev, "diffs": diffs}
