"""Principal fractional powers ``x^alpha`` by three independent routes.

* ``SchurTriangular``: complex Schur form, principal p-th root of the triangular
  factor by the column recurrence of Smith (exact for repeated eigenvalues), then an
  integer power for rational exponents.
* ``RieszQuadrature``: the resolvent integral
  ``x^{-alpha} = sin(pi alpha)/pi * int_0^inf t^{-alpha} (t + x)^{-1} dt``.
* ``EigenOracle``: eigendecomposition, for constructed diagonalizable instances only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import NegativeSpectrum, PreconditionFailed, QuadratureStall, Singular
from .matrix_core import as_cmatrix, eye_like, inverse, norm2, schur
from .spectral import argument_interval, numerical_range, type_m_constant

BRANCH_TOL = 1e-10
MAX_DENOMINATOR = 1000
METHODS = ("EigenOracle", "RieszQuadrature", "SchurTriangular")


@dataclass(frozen=True)
class RootResult:
    """A computed power ``x^alpha`` with its certificates.

    ``residual`` is ``||value^p - x||_2`` when ``alpha = 1/p`` (``nan`` otherwise);
    ``sector_check`` is the largest eigenvalue argument of ``value``.
    """

    value: np.ndarray
    method: str
    residual: float
    sector_check: float
    info: dict = field(default_factory=dict, compare=False)


def scalar_power(z, alpha: float):
    """Principal power with ``arg`` in ``(-pi, pi]``."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros_like(z)
    nz = z != 0
    out[nz] = np.exp(alpha * (np.log(np.abs(z[nz])) + 1j * np.angle(z[nz])))
    return out if out.ndim else complex(out)


def _check_branch(values, scale: float, alpha: float, allow_singular: bool):
    tol = BRANCH_TOL * max(1.0, scale)
    for lam in values:
        if abs(lam) <= tol:
            if alpha < 0:
                raise Singular(f"eigenvalue {lam:.3e} at 0; negative powers need x invertible")
            if not allow_singular:
                raise NegativeSpectrum(f"eigenvalue {lam:.3e} at 0 lies on the closed negative axis")
        elif abs(lam.imag) <= tol and lam.real < 0:
            raise NegativeSpectrum(f"eigenvalue {lam:.6g} on the negative real axis")


def triangular_root(t: np.ndarray, p: int) -> np.ndarray:
    """Principal p-th root of an upper-triangular matrix.

    Column recurrence of Smith: with ``P[m] = R^m``, each superdiagonal entry of
    ``R`` solves a scalar linear equation whose coefficient is
    ``sum_k r_ii^{p-1-k} r_jj^k``. A vanishing coefficient (both diagonal entries
    zero) with a vanishing right-hand side is the semisimple case and the entry
    is set to 0; a nonvanishing right-hand side means no root exists.
    """
    n = t.shape[0]
    r = np.zeros_like(t)
    d = scalar_power(np.diag(t), 1.0 / p)
    # P[m] for m = 0..p-1; P[0] = I
    pw = np.zeros((p, n, n), dtype=complex)
    pw[0] = np.eye(n)
    for m in range(1, p):
        pw[m][np.diag_indices(n)] = d ** m
    np.fill_diagonal(r, d)
    scale = max(1.0, float(np.max(np.abs(t))))
    for j in range(1, n):
        for i in range(j - 1, -1, -1):
            ri, rj = d[i], d[j]
            # a_m = sum_{k<m} ri^{m-1-k} rj^k; b_m collects the terms free of r_ij
            a_prev, b_prev = 1.0 + 0j, 0j
            mid = r[i, i + 1:j]
            a_all = [0j, a_prev]
            b_all = [0j, b_prev]
            for m in range(2, p + 1):
                a_prev = ri * a_prev + rj ** (m - 1)
                b_prev = ri * b_prev + mid @ pw[m - 1][i + 1:j, j]
                a_all.append(a_prev)
                b_all.append(b_prev)
            num = t[i, j] - b_all[p]
            coef = a_all[p]
            if abs(coef) <= 1e-14 * scale:
                if abs(num) > 1e-8 * scale:
                    raise NegativeSpectrum("nilpotent structure at 0: no p-th root exists")
                rij = 0j
            else:
                rij = num / coef
            r[i, j] = rij
            for m in range(1, p):
                pw[m][i, j] = a_all[m] * rij + b_all[m]
    return r


def _rational(alpha: float) -> Optional[Fraction]:
    frac = Fraction(alpha).limit_denominator(MAX_DENOMINATOR)
    return frac if abs(float(frac) - alpha) <= 1e-15 * max(1.0, abs(alpha)) else None


def _residual(value: np.ndarray, x: np.ndarray, alpha: float) -> float:
    frac = _rational(alpha)
    if frac is None or frac.numerator != 1:
        return float("nan")
    return norm2(np.linalg.matrix_power(value, frac.denominator) - x)


def _sector(value: np.ndarray) -> float:
    lam = np.linalg.eigvals(value)
    lam = lam[np.abs(lam) > 1e-12 * max(1.0, norm2(value))]
    return float(np.max(np.abs(np.angle(lam)))) if len(lam) else 0.0


def _parlett(t: np.ndarray, alpha: float) -> np.ndarray:
    # divided-difference recurrence; only for irrational exponents
    n = t.shape[0]
    f = np.diag(scalar_power(np.diag(t), alpha)).astype(complex)
    for j in range(1, n):
        for i in range(j - 1, -1, -1):
            gap = t[i, i] - t[j, j]
            if abs(gap) < 1e-8 * max(1.0, abs(t[i, i])):
                raise Singular("clustered eigenvalues; use a rational exponent")
            s = t[i, j] * (f[i, i] - f[j, j])
            s += f[i, i + 1:j] @ t[i + 1:j, j] - t[i, i + 1:j] @ f[i + 1:j, j]
            f[i, j] = s / gap
    return f


def principal_power(x, alpha: float, allow_singular: bool = False) -> RootResult:
    """Principal power ``x^alpha`` for real ``alpha`` in ``(-1, 1)``, via the Schur form.

    Parameters
    ----------
    x : array_like
        Square matrix with no eigenvalue on ``(-inf, 0]`` (0 is allowed for
        ``alpha > 0`` when ``allow_singular`` is set).
    alpha : float
        Exponent; rational exponents ``m/q`` (``q <= 1000``) are evaluated as
        ``(x^{1/q})^m``, others by the divided-difference recurrence.

    Raises
    ------
    NegativeSpectrum
        An eigenvalue lies within ``1e-10 * max(1, ||x||)`` of ``(-inf, 0]``.
    Singular
        ``alpha < 0`` and ``x`` has an eigenvalue at 0.
    """
    x = as_cmatrix(x)
    if not (-1.0 < alpha < 1.0) or alpha == 0.0:
        raise ValueError("alpha must lie in (-1, 1) and be nonzero")
    t, q = schur(x)
    _check_branch(np.diag(t), norm2(x), alpha, allow_singular)
    frac = _rational(abs(alpha))
    if frac is not None:
        root = triangular_root(t, frac.denominator)
        f = np.linalg.matrix_power(root, frac.numerator)
    else:
        f = _parlett(t, abs(alpha))
    value = q @ f @ q.conj().T
    if alpha < 0:
        value = inverse(value)
    return RootResult(value, "SchurTriangular", _residual(value, x, alpha), _sector(value),
                      {"alpha": alpha})


def principal_root(x, p: int, allow_singular: bool = False) -> np.ndarray:
    """Shorthand for ``principal_power(x, 1/p).value``."""
    return principal_power(x, 1.0 / p, allow_singular=allow_singular).value


def eigen_power(x, alpha: float) -> RootResult:
    """Eigendecomposition route; for diagonalizable inputs with a known eigenbasis."""
    x = as_cmatrix(x)
    w, v = np.linalg.eig(x)
    _check_branch(w, norm2(x), alpha, allow_singular=alpha > 0)
    value = (v * scalar_power(w, alpha)) @ np.linalg.inv(v)
    return RootResult(value, "EigenOracle", _residual(value, x, alpha), _sector(value),
                      {"alpha": alpha, "cond_v": float(np.linalg.cond(v))})


def riesz_negative_power(x, alpha: float, rtol: float = 1e-9, max_levels: int = 24,
                         tail_tol: float = 1e-13) -> RootResult:
    """``x^{-alpha}`` from the resolvent integral, trapezoid rule in ``s = log t``.

    The integrand ``e^{(1-alpha)s} (e^s + x)^{-1}`` decays like ``e^{-alpha s}`` to the
    right and ``e^{(1-alpha)s}`` to the left, so the window ``[s_lo, s_hi]`` is chosen
    per side to push each tail below ``tail_tol``; a fixed symmetric window would
    leave ``e^{-40 alpha}`` behind for small ``alpha``. The step is halved until two
    levels agree to ``rtol * ||x^{-1}||^alpha``.
    """
    x = as_cmatrix(x)
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    _check_branch(np.linalg.eigvals(x), norm2(x), -alpha, allow_singular=False)
    inv_norm = norm2(inverse(x))
    big = max(norm2(x), 1.0)
    s_hi = (math.log(big) + math.log(1.0 / (alpha * tail_tol))) / alpha + math.log(big)
    s_lo = -(math.log(max(inv_norm, 1.0)) + math.log(1.0 / ((1 - alpha) * tail_tol))) / (1 - alpha) \
        - math.log(max(inv_norm, 1.0))
    eye = eye_like(x)
    coef = math.sin(math.pi * alpha) / math.pi
    target = rtol * inv_norm ** alpha

    def panel(s, w):
        mats = np.exp(s)[:, None, None] * eye[None] + x[None]
        sol = np.linalg.solve(mats, np.broadcast_to(eye, mats.shape))
        return np.einsum("k,kij->ij", w * np.exp((1 - alpha) * s), sol)

    n_pts = int(math.ceil(s_hi - s_lo))
    h = (s_hi - s_lo) / n_pts
    w = np.ones(n_pts + 1)
    w[0] = w[-1] = 0.5
    total = panel(s_lo + h * np.arange(n_pts + 1), w)
    prev = coef * h * total
    for level in range(1, max_levels + 1):
        mids = s_lo + h * (np.arange(n_pts) + 0.5)
        total = total + panel(mids, np.ones(n_pts))
        h *= 0.5
        n_pts *= 2
        cur = coef * h * total
        if norm2(cur - prev) < target:
            return RootResult(cur, "RieszQuadrature", float("nan"), _sector(cur),
                              {"alpha": -alpha, "levels": level, "window": (s_lo, s_hi),
                               "nodes": n_pts + 1})
        prev = cur
    raise QuadratureStall(f"no agreement to {target:.2e} after {max_levels} refinements")


# -- identities ---------------------------------------------------------------

def rotation_identity(x, theta: float, s: float, n_samples: int = 32):
    """Compare ``(e^{i theta} x)^s`` with ``e^{i s theta} x^s``.

    The rotation path ``e^{i rho} x``, ``rho`` in ``[0, theta]``, is sampled at
    ``n_samples`` angles; a hull point on the negative real axis at any sample raises
    :class:`PreconditionFailed`.

    Returns
    -------
    lhs, rhs : ndarray
    agree : bool
        ``||lhs - rhs|| <= 1e-8 ||rhs||``.
    """
    x = as_cmatrix(x)
    for rho in np.linspace(0.0, theta, n_samples):
        if numerical_range(np.exp(1j * rho) * x, 64).has_negative_real_point():
            raise PreconditionFailed(f"W(e^(i*{rho:.4f}) x) meets the negative real axis")
    lhs = principal_power(np.exp(1j * theta) * x, s).value
    rhs = np.exp(1j * s * theta) * principal_power(x, s).value
    return lhs, rhs, bool(norm2(lhs - rhs) <= 1e-8 * norm2(rhs))


def argument_shrink(a, s: float, tol: float = 1e-6):
    """Argument interval of W(a) versus that of W(a^s); verdict ``after within s * before``."""
    a = as_cmatrix(a)
    before = argument_interval(a)
    if before is None:
        raise PreconditionFailed("W(a) meets the negative real axis or surrounds 0")
    after = argument_interval(principal_power(a, s, allow_singular=True).value)
    if after is None:
        return before, None, False
    ok = after[0] >= s * before[0] - tol and after[1] <= s * before[1] + tol
    return before, after, bool(ok)


def root_holder(a, b, t: float):
    """``(||a^t - b^t||, ||a - b||^t)``; their ratio estimates the Holder constant."""
    a, b = as_cmatrix(a), as_cmatrix(b)
    if not 0.0 < t <= 1.0:
        raise ValueError("t must lie in (0, 1]")
    for name, m in (("a", a), ("b", b)):
        if not math.isfinite(type_m_constant(m)):
            raise PreconditionFailed(f"{name} is not of type M")
    if t == 1.0:
        return norm2(a - b), norm2(a - b)
    at = principal_power(a, t, allow_singular=True).value
    bt = principal_power(b, t, allow_singular=True).value
    return norm2(at - bt), norm2(a - b) ** t
