"""The matrix sign function and the constructions built on it.

``sign(a) = a (a^2)^{-1/2}`` for ``a`` with no eigenvalue on the imaginary axis.
Newton's iteration ``X_{k+1} = (X_k + X_k^{-1}) / 2`` from ``X_0 = a`` is run
unscaled and checked against the direct formula, the stepwise quadratic bound and
the closed form ``X_k = (1 - G^{2^k})^{-1} (1 + G^{2^k}) S`` with
``G = (N - 1)(N + 1)^{-1}``, ``N = (a^2)^{1/2}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (CertificateFailed, ImaginarySpectrum, MaxIter, NegativeSpectrum,
                     PreconditionFailed, PreprocessingOverflow, Singular, SingularIterate,
                     SpectraNotSeparated)
from .matrix_core import as_cmatrix, eye_like, inverse, norm2, rel_diff, solve
from .roots import RootResult, principal_power, riesz_negative_power
from .traces import IterationTrace, fit_order

IMAG_AXIS_TOL = 1e-9
BOUND_SLACK = 1.001
STAGNATION_ONSET = 1e-6
DIVERGENCE_NORM = 1e15


@dataclass(frozen=True)
class SignResult:
    S: np.ndarray
    Eplus: np.ndarray
    Eminus: np.ndarray
    N: np.ndarray
    trace: Optional[IterationTrace] = None


def _check_imag_axis(a: np.ndarray) -> np.ndarray:
    lam = np.linalg.eigvals(a)
    tol = IMAG_AXIS_TOL * max(1.0, norm2(a))
    bad = lam[np.abs(lam.real) <= tol]
    if len(bad):
        raise ImaginarySpectrum(f"eigenvalue {bad[0]:.6g} within {tol:.1e} of the imaginary axis")
    return lam


def _result(s: np.ndarray, a: np.ndarray, trace=None) -> SignResult:
    eye = eye_like(a)
    return SignResult(S=s, Eplus=0.5 * (eye + s), Eminus=0.5 * (eye - s), N=s @ a, trace=trace)


def sign_direct(a) -> SignResult:
    """``sign(a) = a (a^2)^{-1/2}`` through the principal inverse square root of ``a^2``."""
    a = as_cmatrix(a)
    _check_imag_axis(a)
    try:
        inv_sqrt = principal_power(a @ a, -0.5).value
    except NegativeSpectrum as exc:  # cannot happen off the imaginary axis; guards rounding
        raise ImaginarySpectrum(str(exc)) from exc
    return _result(a @ inv_sqrt, a)


def sign_integral(a) -> SignResult:
    """``sign(a) = (2a/pi) int_0^inf (t^2 + a^2)^{-1} dt``, i.e. ``a`` times the quadrature ``(a^2)^{-1/2}``."""
    a = as_cmatrix(a)
    _check_imag_axis(a)
    return _result(a @ riesz_negative_power(a @ a, 0.5).value, a)


def sign_newton(a, tol: float = 1e-10, max_iter: int = 100, closed_form_ks=(1, 2, 3)) -> SignResult:
    """Unscaled Newton iteration for ``sign(a)`` with its certificates in the trace.

    Stops when ``||X_{k+1} - X_k|| <= tol ||X_k||``, or on stagnation (the relative
    step grows twice in a row after dropping below ``1e-6``).

    Trace checks
    ------------
    ``bound``: ``||X_{k+1} - S|| <= 1/2 ||X_k^{-1}|| ||X_k - S||^2 * 1.001`` at every
    step whose left side is above the floor: the larger of ``1e3 * eps * ||S||^2`` and
    ten times the final distance between the Newton limit and the direct reference
    (the attainable accuracy for ill-conditioned ``a``).
    ``closed_form``: relative deviation of ``X_k`` from the closed form for
    ``k`` in ``closed_form_ks``.
    ``order``: fitted convergence order.
    """
    a = as_cmatrix(a)
    ref = sign_direct(a)
    s_ref = ref.S
    eye = eye_like(a)
    floor = 1e3 * np.finfo(float).eps * max(1.0, norm2(s_ref)) ** 2
    trace = IterationTrace("NewtonSign")
    iterates = [a]
    x = a
    pairs = []  # (err_k, ||X_k^{-1}||, err_{k+1})
    prev_step, rises, seen_small = math.inf, 0, False
    reason = "MaxIter"
    for k in range(max_iter + 1):
        err = norm2(x - s_ref)
        try:
            xinv = inverse(x)
        except Singular as exc:
            trace.add(k, norm2(x), None, err, norm2(x @ x - eye))
            trace.finish("Divergence")
            raise SingularIterate(f"X_{k} is singular", trace) from exc
        nx_inv = norm2(xinv)
        trace.add(k, norm2(x), nx_inv, err, norm2(x @ x - eye))
        if k == max_iter:
            break
        x_new = 0.5 * (x + xinv)
        err_new = norm2(x_new - s_ref)
        pairs.append((err, nx_inv, err_new))
        step = norm2(x_new - x) / max(norm2(x), 1e-300)
        x = x_new
        iterates.append(x)
        if norm2(x) > DIVERGENCE_NORM:
            reason = "Divergence"
            trace.add(k + 1, norm2(x), None, err_new, norm2(x @ x - eye))
            break
        if step <= tol:
            reason = "ResidualTol"
            trace.add(k + 1, norm2(x), norm2(inverse(x)), err_new, norm2(x @ x - eye))
            break
        seen_small |= step < STAGNATION_ONSET
        rises = rises + 1 if (seen_small and step > prev_step) else 0
        prev_step = step
        if rises >= 2:
            reason = "Stagnation"
            trace.add(k + 1, norm2(x), norm2(inverse(x)), err_new, norm2(x @ x - eye))
            break
    trace.finish(reason)
    # below the final Newton-vs-direct disagreement, err_ref measures the reference, not X_k
    floor = max(floor, 10.0 * norm2(x - s_ref))
    bound_ok, worst = True, 0.0
    for err, nx_inv, err_new in pairs:
        if err_new > floor:
            rhs = 0.5 * nx_inv * err ** 2
            worst = max(worst, err_new / rhs if rhs > 0 else math.inf)
            bound_ok &= err_new <= rhs * BOUND_SLACK
    g0 = solve((ref.N + eye).T, (ref.N - eye).T).T  # (N - 1)(N + 1)^{-1}
    closed = {}
    for k in closed_form_ks:
        if k < len(iterates):
            g = np.linalg.matrix_power(g0, 2 ** k)
            closed[k] = rel_diff(iterates[k], solve(eye - g, (eye + g) @ s_ref))
    trace.checks.update(bound=bool(bound_ok), bound_worst_ratio=worst, closed_form=closed,
                        order=fit_order(trace.errors(), floor), err_to_direct=rel_diff(x, s_ref))
    if reason == "MaxIter":
        raise MaxIter(f"no convergence in {max_iter} steps", trace)
    return _result(x, a, trace)


def sign(a, method: str = "newton", **kw) -> SignResult:
    if method == "newton":
        return sign_newton(a, **kw)
    if method == "direct":
        return sign_direct(a)
    if method == "integral":
        return sign_integral(a)
    raise ValueError(f"unknown sign method {method!r}")


def sign_properties(a, v=None, c: float = -2.5, method: str = "direct") -> dict:
    """Relative deviations of the algebraic sign identities for one matrix.

    Keys: ``square`` (S^2 = I), ``adjoint`` (sign(a*) = sign(a)*), ``right_half``
    (sign(N) = I, since ``N = (a^2)^{1/2}`` has spectrum in the open right
    half-plane), ``similarity`` (sign(v^{-1} a v) = v^{-1} S v; skipped when ``v``
    is None), ``polar`` (a = S N), ``real_scale`` (sign(c a) = sign(c) S) and
    ``inverse`` (sign(a^{-1}) = S).
    """
    a = as_cmatrix(a)
    res = sign(a, method)
    s, eye = res.S, eye_like(a)
    n_fac = principal_power(a @ a, 0.5).value
    out = {
        "square": rel_diff(s @ s, eye),
        "adjoint": rel_diff(sign(a.conj().T, method).S, s.conj().T),
        "right_half": rel_diff(sign(n_fac, method).S, eye),
        "polar": rel_diff(s @ n_fac, a),
        "real_scale": rel_diff(sign(c * a, method).S, math.copysign(1.0, c) * s),
        "inverse": rel_diff(sign(inverse(a), method).S, s),
    }
    if v is not None:
        v = as_cmatrix(v)
        vinv = inverse(v)
        out["similarity"] = rel_diff(sign(vinv @ a @ v, method).S, vinv @ s @ v)
    return out


def sign_block(a, b, method: str = "direct") -> np.ndarray:
    """``sign([[0, a], [b, 0]])``, checked against ``[[0, c], [c^{-1}, 0]]`` with ``c = a (ba)^{-1/2}``.

    Raises
    ------
    NegativeSpectrum
        ``ba`` has an eigenvalue on ``(-inf, 0]``.
    CertificateFailed
        The computed sign lacks the off-diagonal structure.
    """
    a, b = as_cmatrix(a), as_cmatrix(b)
    n = a.shape[0]
    c = a @ principal_power(b @ a, -0.5).value
    z = np.zeros_like(a)
    s = sign(np.block([[z, a], [b, z]]), method).S
    scale = max(1.0, norm2(s))
    if max(norm2(s[:n, :n]), norm2(s[n:, n:])) > 1e-7 * scale:
        raise CertificateFailed("diagonal blocks of the block sign are not negligible")
    if rel_diff(s[:n, n:], c) > 1e-6:
        raise CertificateFailed("top-right block differs from a (ba)^{-1/2}")
    return s


def sylvester_solve(a, b, y, method: str = "newton") -> np.ndarray:
    """Solve ``a x - x b = y`` from the sign of ``[[a, y], [0, b]]``.

    The spectra of ``a`` and ``b`` must lie in opposite open half-planes. With
    ``Sp(a)`` on the right and ``Sp(b)`` on the left, ``x`` is half the 1-2 block of
    the sign; in the mirrored arrangement it is minus that half.
    """
    a, b = as_cmatrix(a), as_cmatrix(b)
    y = np.asarray(y, dtype=complex).reshape(a.shape[0], b.shape[0])
    if a.shape != b.shape:
        from .errors import DimensionMismatch
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    la, lb = _check_imag_axis(a), _check_imag_axis(b)
    if np.all(la.real > 0) and np.all(lb.real < 0):
        orient = 1.0
    elif np.all(la.real < 0) and np.all(lb.real > 0):
        orient = -1.0
    else:
        raise SpectraNotSeparated("Sp(a) and Sp(b) must lie in opposite open half-planes")
    n = a.shape[0]
    s = sign(np.block([[a, y], [np.zeros_like(a), b]]), method).S
    x = orient * 0.5 * s[:n, n:]
    res = norm2(a @ x - x @ b - y)
    if res > 1e-6 * (norm2(a) + norm2(b)) * max(norm2(x), 1e-300):
        raise CertificateFailed(f"Sylvester residual {res:.3e} too large")
    return x


# -- p-th roots through the sign of a block companion matrix -------------------

def sign_sigma(p: int) -> float:
    """``1 + 2 sum_{k=1}^{floor(p/4)} cos(2 pi k / p)``."""
    return 1.0 + 2.0 * sum(math.cos(2.0 * math.pi * k / p) for k in range(1, p // 4 + 1))


def companion(a: np.ndarray, p: int) -> np.ndarray:
    """Block companion matrix: identities on the block superdiagonal, ``a`` bottom-left."""
    n = a.shape[0]
    c = np.zeros((p * n, p * n), dtype=complex)
    for i in range(p - 1):
        c[i * n:(i + 1) * n, (i + 1) * n:(i + 2) * n] = np.eye(n)
    c[(p - 1) * n:, :n] = a
    return c


def preprocess(a: np.ndarray, p: int, max_rounds: int = 10):
    """Reduce ``(a, p)`` to an equivalent pair with ``p = 2 (mod 4)``.

    Odd ``p`` becomes ``2p`` with ``a^2``; multiples of 4 are halved with ``a^{1/2}``
    until ``p/2`` is odd. Returns ``(a', p', path)``.
    """
    path = []
    for _ in range(max_rounds + 1):
        if p % 4 == 2:
            return a, p, path
        if p % 2:
            a, p = a @ a, 2 * p
            path.append("double")
        else:
            a, p = principal_power(a, 0.5).value, p // 2
            path.append("halve")
    raise PreprocessingOverflow(f"preprocessing did not finish in {max_rounds} rounds")


def pth_root_via_sign(a, p: int, method: str = "newton", check: bool = True) -> RootResult:
    """Principal p-th root from ``sign(C)`` for the block companion matrix ``C``.

    After :func:`preprocess`, ``a^{1/p} = (p / 2 sigma) V`` where ``V`` is the 2-1 block
    of ``sign(C)``; the 1-2 block carries ``(p / 2 sigma) a^{-1/p}`` and its inverse is
    recorded as a cross-check.

    Odd ``p`` squares ``a``, which keeps the principal branch only when
    ``Sp(a)`` lies in the open right half-plane; otherwise :class:`PreconditionFailed`.
    """
    a = as_cmatrix(a)
    if p < 2:
        raise ValueError("p must be at least 2")
    lam = np.linalg.eigvals(a)
    tol = 1e-10 * max(1.0, norm2(a))
    if np.any(np.abs(lam) <= tol):
        raise Singular("a must be invertible")
    if np.any((np.abs(lam.imag) <= tol) & (lam.real < 0)):
        raise NegativeSpectrum("a has a negative real eigenvalue")
    if p % 2 and np.any(lam.real <= 0):
        raise PreconditionFailed("odd p squares a; needs Sp(a) in the open right half-plane")
    a2, q, path = preprocess(a, p)
    n = a.shape[0]
    res = sign(companion(a2, q), method)
    s = res.S
    sigma = sign_sigma(q)
    value = (q / (2.0 * sigma)) * s[n:2 * n, :n]
    info = {"p": p, "p_reduced": q, "sigma": sigma, "path": path,
            "upper_block_check": rel_diff(inverse((q / (2.0 * sigma)) * s[:n, n:2 * n]), value)}
    if res.trace is not None:
        info["sign_steps"] = res.trace.n_steps
    if check:
        info["principal_rel_diff"] = rel_diff(value, principal_power(a, 1.0 / p).value)
    lam_v = np.linalg.eigvals(value)
    return RootResult(value, "SignCompanion",
                      norm2(np.linalg.matrix_power(value, p) - a),
                      float(np.max(np.abs(np.angle(lam_v)))), info)


def scalar_arctan_sign(z: complex, ts=(1e2, 1e4, 1e6, 1e8)) -> list:
    """``(2/pi) arctan(t z)`` for growing ``t``; approaches ``sign(z)`` off the imaginary axis."""
    z = complex(z)
    out = []
    for t in ts:
        w = t * z
        # arctan(w) = (1/2i) log((1 + iw)/(1 - iw)), principal branch
        val = (2.0 / math.pi) * (np.log((1 + 1j * w) / (1 - 1j * w)) / 2j)
        out.append((t, complex(val)))
    return out
