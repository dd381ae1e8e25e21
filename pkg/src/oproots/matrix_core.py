"""Dense complex square matrices: validation, products, inverses, Schur form, norms, JSON I/O.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``; every public
function validates its inputs through :func:`as_cmatrix` and never mutates them.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
import scipy.linalg as sla

from .errors import BadMatrix, DimensionMismatch, NoConvergence, Singular

MAX_DIM = 200
PIVOT_RTOL = 1e-12
EIGVEC_MAX_COND = 1e8


def as_cmatrix(a) -> np.ndarray:
    """Return ``a`` as a finite square complex128 array (scalars become 1x1)."""
    arr = np.array(a, dtype=complex)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise BadMatrix(f"expected a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise BadMatrix("matrix has non-finite entries")
    return arr


def eye_like(a: np.ndarray) -> np.ndarray:
    return np.eye(a.shape[0], dtype=complex)


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


def multiply(a, b) -> np.ndarray:
    a, b = as_cmatrix(a), as_cmatrix(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    return a @ b


def _lu(a: np.ndarray):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(a, check_finite=False)
    smallest = np.min(np.abs(np.diag(lu)))
    scale = np.linalg.norm(a, "fro")
    if scale == 0.0 or smallest < PIVOT_RTOL * scale:
        raise Singular(f"smallest pivot {smallest:.3e} below {PIVOT_RTOL:g}*||a||_F = {PIVOT_RTOL * scale:.3e}")
    return lu, piv


def solve(a, b) -> np.ndarray:
    """Solve ``a x = b`` by partial-pivot LU, raising :class:`Singular` on tiny pivots."""
    a = as_cmatrix(a)
    b = np.asarray(b, dtype=complex)
    if b.shape[0] != a.shape[0]:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    return sla.lu_solve(_lu(a), b, check_finite=False)


def inverse(a) -> np.ndarray:
    a = as_cmatrix(a)
    return sla.lu_solve(_lu(a), eye_like(a), check_finite=False)


def is_singular(a) -> bool:
    try:
        _lu(as_cmatrix(a))
    except Singular:
        return True
    return False


def matrix_power(a: np.ndarray, k: int) -> np.ndarray:
    """Integer power by repeated squaring; negative ``k`` goes through :func:`inverse`."""
    if k < 0:
        return matrix_power(inverse(a), -k)
    return np.linalg.matrix_power(a, k)


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues plus the complex Schur factorisation ``a = Q T Q*``.

    ``vectors`` is ``None`` unless requested and the eigenvector matrix has
    condition number at most ``EIGVEC_MAX_COND`` (defective or nearly so otherwise).
    """

    values: np.ndarray
    schur_q: np.ndarray
    schur_t: np.ndarray
    vectors: Optional[np.ndarray] = None


def sort_eigenvalues(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=complex)
    order = np.lexsort((-values.imag, -values.real))
    return values[order]


def schur(a) -> tuple[np.ndarray, np.ndarray]:
    a = as_cmatrix(a)
    if a.shape[0] > MAX_DIM:
        raise BadMatrix(f"dimension {a.shape[0]} exceeds desk-scale limit {MAX_DIM}")
    try:
        t, q = sla.schur(a, output="complex", check_finite=False)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NoConvergence(f"Schur QR iteration failed: {exc}") from exc
    return t, q


def eig(a, vectors: bool = False) -> EigenDecomposition:
    a = as_cmatrix(a)
    t, q = schur(a)
    values = sort_eigenvalues(np.diag(t))
    vecs = None
    if vectors:
        w, v = np.linalg.eig(a)
        order = np.lexsort((-w.imag, -w.real))
        v = v[:, order]
        if np.linalg.cond(v) <= EIGVEC_MAX_COND:
            vecs = v
    return EigenDecomposition(values=values, schur_q=q, schur_t=t, vectors=vecs)


def eigvals(a) -> np.ndarray:
    return eig(a).values


class Norms(NamedTuple):
    norm2: float
    frobenius: float
    spectral_radius: float


def norm2(a) -> float:
    """Operator 2-norm (largest singular value)."""
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return float(abs(a))
    return float(np.linalg.norm(a, 2))


def norms(a) -> Norms:
    a = as_cmatrix(a)
    return Norms(norm2(a), float(np.linalg.norm(a, "fro")), float(np.max(np.abs(eigvals(a)))))


def cond2(a) -> float:
    s = np.linalg.svd(as_cmatrix(a), compute_uv=False)
    return float(s[0] / s[-1]) if s[-1] > 0 else np.inf


def rel_diff(x, y) -> float:
    """``||x - y||_2 / max(||y||_2, tiny)``."""
    den = norm2(y)
    return norm2(np.asarray(x) - np.asarray(y)) / (den if den > 0 else 1.0)


# -- JSON --------------------------------------------------------------------

def to_json_dict(a) -> dict:
    a = as_cmatrix(a)
    return {"n": a.shape[0], "re": a.real.tolist(), "im": a.imag.tolist()}


def from_json_dict(doc: dict) -> np.ndarray:
    try:
        n = int(doc["n"])
        re, im = doc["re"], doc.get("im")
    except (KeyError, TypeError, ValueError) as exc:
        raise BadMatrix(f"malformed matrix document: {exc}") from exc
    if im is None:
        im = [[0.0] * n for _ in range(n)]
    for name, rows in (("re", re), ("im", im)):
        if not isinstance(rows, list) or len(rows) != n:
            raise BadMatrix(f"'{name}' must have {n} rows")
        for row in rows:
            if not isinstance(row, list) or len(row) != n:
                raise BadMatrix(f"ragged '{name}' array (expected {n} columns)")
    return as_cmatrix(np.array(re, dtype=float) + 1j * np.array(im, dtype=float))


def load_matrix(path) -> np.ndarray:
    with open(path) as fh:
        return from_json_dict(json.load(fh))


def save_matrix(a, path) -> None:
    with open(path, "w") as fh:
        json.dump(to_json_dict(a), fh)
