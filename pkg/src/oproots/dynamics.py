"""Scalar dynamics behind the matrix iterations, and convergence-region rasters.

The scalar families are

* ``BinomialQ``: ``q_{n+1} = (z + q_n^2)/2``, ``q_0 = 0``, limit ``1 - (1 - z)^{1/2}``;
* ``NewtonSqrtF``: ``q_{n+1} = (q_n + z/q_n)/2``, ``q_0 = 1``, limit ``z^{1/2}``;
* ``NewtonPthQ``: ``q_{n+1} = q_n((p - 1) + z q_n^{-p})/p``, ``q_0 = 1``, limit ``z^{1/p}``;
* ``HalleyQ``: ``q_{n+1} = q_n((p-1)q_n^p + (p+1)z)/((p+1)q_n^p + (p-1)z)``, ``q_0 = 1``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import minimize_scalar

FAMILIES = ("BinomialQ", "NewtonSqrtF", "NewtonPthQ", "HalleyQ")
CONVERGED, UNDECIDED, DIVERGED = 255, 128, 0
MAX_RESOLUTION = 4096
SCALAR_MAX_ITER = 1000


# -- the sup of the Newton error profile ----------------------------------------

def _log_kappa_power(t: np.ndarray, n: int) -> np.ndarray:
    # log(kappa(t)^{2^n}) for t in (0, 1]; kappa^{2^n} = ((1 - t)/(1 + t))^{2^n} >= 0
    return (2.0 ** n) * (np.log1p(-t) - np.log1p(t))


def h_profile(t, n: int) -> np.ndarray:
    """``t kappa(t)^{2^n} / (1 - kappa(t)^{2^n})`` with ``kappa(t) = (t - 1)/(t + 1)``, evaluated stably."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore"):
        log_k = _log_kappa_power(t, n)
    return t * np.exp(log_k) / -np.expm1(log_k)


def scalar_supremum(n: int, n_grid: int = 1_000_000, t_min: float = 1e-15) -> tuple:
    """Numerical supremum of :func:`h_profile` on ``(0, 1]``.

    Dense log-spaced grid plus golden-section refinement around the grid maximum.
    Returns ``(sup, info)`` where ``info`` records the maximizing ``t``, whether it
    is the smallest grid point, and whether the profile is nonincreasing on the grid.
    """
    if not 1 <= n <= 20:
        raise ValueError("n must lie in 1..20")
    t = np.logspace(math.log10(t_min), 0.0, n_grid)
    h = h_profile(t, n)
    k = int(np.argmax(h))
    lo, hi = t[max(k - 1, 0)], t[min(k + 1, n_grid - 1)]
    res = minimize_scalar(lambda s: -float(h_profile(s, n)), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-18})
    sup = max(float(h[k]), -float(res.fun))
    rel_tol = 1e-12 * np.abs(h[:-1])
    info = {"argmax_t": float(t[k]), "at_smallest_t": bool(h[0] >= h[k] * (1 - 1e-12)),
            "nonincreasing": bool(np.all(np.diff(h) <= rel_tol)), "target": 2.0 ** -(n + 1)}
    return sup, info


# -- Newton square-root error functions -------------------------------------------

def scalar_error_function(z, n: int, which: str = "f"):
    """``f_n(z) = 2 z kappa^{2^n} / (1 - kappa^{2^n})`` or ``g_n``, ``kappa(z) = (z - 1)/(z + 1)``.

    ``g_n(z) = (2/(1+z)) (1 + kappa^{2^n})^{-1} prod_{k<n} (1 + kappa^{2^k})``. Powers of
    ``kappa`` go through ``exp(2^k log kappa)``, so large ``n`` cannot overflow. At
    ``z = 0`` the limits ``f_n(0) = 2^{-n}`` and ``g_n(0) = 2^n`` are returned.
    """
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape, dtype=complex)
    zero = z == 0
    out[zero] = 2.0 ** -n if which == "f" else 2.0 ** n
    one = z == 1
    out[one] = 0.0 if which == "f" else 1.0  # kappa(1) = 0
    rest = ~zero & ~one
    zz = z[rest]
    kappa = (zz - 1.0) / (zz + 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_k = np.log(kappa)
        if which == "f":
            big = (2.0 ** n) * log_k
            out[rest] = 2.0 * zz * np.exp(big) / -np.expm1(big)
        elif which == "g":
            acc = np.zeros_like(zz)
            for k in range(n):
                acc += np.log1p(np.exp((2.0 ** k) * log_k))
            acc -= np.log1p(np.exp((2.0 ** n) * log_k))
            out[rest] = 2.0 / (1.0 + zz) * np.exp(acc)
        else:
            raise ValueError("which must be 'f' or 'g'")
    out[rest & ~np.isfinite(out)] = np.nan
    return complex(out) if out.ndim == 0 else out


def telescoping_identity(z, n: int) -> tuple:
    """Both sides of ``(1 - z) prod_{k<n} (1 + z^{2^k}) = 1 - z^{2^n}``."""
    z = complex(z)
    lhs = 1.0 - z
    for k in range(n):
        lhs *= 1.0 + z ** (2 ** k)
    return lhs, 1.0 - z ** (2 ** n)


def error_function_argmax(n: int, rho: float = math.pi / 4, radius: float = 1.0,
                          resolution: int = 400) -> dict:
    """Where ``|f_n|`` peaks on the closed sector ``{|z| <= radius, |arg z| <= rho}`` (polar grid)."""
    r = np.linspace(0.0, radius, resolution)
    phi = np.linspace(-rho, rho, resolution)
    z = (r[:, None] * np.exp(1j * phi[None, :])).ravel()
    vals = np.abs(scalar_error_function(z, n))
    k = int(np.nanargmax(vals))
    return {"n": n, "max": float(vals[k]), "argmax": [float(z[k].real), float(z[k].imag)],
            "value_at_0": 2.0 ** -n}


# -- scalar iterations ------------------------------------------------------------

def _expected(family: str, z: np.ndarray, p: int) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        if family == "BinomialQ":
            return 1.0 - np.sqrt(1.0 - z)
        root_p = 2 if family == "NewtonSqrtF" else p
        return np.where(z == 0, 0.0, np.exp(np.log(np.where(z == 0, 1.0, z)) / root_p))


def _step(family: str, q: np.ndarray, z: np.ndarray, p: int) -> np.ndarray:
    if family == "BinomialQ":
        return 0.5 * (z + q * q)
    if family == "NewtonSqrtF":
        return 0.5 * (q + z / q)
    qp = q ** p
    if family == "NewtonPthQ":
        return q * ((p - 1) + z / qp) / p
    return q * ((p - 1) * qp + (p + 1) * z) / ((p + 1) * qp + (p - 1) * z)


def classify_points(family: str, z, p: int = 2, max_iter: int = SCALAR_MAX_ITER,
                    step_tol: float = 1e-12, root_tol: float = 1e-8) -> np.ndarray:
    """Per-point verdicts: 255 converged to the expected root, 0 diverged or wrong root, 128 undecided.

    The binomial family escapes past ``max(4, |z| + 2)``; the root families are
    declared divergent when an iterate is zero, infinite or above ``1e12``.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    z = np.asarray(z, dtype=complex)
    shape = z.shape
    z = z.ravel()
    q = np.zeros_like(z) if family == "BinomialQ" else np.ones_like(z)
    verdict = np.full(z.shape, UNDECIDED, dtype=np.uint8)
    active = np.ones(z.shape, dtype=bool)
    escape = np.maximum(4.0, np.abs(z) + 2.0) if family == "BinomialQ" else np.full(z.shape, 1e12)
    expected = _expected(family, z, p)
    with np.errstate(all="ignore"):
        for _ in range(max_iter):
            idx = np.flatnonzero(active)
            if not len(idx):
                break
            qa, za = q[idx], z[idx]
            new = _step(family, qa, za, p)
            bad = ~np.isfinite(new) | (np.abs(new) > escape[idx]) | ((new == 0) & (family != "BinomialQ"))
            done = ~bad & (np.abs(new - qa) <= step_tol * np.maximum(1.0, np.abs(new)))
            q[idx] = new
            verdict[idx[bad]] = DIVERGED
            hit = idx[done]
            ok = np.abs(q[hit] - expected[hit]) <= root_tol * np.maximum(1.0, np.abs(expected[hit]))
            verdict[hit] = np.where(ok, CONVERGED, DIVERGED)
            active[idx[bad | done]] = False
    return verdict.reshape(shape)


def binomial_iterates_bound(z, n: int = 60) -> np.ndarray:
    """``max_{k <= n} |q_k(z)|`` for the binomial family."""
    z = np.asarray(z, dtype=complex)
    q = np.zeros_like(z)
    best = np.zeros(z.shape)
    for _ in range(n):
        q = 0.5 * (z + q * q)
        best = np.maximum(best, np.abs(q))
    return best


@dataclass(frozen=True)
class RegionRaster:
    """Verdict grid over a rectangle; row 0 is the top edge (largest imaginary part)."""

    family: str
    p: int
    window: tuple
    resolution: int
    max_iter: int
    grid: np.ndarray

    def pixel_centers(self) -> np.ndarray:
        re0, re1, im0, im1 = self.window
        n = self.resolution
        xs = re0 + (np.arange(n) + 0.5) * (re1 - re0) / n
        ys = im1 - (np.arange(n) + 0.5) * (im1 - im0) / n
        return xs[None, :] + 1j * ys[:, None]

    def sidecar(self) -> dict:
        return {"family": self.family, "p": self.p, "window": list(self.window),
                "resolution": self.resolution, "max_iter": self.max_iter,
                "codes": {"converged": CONVERGED, "undecided": UNDECIDED, "diverged": DIVERGED},
                "counts": {str(v): int(np.sum(self.grid == v)) for v in (CONVERGED, UNDECIDED, DIVERGED)}}

    def write(self, path) -> tuple:
        """Write ``path`` (binary PGM) and ``path`` with suffix ``.json``; returns both paths."""
        path = Path(path)
        n = self.resolution
        with open(path, "wb") as fh:
            fh.write(f"P5\n{n} {n}\n255\n".encode("ascii"))
            fh.write(np.ascontiguousarray(self.grid, dtype=np.uint8).tobytes())
        side = path.with_suffix(".json")
        side.write_text(json.dumps(self.sidecar(), indent=2, sort_keys=True))
        return path, side


def rasterize_convergence_region(family: str, window=(-1.0, 3.0, -2.0, 2.0), resolution: int = 256,
                                 max_iter: int = SCALAR_MAX_ITER, p: int = 2) -> RegionRaster:
    """Classify every pixel center of ``window = (re_min, re_max, im_min, im_max)``."""
    if not 1 <= resolution <= MAX_RESOLUTION:
        raise ValueError(f"resolution must lie in 1..{MAX_RESOLUTION}")
    raster = RegionRaster(family, p, tuple(float(v) for v in window), resolution, max_iter,
                          np.zeros((resolution, resolution), dtype=np.uint8))
    grid = classify_points(family, raster.pixel_centers(), p=p, max_iter=max_iter)
    return RegionRaster(family, p, raster.window, resolution, max_iter, grid)


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P5":
        raise ValueError("not a binary PGM file")
    w, h = (int(v) for v in parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(h, w)


def sample_cardioid(rng: np.random.Generator, n: int, radius: float = 0.95) -> np.ndarray:
    """Points ``2w - w^2`` for ``w`` uniform in the disk of the given radius."""
    w = radius * np.sqrt(rng.uniform(size=n)) * np.exp(2j * np.pi * rng.uniform(size=n))
    return 2 * w - w * w


def sample_disk(rng: np.random.Generator, n: int, radius: float = 1.0, center: complex = 0.0) -> np.ndarray:
    return center + radius * np.sqrt(rng.uniform(size=n)) * np.exp(2j * np.pi * rng.uniform(size=n))
