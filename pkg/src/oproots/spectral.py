"""Numerical range (field of values), operator classification and scalar regions.

The numerical range ``W(a)`` is approximated from the inside by a support-function
sweep: for each angle the top eigenvector of the Hermitian part of ``e^{-i theta} a``
gives an exact boundary point of ``W(a)``; their convex hull is returned.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .matrix_core import as_cmatrix, eye_like, hermitian_part, inverse, norm2

DEFAULT_ANGLES = 256
STRICT_MARGIN = 1e-9
ACCRETIVE_TOL = 1e-10
TYPE_M_DECADES = (-6, 6)
TYPE_M_PER_DECADE = 25


# -- convex hull ---------------------------------------------------------------

def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> np.ndarray:
    """Counter-clockwise hull vertices of complex ``points`` (Andrew's monotone chain).

    Degenerate inputs give a segment (2 vertices) or a single point.
    """
    pts = sorted(set((float(z.real), float(z.imag)) for z in np.ravel(points)))
    if len(pts) <= 2:
        return np.array([complex(*p) for p in pts])
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    return np.array([complex(*p) for p in hull])


def _segment_distance(z, p, q):
    d = q - p
    den = abs(d) ** 2
    if den == 0.0:
        return abs(z - p)
    s = min(1.0, max(0.0, ((z - p) * d.conjugate()).real / den))
    return abs(z - (p + s * d))


def polygon_distance(z: complex, hull: np.ndarray) -> float:
    """Distance from ``z`` to the convex polygon ``hull`` (0 inside)."""
    m = len(hull)
    if m == 1:
        return abs(z - hull[0])
    if m >= 3:
        inside = all(
            _cross((hull[k].real, hull[k].imag), (hull[(k + 1) % m].real, hull[(k + 1) % m].imag), (z.real, z.imag)) >= 0
            for k in range(m)
        )
        if inside:
            return 0.0
    return min(_segment_distance(z, hull[k], hull[(k + 1) % m]) for k in range(m if m >= 3 else 1))


def is_convex_polygon(hull: np.ndarray, tol: float = 1e-12) -> bool:
    m = len(hull)
    if m < 3:
        return True
    return all(
        _cross((hull[k].real, hull[k].imag), (hull[(k + 1) % m].real, hull[(k + 1) % m].imag),
               (hull[(k + 2) % m].real, hull[(k + 2) % m].imag)) >= -tol
        for k in range(m)
    )


# -- numerical range -----------------------------------------------------------

@dataclass(frozen=True)
class NumericalRange:
    thetas: np.ndarray
    support: np.ndarray
    boundary: np.ndarray
    hull: np.ndarray
    min_real: float
    zero_margin: float

    @property
    def contains_zero(self) -> bool:
        """True when 0 is in W(a) up to ``ACCRETIVE_TOL`` (sampled support values)."""
        return self.zero_margin >= -ACCRETIVE_TOL * max(1.0, self.scale)

    @property
    def scale(self) -> float:
        return float(np.max(np.abs(self.hull))) if len(self.hull) else 0.0

    def distance(self, z: complex) -> float:
        return polygon_distance(complex(z), self.hull)

    def contains(self, z: complex, inflate: float = 1e-6) -> bool:
        return self.distance(z) <= inflate

    def edge_points(self, per_edge: int = 32) -> np.ndarray:
        """Hull vertices plus ``per_edge`` evenly spaced points on every edge."""
        h = self.hull
        if len(h) == 1:
            return h.copy()
        s = np.linspace(0.0, 1.0, per_edge, endpoint=False)
        nxt = np.roll(h, -1)
        return (h[:, None] + s[None, :] * (nxt - h)[:, None]).ravel()

    def real_axis_interval(self) -> Optional[tuple[float, float]]:
        """Intersection of the hull with the real axis, or ``None`` if empty."""
        xs = [z.real for z in self.hull if abs(z.imag) <= 1e-14 * max(1.0, self.scale)]
        h = self.hull
        m = len(h)
        for k in range(m):
            p, q = h[k], h[(k + 1) % m]
            if (p.imag < 0 < q.imag) or (q.imag < 0 < p.imag):
                s = p.imag / (p.imag - q.imag)
                xs.append(p.real + s * (q.real - p.real))
        if not xs:
            return None
        return min(xs), max(xs)

    def has_negative_real_point(self, tol: float = 1e-12) -> bool:
        iv = self.real_axis_interval()
        return iv is not None and iv[0] < -tol * max(1.0, self.scale)

    def arguments(self) -> np.ndarray:
        tiny = 1e-12 * max(1.0, self.scale)
        pts = self.hull[np.abs(self.hull) > tiny]
        return np.angle(pts)


def numerical_range(a, n_angles: int = DEFAULT_ANGLES) -> NumericalRange:
    """Support-function sweep of the field of values at ``n_angles`` equally spaced angles."""
    if n_angles < 8:
        raise ValueError("n_angles must be at least 8")
    a = as_cmatrix(a)
    thetas = 2.0 * np.pi * np.arange(n_angles) / n_angles
    rot = np.exp(-1j * thetas)[:, None, None] * a[None, :, :]
    herm = 0.5 * (rot + np.conj(np.transpose(rot, (0, 2, 1))))
    w, v = np.linalg.eigh(herm)
    top = v[:, :, -1]
    support = w[:, -1]
    boundary = np.einsum("ki,ij,kj->k", top.conj(), a, top)
    hull = convex_hull(boundary)
    min_real = float(np.linalg.eigvalsh(hermitian_part(a))[0])
    return NumericalRange(thetas=thetas, support=support, boundary=boundary, hull=hull,
                          min_real=min_real, zero_margin=float(np.min(support)))


def _imag_part_extremes(a: np.ndarray, phi: float) -> tuple[float, float]:
    """``(min, max)`` of ``Im(e^{-i phi} z)`` over W(a)."""
    r = np.exp(-1j * phi) * a
    w = np.linalg.eigvalsh((r - r.conj().T) / 2j)
    return float(w[0]), float(w[-1])


def _extreme_argument(a, start, direction, tol):
    # bisection for the ray angle beyond which W(a) lies entirely on one side
    def outside(phi):
        lo_im, hi_im = _imag_part_extremes(a, phi)
        return hi_im <= tol if direction > 0 else lo_im >= -tol

    lo, hi = start - 0.05 * direction, start + 0.05 * direction
    if outside(lo) or not outside(hi):
        return start
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if outside(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def argument_interval(a, n_angles: int = DEFAULT_ANGLES) -> Optional[tuple[float, float]]:
    """Arguments ``[alpha, beta]`` spanned by W(a), refined beyond the sampled hull.

    ``None`` when 0 is interior to W(a) or W(a) meets the negative real axis.
    The hull estimate is refined by bisection on the support function of the
    rotated Hermitian parts, so the result is not limited by angular sampling.
    """
    a = as_cmatrix(a)
    nr = numerical_range(a, n_angles)
    scale = max(1.0, nr.scale)
    if nr.zero_margin > ACCRETIVE_TOL * scale or nr.has_negative_real_point():
        return None
    args = nr.arguments()
    if not len(args):
        return (0.0, 0.0)
    tol = 1e-14 * scale
    beta = _extreme_argument(a, float(np.max(args)), +1, tol)
    alpha = _extreme_argument(a, float(np.min(args)), -1, tol)
    if alpha > beta:  # a point or a segment through 0; bisections may cross by rounding
        alpha = beta = 0.5 * (alpha + beta)
    return alpha, beta


# -- classification ------------------------------------------------------------

def type_m_constant(a) -> float:
    """Estimate ``sup_t t ||(t + a)^{-1}||`` on a log grid; ``inf`` when unbounded.

    Heuristic: "unbounded" is reported when the grid max sits at the small-t end
    and is still growing there, or when ``t + a`` is singular at a grid point.
    Large t needs no check: the bound is at most 2 once ``t > 2||a||``.
    """
    a = as_cmatrix(a)
    lo, hi = TYPE_M_DECADES
    ts = np.logspace(lo, hi, (hi - lo) * TYPE_M_PER_DECADE + 1)
    eye = eye_like(a)
    vals = np.empty(len(ts))
    for k, t in enumerate(ts):
        m = t * eye + a
        s = np.linalg.svd(m, compute_uv=False)
        if s[-1] < 1e-12 * np.linalg.norm(m, "fro"):
            return math.inf
        vals[k] = t / s[-1]
    first_decade = vals[TYPE_M_PER_DECADE]
    if np.argmax(vals) == 0 and vals[0] > first_decade * (1.0 + 1e-3):
        return math.inf
    return float(np.max(vals))


def in_cone(a, tol: float = 1e-12) -> bool:
    """Whether ``||1 - t a|| <= 1`` for some ``t > 0``.

    Expanding the square, this asks for ``Re a >= (t/2) a* a``, which for invertible
    ``a`` is ``Re(a^{-1}) > 0``. An accretive ``a`` has ``ker a = ker a*``, so it is
    first compressed to the orthogonal complement of its kernel.
    """
    a = as_cmatrix(a)
    scale = max(1.0, norm2(a))
    if np.linalg.eigvalsh(hermitian_part(a))[0] < -ACCRETIVE_TOL * scale:
        return False
    _, s, vh = np.linalg.svd(a)
    rank = int(np.sum(s > 1e-12 * scale))
    if rank == 0:
        return True
    q = vh[:rank].conj().T
    b = q.conj().T @ a @ q
    if np.linalg.svd(b, compute_uv=False)[-1] <= 1e-12 * scale:
        return False  # kernel is not reducing, so a is not accretive after all
    binv = inverse(b)
    return bool(np.linalg.eigvalsh(hermitian_part(binv))[0] > tol * max(1.0, norm2(binv)))


@dataclass(frozen=True)
class SectorReport:
    accretive: bool
    strictly_accretive: bool
    margin: float
    sector_angle: Optional[float]
    argument_interval: Optional[tuple[float, float]]
    type_m_constant: float
    in_FA: bool
    in_cone_CA: bool
    numerical_range: NumericalRange = field(repr=False, compare=False)


def classify(a, n_angles: int = DEFAULT_ANGLES) -> SectorReport:
    a = as_cmatrix(a)
    nr = numerical_range(a, n_angles)
    scale = max(1.0, norm2(a))
    m = nr.min_real
    accretive = m >= -ACCRETIVE_TOL * scale
    strictly = m > STRICT_MARGIN
    interval = argument_interval(a, n_angles)
    sector = None if interval is None else float(max(abs(interval[0]), abs(interval[1])))
    in_fa = norm2(eye_like(a) - a) <= 1.0 + 1e-12
    return SectorReport(
        accretive=accretive,
        strictly_accretive=strictly,
        margin=m,
        sector_angle=sector,
        argument_interval=interval,
        type_m_constant=type_m_constant(a),
        in_FA=in_fa,
        in_cone_CA=in_fa or in_cone(a),
        numerical_range=nr,
    )


def state_norm_check(a, t: float) -> tuple[float, float, bool]:
    """Check that ``||1 - t a|| <= 1`` (t > 1) and ``0 not in W(a)`` force ``||1 - a|| < 1``.

    Returns ``(||1 - t a||, ||1 - a||, verdict)``; the verdict is vacuously true when
    the premise fails.
    """
    if t <= 1:
        raise ValueError("t must exceed 1")
    a = as_cmatrix(a)
    eye = eye_like(a)
    lhs = norm2(eye - t * a)
    rhs = norm2(eye - a)
    premise = lhs <= 1.0 and not numerical_range(a).contains_zero
    return lhs, rhs, (not premise) or rhs < 1.0


# -- scalar regions ------------------------------------------------------------

REGION_KINDS = ("halfplane", "sector", "cardioid", "unitdisk", "newtonD", "diskunion")


@dataclass(frozen=True)
class RegionSpec:
    """A scalar convergence region.

    kinds: ``halfplane`` (open, Re z > 0), ``sector`` (closed S_theta), ``cardioid``
    (open, {2w - w^2 : |w| < 1}), ``unitdisk`` (closed), ``newtonD`` (the Newton p-th
    root set with parameter ``epsilon``), ``diskunion`` (closed disks
    ``(re, im, radius)``).
    """

    kind: str
    theta: Optional[float] = None
    epsilon: float = 0.0
    disks: tuple = ()

    def __post_init__(self):
        if self.kind not in REGION_KINDS:
            raise ValueError(f"unknown region kind {self.kind!r}")
        if self.kind == "sector" and self.theta is None:
            raise ValueError("sector region needs theta")

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        if self.kind == "halfplane":
            return z.real > 0
        if self.kind == "sector":
            return (z == 0) | (np.abs(np.angle(z)) <= self.theta)
        if self.kind == "unitdisk":
            return np.abs(z) <= 1.0
        if self.kind == "cardioid":
            return np.abs(1.0 - np.sqrt(1.0 - z)) < 1.0
        if self.kind == "newtonD":
            return (z.real > 0) & ((np.abs(z) <= 1.0 + self.epsilon) | (np.abs(z - 1.0) <= 1.0))
        out = np.zeros(z.shape, dtype=bool)
        for re, im, r in self.disks:
            out |= np.abs(z - complex(re, im)) <= r
        return out

    def to_json(self) -> dict:
        doc: dict = {"kind": self.kind}
        if self.theta is not None:
            doc["theta"] = self.theta
        if self.kind == "newtonD":
            doc["epsilon"] = self.epsilon
        if self.disks:
            doc["disks"] = [list(d) for d in self.disks]
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "RegionSpec":
        return cls(kind=doc["kind"], theta=doc.get("theta"), epsilon=float(doc.get("epsilon") or 0.0),
                   disks=tuple(tuple(d) for d in doc.get("disks", ())))


HALFPLANE = RegionSpec("halfplane")
UNIT_DISK = RegionSpec("unitdisk")
CARDIOID = RegionSpec("cardioid")
CARDIOID_OR_DISK = (CARDIOID, UNIT_DISK)

Region = Union[RegionSpec, Sequence[RegionSpec]]


def in_region(z, region: Region):
    """Membership of ``z`` (scalar or array) in a region or a union of regions."""
    if isinstance(region, RegionSpec):
        out = region.contains(z)
    else:
        out = np.zeros(np.shape(z), dtype=bool)
        for r in region:
            out = out | r.contains(z)
    return bool(out) if np.ndim(out) == 0 else out


def range_in_region(a, region: Region, n_angles: int = DEFAULT_ANGLES) -> bool:
    """Conservative check that the hull of W(a) lies in ``region``.

    Hull vertices and points along every hull edge are tested, so non-convex
    regions (cardioid, unions) are handled too.
    """
    if n_angles < 64:
        raise ValueError("n_angles must be at least 64")
    nr = a if isinstance(a, NumericalRange) else numerical_range(a, n_angles)
    return bool(np.all(in_region(nr.edge_points(), region)))


def crouzeix_ratio(a, coeffs, n_angles: int = DEFAULT_ANGLES, per_edge: int = 16) -> float:
    """``||f(a)||_2 / max |f|`` over boundary samples of W(a), ``f`` given by ``coeffs`` (lowest first).

    The samples lie on W(a), so the maximum is underestimated and the ratio errs high.
    """
    a = as_cmatrix(a)
    fa = np.zeros_like(a)
    for c in reversed(coeffs):  # Horner
        fa = fa @ a + c * eye_like(a)
    z = numerical_range(a, n_angles).edge_points(per_edge)
    sup = float(np.max(np.abs(np.polyval(list(reversed(coeffs)), z))))
    return norm2(fa) / sup if sup > 0 else (0.0 if norm2(fa) == 0 else np.inf)
