"""Deterministic random matrices with prescribed spectral and numerical-range properties."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional, Union

import numpy as np

from .errors import GenerationExhausted
from .matrix_core import MAX_DIM, cond2, inverse, norm2
from .mean import AGH_PAIR, NEGATIVE_INNER_B, NONUNIQUE_PAIR
from .spectral import argument_interval, numerical_range

KINDS = ("DiagonalPlusSimilarity", "RandomAccretive", "ContractionBall", "JordanBlock", "FixedInstance")
MAX_DRAWS = 100
MAX_COND = 20.0

E12 = np.array([[0, 1], [0, 0]], dtype=complex)

# instances for the semisimple-at-zero dichotomy of Newton's square root
JORDAN_SEMISIMPLE = ("diag-0-4", "diag-0-0-2", "zero-plus-jordan-1")
JORDAN_DEFECTIVE = ("e12", "e12-plus-3", "jordan-0-3")


def _fixed() -> dict:
    j1 = np.array([[1, 1], [0, 1]], dtype=complex)
    j03 = np.diag(np.ones(2), 1).astype(complex)
    e12_3 = np.zeros((3, 3), dtype=complex)
    e12_3[:2, :2] = E12
    e12_3[2, 2] = 3
    z_j1 = np.zeros((3, 3), dtype=complex)
    z_j1[1:, 1:] = j1
    return {
        "e12": E12.copy(),
        "scalar-4": np.array([[4.0 + 0j]]),
        "agh-pair": tuple(m.astype(complex) for m in AGH_PAIR),
        "nonunique-pair": tuple(m.astype(complex) for m in NONUNIQUE_PAIR),
        "negative-inner-pair": (inverse(NEGATIVE_INNER_B), NEGATIVE_INNER_B.copy()),
        "scalar-cut-pair": (np.array([[-1j]]), np.array([[1j]])),
        "diag-0-4": np.diag([0, 4]).astype(complex),
        "diag-0-0-2": np.diag([0, 0, 2]).astype(complex),
        "zero-plus-jordan-1": z_j1,
        "e12-plus-3": e12_3,
        "jordan-0-3": j03,
    }


FIXED_NAMES = tuple(sorted(_fixed()))


@dataclass(frozen=True)
class GeneratorSpec:
    """What to draw.

    ``theta``/``margin`` apply to ``RandomAccretive`` (eigen-arguments uniform in
    ``[-theta + margin, theta - margin]``, then ``W`` verified inside ``S_theta``);
    ``min_real`` additionally demands ``Re W >= min_real`` there.
    ``singular`` zero eigenvalues are placed in a reducing subspace, so the result
    stays accretive. ``gap`` is the minimal distance of eigenvalues from the
    imaginary axis for ``DiagonalPlusSimilarity``, whose eigenvalues fall on the side
    ``half`` (``"right"``, ``"left"`` or ``"both"``). ``radius`` bounds
    ``||I - a||`` for ``ContractionBall``.
    """

    kind: str
    n: int = 4
    seed: int = 0
    theta: float = math.pi / 2
    margin: float = 0.05
    min_real: float = 0.0
    singular: int = 0
    gap: float = 0.05
    half: str = "both"
    radius: float = 0.9
    lam: complex = 0.0
    name: Optional[str] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if not 1 <= self.n <= MAX_DIM:
            raise ValueError(f"n must be in [1, {MAX_DIM}]")
        if self.kind == "FixedInstance" and self.name not in FIXED_NAMES:
            raise ValueError(f"unknown fixed instance {self.name!r}; known: {', '.join(FIXED_NAMES)}")
        if self.half not in ("right", "left", "both"):
            raise ValueError("half must be right, left or both")
        if not 0 <= self.singular < self.n and self.kind == "RandomAccretive":
            raise ValueError("singular must be below n")

    def to_json(self) -> dict:
        doc = asdict(self)
        doc["lam"] = [float(complex(self.lam).real), float(complex(self.lam).imag)]
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "GeneratorSpec":
        doc = dict(doc)
        if isinstance(doc.get("lam"), (list, tuple)):
            doc["lam"] = complex(*doc["lam"])
        return cls(**doc)


def _cgauss(rng, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _unitary(rng, n) -> np.ndarray:
    q, r = np.linalg.qr(_cgauss(rng, (n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _similarity(rng, n, max_cond=MAX_COND) -> np.ndarray:
    """``U diag(s) W`` with singular values in ``[1, kappa]``, ``kappa`` log-uniform up to ``max_cond``."""
    kappa = math.exp(rng.uniform(0, math.log(max_cond)))
    s = np.exp(rng.uniform(0, math.log(kappa), n))
    s[0], s[-1] = 1.0, kappa
    return _unitary(rng, n) @ np.diag(s) @ _unitary(rng, n)


def _conjugate(v, d) -> np.ndarray:
    return v @ np.diag(d) @ inverse(v)


def _min_real(a) -> float:
    return float(np.linalg.eigvalsh(0.5 * (a + a.conj().T))[0])


def _in_sector(a, theta) -> bool:
    if theta >= math.pi / 2 - 1e-12:
        return _min_real(a) >= -1e-12 * max(1.0, norm2(a))
    iv = argument_interval(a)
    return iv is not None and max(abs(iv[0]), abs(iv[1])) <= theta


def _random_accretive(spec, rng):
    m = spec.n - spec.singular
    lo, hi = -spec.theta + spec.margin, spec.theta - spec.margin
    if lo > hi:
        raise ValueError("margin exceeds theta")
    for _ in range(MAX_DRAWS):
        d = rng.uniform(0.5, 2.0, m) * np.exp(1j * rng.uniform(lo, hi, m))
        v = _similarity(rng, m)
        b = _conjugate(v, d)
        if not (_in_sector(b, spec.theta) and _min_real(b) >= spec.min_real):
            continue
        if spec.singular == 0:
            return b
        u = _unitary(rng, spec.n)
        full = np.zeros((spec.n, spec.n), dtype=complex)
        full[spec.singular:, spec.singular:] = b
        return u @ full @ u.conj().T
    raise GenerationExhausted(f"no accretive draw in S_{spec.theta:.4g} after {MAX_DRAWS} tries")


def _diagonal_similarity(spec, rng):
    n = spec.n
    for _ in range(MAX_DRAWS):
        re = rng.uniform(spec.gap, 2.0, n)
        if spec.half == "left":
            re = -re
        elif spec.half == "both":
            re = re * rng.choice([-1.0, 1.0], n)
        d = re + 1j * rng.uniform(-2.0, 2.0, n)
        v = _similarity(rng, n)
        if cond2(v) <= MAX_COND * (1 + 1e-9):
            a = _conjugate(v, d)
            if np.min(np.abs(np.linalg.eigvals(a).real)) >= 0.5 * spec.gap:
                return a
    raise GenerationExhausted(f"no well-separated draw after {MAX_DRAWS} tries")


def _contraction(spec, rng):
    for _ in range(MAX_DRAWS):
        g = _cgauss(rng, (spec.n, spec.n))
        u = g / norm2(g) * rng.uniform(0.5, 1.0)
        a = np.eye(spec.n) - spec.radius * u
        if norm2(np.eye(spec.n) - a) <= spec.radius * (1 + 1e-12):
            return a
    raise GenerationExhausted("no contraction draw")


def _jordan(spec):
    return complex(spec.lam) * np.eye(spec.n, dtype=complex) + np.diag(np.ones(spec.n - 1), 1)


def generate(spec: GeneratorSpec) -> Union[np.ndarray, tuple]:
    """Draw the matrix described by ``spec``; pairs are returned for the ``*-pair`` instances.

    Deterministic in ``(spec, spec.seed)``.

    Raises
    ------
    GenerationExhausted
        No draw passed verification in 100 tries.
    """
    rng = np.random.default_rng(spec.seed)
    if spec.kind == "RandomAccretive":
        return _random_accretive(spec, rng)
    if spec.kind == "DiagonalPlusSimilarity":
        return _diagonal_similarity(spec, rng)
    if spec.kind == "ContractionBall":
        return _contraction(spec, rng)
    if spec.kind == "JordanBlock":
        return _jordan(spec)
    return _fixed()[spec.name]


def fixed_instance(name: str):
    return generate(GeneratorSpec("FixedInstance", name=name))


def random_pair(spec: GeneratorSpec) -> tuple:
    """Two independent draws from ``spec`` (the second with ``seed + 1`` mixed in)."""
    first = generate(spec)
    seq = np.random.SeedSequence([spec.seed, 1])
    second = generate(GeneratorSpec(**{**asdict(spec), "seed": int(seq.generate_state(1, np.uint64)[0])}))
    return first, second


def has_negative_real_point(a) -> bool:
    return numerical_range(a).has_negative_real_point()
