import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oproots.errors import BadMatrix, DimensionMismatch, Singular
from oproots.matrix_core import (as_cmatrix, cond2, eig, from_json_dict, inverse, load_matrix, multiply, norm2,
                                 norms, rel_diff, save_matrix, solve, to_json_dict)

from conftest import cgauss, random_unitary

E12 = np.array([[0, 1], [0, 0]], dtype=complex)


def test_multiply_examples():
    a = np.arange(4.0).reshape(2, 2)
    assert np.allclose(multiply(np.eye(2), a), a)
    assert np.allclose(multiply(np.diag([2, 3]), np.diag([5, 7])), np.diag([10, 21]))
    assert np.allclose(multiply(E12, E12), 0)
    with pytest.raises(DimensionMismatch):
        multiply(np.eye(2), np.eye(3))


def test_as_cmatrix_rejects_bad_input():
    with pytest.raises(BadMatrix):
        as_cmatrix(np.ones((2, 3)))
    with pytest.raises(BadMatrix):
        as_cmatrix([[np.nan, 0], [0, 1]])
    assert as_cmatrix(3.0).shape == (1, 1)


def test_inverse_examples(rng):
    assert np.allclose(inverse(np.diag([2, 4])), np.diag([0.5, 0.25]))
    a = cgauss(rng, 5)
    assert rel_diff(inverse(inverse(a)), a) < 1e-10
    b = np.array([[1, 1], [-2, 1 / 3]])
    # cofactor formula: [[d, -b], [-c, a]] / det
    det = 1 / 3 + 2
    cof = np.array([[1 / 3, -1], [2, 1]]) / det
    assert np.allclose(inverse(b), cof, atol=1e-14)
    assert norm2(b @ inverse(b) - np.eye(2)) < 1e-14


def test_inverse_singular():
    with pytest.raises(Singular):
        inverse(E12)
    with pytest.raises(Singular):
        solve(np.zeros((2, 2)), np.ones(2))


def test_eig_examples(rng):
    assert np.allclose(eig(np.diag([1 + 1j, 2])).values, [2, 1 + 1j])
    d = eig(E12, vectors=True)
    assert np.allclose(d.values, 0)
    assert d.vectors is None  # defective
    v = random_unitary(rng, 2)
    assert np.allclose(eig(v @ np.diag([4, 9]) @ v.conj().T).values, [9, 4])


def test_eig_schur_invariants(rng):
    a = cgauss(rng, 7)
    d = eig(a)
    q, t = d.schur_q, d.schur_t
    assert np.linalg.norm(q.conj().T @ q - np.eye(7)) <= 1e-10 * 7
    assert np.linalg.norm(q @ t @ q.conj().T - a) <= 1e-9 * np.linalg.norm(a)
    assert np.allclose(np.sort_complex(np.diag(t)), np.sort_complex(d.values))


def test_eig_order_is_deterministic():
    vals = eig(np.diag([1j, 2, -1, 1 - 1j, 1 + 1j])).values
    assert np.allclose(vals, [2, 1 + 1j, 1 - 1j, 1j, -1])


def test_norms_examples():
    n = norms(np.diag([3, -4j]))
    assert n.norm2 == pytest.approx(4) and n.spectral_radius == pytest.approx(4)
    n = norms(E12)
    assert n.norm2 == pytest.approx(1) and n.spectral_radius == pytest.approx(0)


@given(st.integers(0, 2**32 - 1), st.integers(1, 8))
def test_norm_dominates_spectral_radius(seed, n):
    a = cgauss(np.random.default_rng(seed), n)
    r = norms(a)
    assert r.norm2 >= r.spectral_radius * (1 - 1e-12)
    assert r.frobenius >= r.norm2 * (1 - 1e-12)


@given(st.integers(0, 2**32 - 1), st.integers(1, 8))
def test_submultiplicative(seed, n):
    rng = np.random.default_rng(seed)
    a, b = cgauss(rng, n), cgauss(rng, n)
    assert norm2(a @ b) <= norm2(a) * norm2(b) + 1e-10


@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_eig_similarity_robust(seed, n):
    rng = np.random.default_rng(seed)
    a = cgauss(rng, n)
    s = np.exp(rng.uniform(0, np.log(100), n))
    v = random_unitary(rng, n) @ np.diag(s) @ random_unitary(rng, n)
    assert cond2(v) <= 100 * (1 + 1e-9)
    e1 = np.sort_complex(eig(a).values)
    e2 = np.sort_complex(eig(v @ a @ np.linalg.inv(v)).values)
    # match as multisets
    used = set()
    for z in e1:
        k = min((i for i in range(n) if i not in used), key=lambda i: abs(e2[i] - z))
        used.add(k)
        assert abs(e2[k] - z) <= 1e-6 * max(1, abs(z))


@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_inverse_involution(seed, n):
    rng = np.random.default_rng(seed)
    u, w = random_unitary(rng, n), random_unitary(rng, n)
    a = u @ np.diag(np.exp(rng.uniform(0, np.log(1e6), n))) @ w
    assert rel_diff(inverse(inverse(a)), a) <= 1e-8


def test_json_roundtrip(tmp_path, rng):
    a = cgauss(rng, 3)
    path = tmp_path / "m.json"
    save_matrix(a, path)
    assert np.array_equal(load_matrix(path), a)
    doc = json.loads(path.read_text())
    assert set(doc) == {"n", "re", "im"}
    assert np.array_equal(from_json_dict({"n": 1, "re": [[2.0]]}), [[2.0]])


@pytest.mark.parametrize("doc", [
    {"n": 2, "re": [[1, 2], [3]], "im": [[0, 0], [0, 0]]},
    {"n": 2, "re": [[1, 2]], "im": [[0, 0]]},
    {"re": [[1]]},
    {"n": 1, "re": "x"},
])
def test_json_rejects_malformed(doc):
    with pytest.raises(BadMatrix):
        from_json_dict(doc)


def test_to_json_dict_layout():
    assert to_json_dict(np.array([[1 + 2j]])) == {"n": 1, "re": [[1.0]], "im": [[2.0]]}
