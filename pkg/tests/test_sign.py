import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oproots.errors import ImaginarySpectrum, PreconditionFailed, SpectraNotSeparated
from oproots.matrix_core import norm2, rel_diff
from oproots.roots import principal_power
from oproots.sign import (companion, preprocess, pth_root_via_sign, scalar_arctan_sign, sign_block, sign_direct,
                          sign_integral, sign_newton, sign_properties, sign_sigma, sylvester_solve)

from conftest import cgauss, random_accretive, similar


def off_axis(rng, n, gap=0.05):
    """Random matrix with every eigenvalue at least ``gap`` from the imaginary axis."""
    re = rng.uniform(gap, 2, n) * rng.choice([-1, 1], n)
    d = re + 1j * rng.uniform(-2, 2, n)
    return similar(rng, d, 10.0)[0], d


def test_direct_examples(rng):
    r = sign_direct(np.diag([2.0, -3.0]))
    assert np.allclose(r.S, np.diag([1, -1])) and np.allclose(r.Eplus, np.diag([1, 0]))
    assert np.allclose(sign_direct(random_accretive(rng, 4, 0.1)).S, np.eye(4))
    a, v = similar(rng, np.array([1 + 2j, -3 + 1j]))
    assert rel_diff(sign_direct(a).S, v @ np.diag([1, -1]) @ np.linalg.inv(v)) < 1e-10


def test_imaginary_spectrum_rejected():
    with pytest.raises(ImaginarySpectrum):
        sign_direct(np.diag([1.0, 2j]))
    with pytest.raises(ImaginarySpectrum):
        sign_newton(np.diag([0.0, 1.0]))


@given(st.integers(0, 2**32 - 1), st.integers(1, 8))
def test_sign_result_invariants(seed, n):
    a, d = off_axis(np.random.default_rng(seed), n)
    r = sign_direct(a)
    eye = np.eye(n)
    assert norm2(r.S @ r.S - eye) <= 1e-7 * (1 + norm2(r.S) ** 2)
    assert norm2(r.Eplus + r.Eminus - eye) <= 1e-8
    assert norm2(r.Eplus @ r.Eplus - r.Eplus) <= 1e-7 * (1 + norm2(r.S) ** 2)
    assert norm2(r.S @ r.N - a) <= 1e-6 * norm2(a)
    # trace of the spectral projector counts right-half-plane eigenvalues
    assert np.trace(r.Eplus).real == pytest.approx(np.sum(d.real > 0), abs=1e-6)


@pytest.mark.parametrize("key", ["square", "adjoint", "right_half", "similarity", "polar", "real_scale", "inverse"])
def test_sign_identity(key, rng):
    for _ in range(5):
        a, _ = off_axis(rng, 5)
        v, _ = similar(rng, rng.uniform(1, 2, 5), 50.0)
        for method in ("direct", "newton"):
            assert sign_properties(a, v, method=method)[key] <= 1e-6


def test_newton_examples():
    r = sign_newton(np.diag([1.0, -1.0]))
    assert r.trace.n_steps == 1 and np.allclose(r.S, np.diag([1, -1]))
    r = sign_newton(np.array([[3.0]]))
    ns = [s.norm_x for s in r.trace.steps]
    assert ns[1] == pytest.approx(5 / 3) and ns[2] == pytest.approx(17 / 15)
    assert r.S[0, 0] == pytest.approx(1)


def test_newton_agrees_with_direct(rng):
    a, _ = off_axis(rng, 8)
    r = sign_newton(a)
    assert r.trace.n_steps <= 30
    assert r.trace.checks["err_to_direct"] < 1e-8


@given(st.integers(0, 2**32 - 1), st.integers(1, 8))
def test_newton_certificates(seed, n):
    a, _ = off_axis(np.random.default_rng(seed), n, gap=0.1)
    ch = sign_newton(a).trace.checks
    assert ch["bound"]
    assert all(v <= 1e-6 for v in ch["closed_form"].values())
    if ch["order"] is not None:
        assert 1.7 <= ch["order"] <= 2.3


def test_integral_route(rng):
    a, _ = off_axis(rng, 5, gap=0.2)
    assert rel_diff(sign_integral(a).S, sign_direct(a).S) < 1e-7


def test_arctan_approaches_sign():
    vals = scalar_arctan_sign(-2 + 1j)
    assert abs(vals[-1][1] + 1) < 1e-7
    assert abs(scalar_arctan_sign(0.5 - 3j)[-1][1] - 1) < 1e-7


def test_sign_block_examples():
    eye = np.eye(2)
    s = sign_block(eye, eye)
    assert np.allclose(s, np.block([[0 * eye, eye], [eye, 0 * eye]]))
    s = sign_block(np.diag([4.0, 9.0]), eye)
    assert np.allclose(s[:2, 2:], np.diag([2, 3])) and np.allclose(s[2:, :2], np.diag([1 / 2, 1 / 3]))


def test_sign_block_random(rng):
    a = random_accretive(rng, 4, 0.2)
    b = random_accretive(rng, 4, 0.2)
    s = sign_block(a, b, method="newton")
    assert rel_diff(s, sign_direct(np.block([[0 * a, a], [b, 0 * b]])).S) < 1e-8


def test_sylvester_examples(rng):
    x = sylvester_solve(np.array([[-1.0]]), np.array([[1.0]]), np.array([[2.0]]))
    assert x[0, 0] == pytest.approx(-1)
    y = cgauss(rng, 3)
    assert np.allclose(sylvester_solve(-np.eye(3), np.eye(3), y), -y / 2)


@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_sylvester_residual(seed, n):
    rng = np.random.default_rng(seed)
    a = -random_accretive(rng, n, 0.1)
    b = random_accretive(rng, n, 0.1)
    y = cgauss(rng, n)
    x = sylvester_solve(a, b, y)
    assert norm2(a @ x - x @ b - y) <= 1e-6 * (norm2(a) + norm2(b)) * norm2(x)


def test_sylvester_needs_separation():
    with pytest.raises(SpectraNotSeparated):
        sylvester_solve(np.diag([1.0, -1.0]), np.eye(2), np.ones((2, 2)))


def test_sigma_values():
    assert [sign_sigma(p) for p in (2, 4, 6)] == pytest.approx([1, 1, 2])
    assert sign_sigma(10) == pytest.approx(1 + 2 * (math.cos(math.pi / 5) + math.cos(2 * math.pi / 5)))


def test_companion_layout():
    c = companion(np.array([[5.0]]), 3)
    assert np.allclose(c, [[0, 1, 0], [0, 0, 1], [5, 0, 0]])
    # c^p = a (x) I, so eigenvalues are the p-th roots of a
    assert np.allclose(np.linalg.matrix_power(c, 3), 5 * np.eye(3))


def test_preprocess_paths():
    a = np.diag([4.0, 9.0])
    assert preprocess(a, 6)[1:] == (6, [])
    a2, q, path = preprocess(a, 3)
    assert q == 6 and path == ["double"] and np.allclose(a2, a @ a)
    a2, q, path = preprocess(a, 8)
    assert q == 2 and path == ["halve", "halve"]


def test_pth_root_via_sign_examples():
    r = pth_root_via_sign(np.diag([4.0, 9.0]), 2)
    assert np.allclose(r.value, np.diag([2, 3])) and r.info["sigma"] == pytest.approx(1)
    r = pth_root_via_sign(np.array([[8.0]]), 3)
    assert r.info["p_reduced"] == 6 and r.info["sigma"] == pytest.approx(2)
    assert r.value[0, 0] == pytest.approx(2)


@pytest.mark.parametrize("p", [2, 3, 4, 5, 6, 8])
def test_pth_root_via_sign_matches_schur(p, rng):
    a = random_accretive(rng, 4, 0.1)
    r = pth_root_via_sign(a, p)
    assert rel_diff(r.value, principal_power(a, 1 / p).value) <= 1e-5
    assert r.info["upper_block_check"] <= 1e-6


def test_pth_root_odd_p_left_half_plane_rejected():
    with pytest.raises(PreconditionFailed):
        pth_root_via_sign(np.diag([1.0, -1 + 1j]), 3)
    # even p keeps the principal branch there
    r = pth_root_via_sign(np.diag([1.0, -1 + 1j]), 2)
    assert rel_diff(r.value, principal_power(np.diag([1.0, -1 + 1j]), 0.5).value) < 1e-8
