import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oproots.errors import GenerationExhausted
from oproots.generators import (FIXED_NAMES, GeneratorSpec, fixed_instance, generate, has_negative_real_point,
                                random_pair)
from oproots.matrix_core import norm2
from oproots.spectral import argument_interval, numerical_range


def test_jordan_block():
    assert np.array_equal(generate(GeneratorSpec("JordanBlock", n=2)), [[0, 1], [0, 0]])
    j = generate(GeneratorSpec("JordanBlock", n=3, lam=2 + 1j))
    assert np.allclose(np.diag(j), 2 + 1j)


def test_agh_pair():
    a, b = fixed_instance("agh-pair")
    assert np.allclose(a, np.diag([1 + 1j, 1 - 1j])) and np.allclose(b, np.diag([1 - 1j, 1 + 1j]))


def test_all_fixed_instances_load():
    for name in FIXED_NAMES:
        assert fixed_instance(name) is not None
    with pytest.raises(ValueError):
        GeneratorSpec("FixedInstance", name="nope")


def test_determinism():
    spec = GeneratorSpec("RandomAccretive", n=5, seed=42, theta=math.pi / 3)
    assert np.array_equal(generate(spec), generate(spec))
    assert not np.array_equal(generate(spec), generate(GeneratorSpec("RandomAccretive", n=5, seed=43)))


@given(st.integers(0, 10_000), st.integers(1, 12), st.sampled_from([math.pi / 6, math.pi / 3, math.pi / 2]))
def test_random_accretive_in_sector(seed, n, theta):
    a = generate(GeneratorSpec("RandomAccretive", n=n, seed=seed, theta=theta))
    if theta < math.pi / 2:
        lo, hi = argument_interval(a)
        assert max(abs(lo), abs(hi)) <= theta + 1e-9
    assert numerical_range(a).min_real >= -1e-10 * max(1, norm2(a))


@given(st.integers(0, 10_000), st.integers(2, 8))
def test_singular_draws(seed, n):
    a = generate(GeneratorSpec("RandomAccretive", n=n, seed=seed, singular=1))
    s = np.linalg.svd(a, compute_uv=False)
    assert s[-1] <= 1e-12 * s[0]
    assert numerical_range(a).min_real >= -1e-10 * s[0]


@given(st.integers(0, 10_000), st.integers(1, 10), st.sampled_from(["right", "left", "both"]))
def test_diagonal_similarity_gap(seed, n, half):
    a = generate(GeneratorSpec("DiagonalPlusSimilarity", n=n, seed=seed, gap=0.1, half=half))
    re = np.linalg.eigvals(a).real
    assert np.all(np.abs(re) >= 0.05)
    if half == "right":
        assert np.all(re > 0)
    if half == "left":
        assert np.all(re < 0)


@given(st.integers(0, 10_000), st.integers(1, 10))
def test_contraction_ball(seed, n):
    a = generate(GeneratorSpec("ContractionBall", n=n, seed=seed, radius=0.9))
    assert norm2(np.eye(n) - a) <= 0.9 + 1e-12


def test_random_pair_independent():
    a, b = random_pair(GeneratorSpec("RandomAccretive", n=3, seed=7))
    assert not np.allclose(a, b)


def test_negative_inner_pair_has_negative_point():
    a, b = fixed_instance("negative-inner-pair")
    assert has_negative_real_point(b @ b)
    assert not has_negative_real_point(np.eye(2))


def test_spec_json_roundtrip():
    spec = GeneratorSpec("JordanBlock", n=3, lam=1 - 2j)
    assert GeneratorSpec.from_json(spec.to_json()) == spec


def test_spec_validation():
    with pytest.raises(ValueError):
        GeneratorSpec("Nope")
    with pytest.raises(ValueError):
        GeneratorSpec("RandomAccretive", n=0)
    with pytest.raises(ValueError):
        GeneratorSpec("RandomAccretive", n=3, singular=3)


def test_exhaustion_reported():
    with pytest.raises(GenerationExhausted):
        # eigen-arguments near pi/2 - tiny margin can never fit in a pi/20 sector
        generate(GeneratorSpec("RandomAccretive", n=6, seed=0, theta=math.pi / 20, margin=0.0, min_real=5.0))
