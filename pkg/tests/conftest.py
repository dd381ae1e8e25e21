import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=30,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def cgauss(rng, n, m=None):
    m = n if m is None else m
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


def random_accretive(rng, n, margin=0.1):
    """Shift a random matrix so that min Re W(a) equals ``margin``."""
    a = cgauss(rng, n)
    h = 0.5 * (a + a.conj().T)
    return a + (margin - np.linalg.eigvalsh(h)[0]) * np.eye(n)


def random_unitary(rng, n):
    q, r = np.linalg.qr(cgauss(rng, n))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def similar(rng, d, max_cond=10.0):
    """``V diag(d) V^{-1}`` with ``cond(V) <= max_cond``."""
    n = len(d)
    s = np.exp(rng.uniform(0, math.log(max_cond), n))
    v = random_unitary(rng, n) @ np.diag(s) @ random_unitary(rng, n)
    return v @ np.diag(d) @ np.linalg.inv(v), v


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
