import math

import numpy as np
import pytest
from scipy.integrate import trapezoid
from scipy.stats import unitary_group

from errors import DomainError
from freelimits import (
    coefficient_matrix,
    f_limit,
    free_cumulants_from_spectrum,
    h_derivative,
    h_value,
    haagerup_bound,
    marchenko_pastur_cdf,
    minimize_h,
    mp_edges,
    semicircle_cdf,
    semicircle_density,
    spectral_ks_distance,
)
from matrixkit import random_density


@pytest.mark.parametrize("k", range(2, 65))
def test_f_of_identity(k):
    value, x = f_limit(np.eye(k))
    assert abs(value - (1 + math.sqrt(k)) ** 2) < 1e-10
    assert abs(x - 1 / (1 + math.sqrt(k))) < 1e-10
    assert abs(h_derivative(x, np.eye(k))) < 1e-6


def test_f_of_rank_one():
    a = np.zeros((4, 4))
    a[0, 0] = 1.0
    value, x = f_limit(a)
    assert abs(value - 4.0) < 1e-12
    assert abs(x - 0.5) < 1e-12


def test_f_is_unitarily_invariant():
    rng = np.random.default_rng(12)
    a = 4 * random_density(4, rng)
    u = unitary_group.rvs(4, random_state=13)
    assert abs(f_limit(a)[0] - f_limit(u @ a @ u.conj().T)[0]) < 1e-9
    assert abs(f_limit(a)[0] - f_limit(coefficient_matrix(a))[0]) < 1e-12


def test_h_value_domain():
    assert abs(h_value(0.5, [1.0]) - 4.0) < 1e-15
    with pytest.raises(DomainError):
        h_value(1.0, [1.0])
    with pytest.raises(DomainError):
        h_value(0.0, [1.0])
    with pytest.raises(DomainError):
        f_limit(np.zeros((3, 3)))
    with pytest.raises(DomainError):
        minimize_h(np.zeros((2, 3)))


def test_minimize_h_batches_rows():
    levels = np.array([[1.0, 0.0], [1.0, 1.0], [0.5, 0.5]])
    values, _ = minimize_h(levels)
    assert abs(values[0] - 4.0) < 1e-12
    assert abs(values[1] - (1 + math.sqrt(2)) ** 2) < 1e-10
    assert abs(values[2] - 0.5 * (1 + math.sqrt(2)) ** 2) < 1e-10
    weighted, _ = minimize_h(np.array([[1.0, 1.0]]), weights=np.array([1.0, 3.0]))
    assert abs(weighted[0] - 9.0) < 1e-10


def test_haagerup_bound_dominates():
    rng = np.random.default_rng(31)
    for k in range(2, 13):
        spectra = np.array([np.linalg.eigvalsh(k * random_density(k, rng)) for _ in range(1000)])
        values, _ = minimize_h(spectra)
        bound = 3 * np.linalg.norm(spectra, axis=1) + spectra.sum(axis=1)
        assert np.all(values <= bound + 1e-9)


def test_haagerup_bound_value():
    assert abs(haagerup_bound(np.eye(4)) - 10.0) < 1e-14
    with pytest.raises(DomainError):
        haagerup_bound(np.ones(3))


def test_mp_edges():
    assert mp_edges(4) == (1.0, 9.0)
    assert mp_edges(1) == (0.0, 4.0)
    with pytest.raises(DomainError):
        mp_edges(0)


def test_free_cumulants_are_traces():
    assert free_cumulants_from_spectrum(np.diag([1.0, 2.0]), 3) == [3.0, 5.0, 9.0]


def test_semicircle():
    assert abs(semicircle_cdf(-3.0)) < 1e-15
    assert abs(semicircle_cdf(0.0) - 0.5) < 1e-15
    assert abs(semicircle_cdf(2.0) - 1.0) < 1e-15
    grid = np.linspace(-2, 2, 20001)
    assert abs(trapezoid(semicircle_density(grid), grid) - 1.0) < 1e-5


def test_marchenko_pastur_cdf():
    low, high = mp_edges(4)
    cdf = marchenko_pastur_cdf(np.array([low - 1, low, 5.0, high, high + 1]), 4)
    assert cdf[0] == 0.0 and cdf[1] == 0.0
    assert 0.0 < cdf[2] < 1.0
    assert abs(cdf[3] - 1.0) < 1e-6 and abs(cdf[4] - 1.0) < 1e-6
    assert abs(marchenko_pastur_cdf(0.0, 0.5) - 0.5) < 1e-15


def test_ks_distance():
    samples = (np.arange(100) + 0.5) / 100
    assert abs(spectral_ks_distance(samples, lambda x: np.clip(x, 0, 1)) - 0.005) < 1e-12


@pytest.mark.parametrize("c", [0.25, 2.0, 7.3])
def test_f_scales_linearly(c):
    rng = np.random.default_rng(41)
    for k in (2, 3, 5):
        a = k * random_density(k, rng)
        base, x = f_limit(a)
        scaled, y = f_limit(c * a)
        assert abs(scaled - c * base) < 1e-10 * c * base
        assert abs(y - x / c) < 1e-8 * x / c


def test_h_is_strictly_convex():
    rng = np.random.default_rng(43)
    for _ in range(10):
        lam = np.linalg.eigvalsh(4 * random_density(4, rng))
        upper = 1.0 / lam.max()
        for _ in range(100):
            x1, x2 = rng.uniform(0.01, 0.99, size=2) * upper
            if abs(x1 - x2) < 1e-3 * upper:
                continue
            average = 0.5 * (h_value(x1, lam) + h_value(x2, lam))
            midpoint = h_value(0.5 * (x1 + x2), lam)
            assert average - midpoint > 1e-12 * max(1.0, average)


def test_h_derivative_domain():
    with pytest.raises(DomainError):
        h_derivative(0.0, [1.0])
    with pytest.raises(DomainError):
        h_derivative(1.0, [1.0])
    assert abs(h_derivative(0.5, [1.0])) < 1e-12
