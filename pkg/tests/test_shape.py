import math

import numpy as np
import pytest

from errors import DomainError
from experiments import shape as shape_module
from experiments import validate_optimal_shape
from experiments.shape import is_two_level, simplex_grid
from freelimits import limit_mopn


def test_simplex_grid():
    grid = simplex_grid(3, 4)
    assert grid.shape == (15, 3)
    assert np.allclose(grid.sum(axis=1), 1.0)
    assert grid.min() >= 0


@pytest.mark.parametrize("k", [2, 3, 4])
def test_two_level_shape_for_large_q(k):
    results = validate_optimal_shape(k, [3.0, 4.0])
    for result in results:
        assert result.asserted
        assert result.two_level
        assert result.passed
        assert abs(result.value - result.two_level_value) <= 1e-3
        assert abs(sum(x**result.q for x in result.levels) - 1.0) < 1e-9


def test_isotropic_value_at_q4():
    (result,) = validate_optimal_shape(3, [4.0])
    assert abs(result.value - 3 ** -0.25 * (1 + math.sqrt(3)) ** 2) < 1e-3


def test_small_q_is_reported_not_asserted():
    (result,) = validate_optimal_shape(3, [1.5])
    assert not result.asserted
    assert result.passed
    assert result.to_dict()["q"] == 1.5


def test_shape_guards():
    with pytest.raises(DomainError):
        validate_optimal_shape(5, [3.0])
    with pytest.raises(DomainError):
        validate_optimal_shape(3, [1.0])


def test_two_level_means_single_top_level():
    assert is_two_level([0.8, 0.3, 0.3, 0.3])
    assert is_two_level([0.3, 0.3, 0.8, 0.3])
    assert is_two_level([0.5, 0.5, 0.5])
    assert is_two_level([0.9, 0.1])
    assert not is_two_level([0.6, 0.6, 0.6, 0.2])
    assert not is_two_level([0.7, 0.5, 0.2])


def test_repeated_top_level_fails_the_check(monkeypatch):
    reference, _ = limit_mopn(4, 1.5)
    levels = np.array([1.0, 1.0, 1.0, 0.5])
    levels /= np.sum(levels**3) ** (1 / 3)
    monkeypatch.setattr(shape_module, "_maximize", lambda k, q, resolution: (levels, 4 * reference))
    (result,) = validate_optimal_shape(4, [3.0])
    assert result.asserted
    assert not result.two_level
    assert not result.passed
