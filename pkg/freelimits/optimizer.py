"""Limit of the maximum output p-norm through the two-level eigenvalue reduction."""

import logging

import numpy as np
from scipy.optimize import minimize_scalar

from config import TWO_LEVEL_GRID
from errors import DomainError
from freelimits.transforms import minimize_h
from models import SchattenIndex, TwoLevelProfile

logger = logging.getLogger(__name__)


def two_level_beta(alpha, k: int, q: float):
    """β(α) = ((1 − α^q)/(k − 1))^{1/q} on the q-sphere."""
    alpha = np.asarray(alpha, dtype=float)
    return (np.clip(1.0 - alpha**q, 0.0, None) / (k - 1)) ** (1.0 / q)


def two_level_values(alpha, k: int, q: float) -> np.ndarray:
    """g(α) = f(diag(α, β, …, β)) for every α in the batch."""
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    levels = np.column_stack([alpha, two_level_beta(alpha, k, q)])
    values, _ = minimize_h(levels, weights=np.array([1.0, k - 1.0]))
    return values


def limit_mopn(k: int, p) -> tuple[float, TwoLevelProfile]:
    """(1/k) max f(A) over A ≥ 0 with ‖A‖_q = 1, restricted to shapes (α, β, …, β).

    Grid of TWO_LEVEL_GRID points on α ∈ [k^{-1/q}, 1], then a bounded Brent/golden
    refinement on the bracket around the best grid point. p = ∞ returns 4/k exactly.
    """
    p = SchattenIndex.parse(p)
    if k < 2:
        raise DomainError(f"limit_mopn needs k >= 2, got {k}")
    if p.is_infinite:
        return 4.0 / k, TwoLevelProfile(alpha=1.0, beta=0.0, k=k, q=1.0, shape_proven=True)

    q = p.conjugate
    grid = np.linspace(k ** (-1.0 / q), 1.0, TWO_LEVEL_GRID)
    values = two_level_values(grid, k, q)
    best = int(np.argmax(values))
    alpha, value = float(grid[best]), float(values[best])

    lo, hi = grid[max(best - 1, 0)], grid[min(best + 1, len(grid) - 1)]
    if hi > lo:
        refined = minimize_scalar(
            lambda a: -float(two_level_values(a, k, q)[0]),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-13},
        )
        if refined.success and -refined.fun > value:
            alpha, value = float(refined.x), float(-refined.fun)

    proven = q >= 3
    if not proven:
        logger.debug(f"Two-level reduction outside the proven regime (k={k}, q={q:.4f})")
    beta = float(two_level_beta(alpha, k, q))
    return value / k, TwoLevelProfile(alpha=alpha, beta=beta, k=k, q=q, shape_proven=proven)


def shape_inequality(q: float, u):
    """1 − 2q·u^{q−1} + (3q−1)·u^q − q·u^{q+1}; positive on (0, 1) when q ≥ 3."""
    u = np.asarray(u, dtype=float)
    return 1.0 - 2.0 * q * u ** (q - 1) + (3.0 * q - 1.0) * u**q - q * u ** (q + 1)


def shape_inequality_holds(q: float, samples: int = 2000) -> bool:
    u = np.arange(1, samples + 1) / (samples + 1)
    return bool(np.all(shape_inequality(q, u) > 0))
