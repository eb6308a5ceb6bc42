"""Brute-force check that f is maximized on the q-sphere by eigenvalue shapes (α, β, …, β)."""

import itertools
import logging
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import minimize

from config import SHAPE_GRID
from errors import DomainError
from freelimits import limit_mopn, minimize_h

logger = logging.getLogger(__name__)

SHAPE_TOL = 1e-3
MAX_SHAPE_K = 4


@dataclass
class ShapeResult:
    k: int
    q: float
    levels: list[float]          # maximizer, sorted non-increasing
    value: float                 # max f over the grid, polished
    two_level_value: float       # k · limit_mopn(k, q/(q−1))
    two_level: bool
    asserted: bool               # the (1, k−1) shape is only claimed for q ≥ 3
    passed: bool

    def to_dict(self) -> dict:
        return asdict(self)


def simplex_grid(k: int, resolution: int) -> np.ndarray:
    """All w ≥ 0 with Σ w = 1 on the lattice of step 1/resolution."""
    points = [
        c + (resolution - sum(c),)
        for c in itertools.product(range(resolution + 1), repeat=k - 1)
        if sum(c) <= resolution
    ]
    return np.array(points, dtype=float) / resolution


def _on_sphere(theta: np.ndarray, q: float) -> np.ndarray:
    lam = np.abs(theta)
    return lam / np.sum(lam**q) ** (1.0 / q)


def is_two_level(levels) -> bool:
    """Multiplicities (1, k−1) with the single level on top: (α, β, …, β), α ≥ β."""
    levels = np.sort(np.asarray(levels, dtype=float))[::-1]
    return bool(np.ptp(levels[1:]) <= SHAPE_TOL)


def _maximize(k: int, q: float, resolution: int) -> tuple[np.ndarray, float]:
    levels = simplex_grid(k, resolution) ** (1.0 / q)
    values, _ = minimize_h(levels)
    best = int(np.argmax(values))
    start, value = levels[best], float(values[best])

    polished = minimize(
        lambda theta: -float(minimize_h(_on_sphere(theta, q)[None, :])[0][0]),
        start,
        method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 4000},
    )
    if -polished.fun > value:
        start, value = _on_sphere(polished.x, q), float(-polished.fun)
    return np.sort(start)[::-1], value


def validate_optimal_shape(k: int, q_list, resolution: int = SHAPE_GRID) -> list[ShapeResult]:
    if not 2 <= k <= MAX_SHAPE_K:
        raise DomainError(f"shape validation supports 2 <= k <= {MAX_SHAPE_K}, got {k}")
    results = []
    for q in q_list:
        q = float(q)
        if q <= 1:
            raise DomainError(f"q must exceed 1, got {q}")
        levels, value = _maximize(k, q, resolution)
        reference, _ = limit_mopn(k, q / (q - 1.0))
        two_level = is_two_level(levels)
        asserted = q >= 3
        passed = not asserted or (two_level and abs(value - k * reference) <= SHAPE_TOL)
        if not passed:
            logger.warning(f"Shape check failed for k={k}, q={q}: levels {np.round(levels, 6).tolist()}")
        results.append(ShapeResult(
            k=k, q=q, levels=[float(x) for x in levels], value=value, two_level_value=float(k * reference),
            two_level=two_level, asserted=asserted, passed=bool(passed),
        ))
        logger.info(f"Shape k={k} q={q}: two_level={two_level} value={value:.6f} reference={k * reference:.6f}")
    return results
