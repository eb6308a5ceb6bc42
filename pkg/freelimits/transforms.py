"""h(x, A), f(A), spectral edges and limit distributions."""

import logging
import math

import numpy as np
from scipy import integrate, stats

from config import BISECTION_ITERATIONS
from errors import DomainError
from matrixkit import psd_spectrum
from models import CoefficientMatrix, SpectralProfile

logger = logging.getLogger(__name__)


def coefficient_matrix(a) -> CoefficientMatrix:
    """Validate a k×k PSD matrix and cache its spectrum."""
    if isinstance(a, CoefficientMatrix):
        return a
    matrix = np.asarray(a, dtype=complex)
    spectrum = psd_spectrum(matrix)
    return CoefficientMatrix(k=matrix.shape[0], matrix=matrix, spectrum=spectrum)


def _levels(spectrum) -> np.ndarray:
    if isinstance(spectrum, CoefficientMatrix):
        return spectrum.spectrum.values
    if isinstance(spectrum, SpectralProfile):
        return spectrum.values
    values = np.asarray(spectrum)
    if values.ndim == 2:
        return psd_spectrum(values).values
    return np.asarray(values, dtype=float)


def _check_domain(x: float, lam: np.ndarray):
    top = float(lam.max())
    upper = math.inf if top <= 0 else 1.0 / top
    if not 0.0 < x < upper:
        raise DomainError(f"x={x} lies outside (0, {upper})")


def h_value(x: float, spectrum) -> float:
    """h(x, A) = 1/x + Σ λ_i / (1 − λ_i x) on 0 < x < 1/λ_max."""
    lam = _levels(spectrum)
    _check_domain(x, lam)
    return 1.0 / x + float(np.sum(lam / (1.0 - lam * x)))


def h_derivative(x: float, spectrum) -> float:
    lam = _levels(spectrum)
    _check_domain(x, lam)
    return -1.0 / x**2 + float(np.sum(lam**2 / (1.0 - lam * x) ** 2))


def minimize_h(levels: np.ndarray, weights: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Batch minimum of h over rows of levels (each row a spectrum, entries ≥ 0).

    weights gives the multiplicity of each column. h′ is strictly increasing with
    poles −∞ at 0 and +∞ at 1/λ_max, so plain bisection on its sign converges.
    Returns (values, minimizers).
    """
    levels = np.atleast_2d(np.asarray(levels, dtype=float))
    weights = np.ones(levels.shape[1]) if weights is None else np.asarray(weights, dtype=float)
    top = levels.max(axis=1)
    if np.any(top <= 0):
        raise DomainError("h has no minimum for the zero matrix")

    lo = np.zeros_like(top)
    hi = 1.0 / top
    with np.errstate(divide="ignore", invalid="ignore"):
        for _ in range(BISECTION_ITERATIONS):
            mid = 0.5 * (lo + hi)
            slope = -1.0 / mid**2 + (weights * levels**2 / (1.0 - levels * mid[:, None]) ** 2).sum(axis=1)
            rising = slope > 0
            hi = np.where(rising, mid, hi)
            lo = np.where(rising, lo, mid)
    x = 0.5 * (lo + hi)
    values = 1.0 / x + (weights * levels / (1.0 - levels * x[:, None])).sum(axis=1)
    return values, x


def f_limit(a) -> tuple[float, float]:
    """f(A) = min over x in (0, 1/‖A‖) of h(x, A); depends on the spectrum only."""
    lam = _levels(a)
    if lam.size == 0 or float(lam.max()) <= 0:
        raise DomainError("f(A) is undefined for the zero matrix")
    values, xs = minimize_h(lam[None, :])
    return float(values[0]), float(xs[0])


def mp_edges(k: int) -> tuple[float, float]:
    """Support edges ((√k − 1)², (√k + 1)²) of Marchenko–Pastur with rate k."""
    if k < 1:
        raise DomainError(f"rate must be >= 1, got {k}")
    root = math.sqrt(k)
    return (root - 1.0) ** 2, (root + 1.0) ** 2


def haagerup_bound(a) -> float:
    """3‖A‖₂ + |Tr A|."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {a.shape}")
    return 3.0 * float(np.linalg.norm(a, "fro")) + abs(complex(np.trace(a)))


def free_cumulants_from_spectrum(spectrum, r_max: int) -> list[float]:
    """κ_r = Tr A^r, the coefficients of the R-transform Σ λ_i / (1 − λ_i z)."""
    lam = _levels(spectrum)
    return [float(np.sum(lam**r)) for r in range(1, r_max + 1)]


def semicircle_density(x):
    x = np.asarray(x, dtype=float)
    return np.sqrt(np.clip(4.0 - x**2, 0.0, None)) / (2.0 * np.pi)


def semicircle_cdf(x):
    """CDF of the standard semicircle law on [−2, 2]."""
    x = np.clip(np.asarray(x, dtype=float), -2.0, 2.0)
    return 0.5 + x * np.sqrt(4.0 - x**2) / (4.0 * np.pi) + np.arcsin(x / 2.0) / np.pi


def marchenko_pastur_density(x, rate: float):
    """Absolutely continuous part of Marchenko–Pastur with the given rate (jump size 1)."""
    low, high = (1 - math.sqrt(rate)) ** 2, (1 + math.sqrt(rate)) ** 2
    x = np.asarray(x, dtype=float)
    inside = (x > low) & (x < high)
    with np.errstate(divide="ignore", invalid="ignore"):
        dens = np.sqrt(np.clip((high - x) * (x - low), 0.0, None)) / (2.0 * np.pi * x)
    return np.where(inside, dens, 0.0)


def marchenko_pastur_cdf(x, rate: float):
    """CDF by cumulative quadrature between sorted points; the atom 1 − rate sits at 0 when rate < 1."""
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    order = np.argsort(flat)
    low, high = (1 - math.sqrt(rate)) ** 2, (1 + math.sqrt(rate)) ** 2
    atom = max(0.0, 1.0 - rate)

    out = np.empty_like(flat)
    running = atom
    prev = low
    for idx in order:
        point = min(max(flat[idx], low), high)
        if point > prev:
            piece, _ = integrate.quad(lambda t: float(marchenko_pastur_density(t, rate)), prev, point, limit=200)
            running += piece
            prev = point
        out[idx] = 0.0 if flat[idx] < 0 else min(running, 1.0)
    return out.reshape(x.shape)


def spectral_ks_distance(samples, cdf) -> float:
    """Kolmogorov distance between the empirical law of samples and a CDF."""
    return float(stats.kstest(np.asarray(samples, dtype=float), cdf).statistic)
