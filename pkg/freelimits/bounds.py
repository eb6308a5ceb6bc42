"""Closed-form violation bounds, threshold scans and the small-p inequality checks."""

import logging
import math
from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np
import pandas as pd

from config import ENTROPY_TRACE_TOL, VERDICT_RTOL, VIOLATION_CHUNK
from errors import DimensionMismatchError, DomainError
from matrixkit import bell_state
from models import SchattenIndex, ViolationReport

logger = logging.getLogger(__name__)

VIOLATION_COLUMNS = [
    "k", "single_upper", "single_squared", "pair_lower", "margin", "violated", "first_violation",
]


def _exponent(p) -> float:
    """Exponent as a float; p = 1 is allowed here for the trace-norm evaluation of the pair bound."""
    if isinstance(p, SchattenIndex):
        return p.p
    if isinstance(p, str):
        return SchattenIndex.parse(p).p
    return float(p)


def _check_k(k):
    if np.any(np.asarray(k) < 2):
        raise DomainError(f"bounds need k >= 2, got {k}")


def _bracket(k):
    return 1.0 - 3.0 / k + 2.0 / np.sqrt(k)


def single_channel_upper_bound(k, p):
    """((4/k)^p + (1/(k−1))^{p−1}·[1 − 3/k + 2/√k]^p)^{1/p}; p = ∞ gives the larger profile entry."""
    _check_k(k)
    p = _exponent(p)
    k = np.asarray(k, dtype=float)
    head = 4.0 / k
    tail = _bracket(k) / (k - 1.0)
    if math.isinf(p):
        out = np.maximum(head, tail)
    else:
        out = (head**p + (k - 1.0) * tail**p) ** (1.0 / p)
    return float(out) if out.ndim == 0 else out


def bell_pair_lower_bound(k, p):
    """‖(1/k²)I + (1/k)|b_k⟩⟨b_k|‖_p = ((1/k + 1/k²)^p + (k²−1)(1/k²)^p)^{1/p}."""
    _check_k(k)
    p = _exponent(p)
    k = np.asarray(k, dtype=float)
    top = 1.0 / k + 1.0 / k**2
    if math.isinf(p):
        out = top
    else:
        out = (top**p + (k**2 - 1.0) * (1.0 / k**2) ** p) ** (1.0 / p)
    return float(out) if np.ndim(out) == 0 else out


def bell_pair_limit(k: int) -> np.ndarray:
    """(1/k²) I_{k²} + (1/k)|b_k⟩⟨b_k|."""
    b = bell_state(k)
    return np.eye(k * k) / k**2 + np.outer(b, b.conj()) / k


def isotropic_lower_bound(k, p):
    """k^{−2+1/p}(√k + 1)², the limit p-norm reached by an isotropic coefficient matrix."""
    p = _exponent(p)
    k = np.asarray(k, dtype=float)
    out = k ** (-2.0 + 1.0 / p) * (np.sqrt(k) + 1.0) ** 2
    return float(out) if out.ndim == 0 else out


def _scaled_forms(k: int, p: float) -> tuple[float, float]:
    """k^{2p}-scaled pair lower bound and squared single upper bound."""
    c = _bracket(k)
    ratio = k / (k - 1.0)
    lower = (k + 1.0) ** p + (k**2 - 1.0)
    upper = (
        4.0 ** (2 * p)
        + k**2 * ratio ** (2 * p - 2) * c ** (2 * p)
        + 2.0 * 4.0**p * k * ratio ** (p - 1) * c**p
    )
    return lower, upper


def _violates(pair, single_sq):
    return (pair - single_sq) > VERDICT_RTOL * single_sq


def multiplicativity_verdict(k: int, p) -> ViolationReport:
    """Bell-pair lower bound against the squared single-channel upper bound."""
    index = SchattenIndex.parse(p)
    single = single_channel_upper_bound(k, index) if not index.is_infinite else 4.0 / k
    pair = bell_pair_lower_bound(k, index)
    single_sq = single**2
    lower_scaled = upper_scaled = None
    if not index.is_infinite:
        lower_scaled, upper_scaled = _scaled_forms(k, index.p)
    return ViolationReport(
        k=k,
        p=index.label(),
        form="MOpN",
        single_bound=single,
        pair_bound=pair,
        violated=bool(_violates(pair, single_sq)),
        margin=pair - single_sq,
        lower_scaled=lower_scaled,
        upper_scaled=upper_scaled,
    )


def mopn_transfer_window(k: int, epsilon: float, m: int = 1) -> tuple[float, float]:
    """Factors bounding ‖⊗Ψ‖_p / ‖⊗Φ‖_p for an m-fold product after rectification."""
    root = math.sqrt(k)
    low = ((1.0 - epsilon) * k / (k + 1.0 + 2.0 * root)) ** m
    high = ((1.0 + epsilon) * k / (k + 1.0 - 2.0 * root)) ** m
    return low, high


def rectified_multiplicativity_verdict(k: int, p, epsilon: float | None = None) -> ViolationReport:
    """Same comparison after rectification: pair shrunk by the m=2 floor, single inflated by the m=1 ceiling."""
    index = SchattenIndex.parse(p)
    epsilon = 1.0 / k if epsilon is None else epsilon
    base = multiplicativity_verdict(k, index)
    pair_floor, _ = mopn_transfer_window(k, epsilon, m=2)
    _, single_ceiling = mopn_transfer_window(k, epsilon, m=1)
    pair = base.pair_bound * pair_floor
    single = base.single_bound * single_ceiling
    return ViolationReport(
        k=k,
        p=index.label(),
        form="MOpN-rectified",
        single_bound=single,
        pair_bound=pair,
        violated=bool(_violates(pair, single**2)),
        margin=pair - single**2,
    )


def violation_rows(p, k_min: int = 2, k_max: int = 10**6, chunk: int = VIOLATION_CHUNK) -> Iterator[pd.DataFrame]:
    """Stream the verdict table over k_min..k_max in chunks; the first violating row is flagged."""
    index = SchattenIndex.parse(p)
    if k_min < 2 or k_max < k_min:
        raise DomainError(f"invalid k range [{k_min}, {k_max}]")
    seen = False
    for start in range(k_min, k_max + 1, chunk):
        ks = np.arange(start, min(start + chunk, k_max + 1))
        single = single_channel_upper_bound(ks, index) if not index.is_infinite else 4.0 / ks
        pair = bell_pair_lower_bound(ks, index)
        single_sq = single**2
        violated = _violates(pair, single_sq)
        first = np.zeros(len(ks), dtype=bool)
        if not seen and violated.any():
            first[int(np.argmax(violated))] = True
            seen = True
        yield pd.DataFrame({
            "k": ks,
            "single_upper": single,
            "single_squared": single_sq,
            "pair_lower": pair,
            "margin": pair - single_sq,
            "violated": violated,
            "first_violation": first,
        }, columns=VIOLATION_COLUMNS)


def minimal_violating_k(p, k_min: int = 2, k_max: int = 10**6) -> int | None:
    """Smallest k in the range whose Bell-pair bound beats the squared single bound."""
    for frame in violation_rows(p, k_min, k_max):
        hits = frame.loc[frame["first_violation"], "k"]
        if not hits.empty:
            return int(hits.iloc[0])
    return None


def moe_single_lower_bound(k):
    """log k − 9k/(√k − 1)⁴."""
    k = np.asarray(k, dtype=float)
    return np.log(k) - 9.0 * k / (np.sqrt(k) - 1.0) ** 4


def pair_entropy_ceiling(k):
    """2 log k − (log k)/k + 2/k."""
    k = np.asarray(k, dtype=float)
    return 2.0 * np.log(k) - np.log(k) / k + 2.0 / k


def two_norm_deviation_bound(k):
    """3/(k + 1 − 2√k), the limit bound on ‖Ψ^c(|x⟩⟨x|) − I/k‖₂."""
    k = np.asarray(k, dtype=float)
    return 3.0 / (k + 1.0 - 2.0 * np.sqrt(k))


def _gap(k):
    k = np.asarray(k, dtype=float)
    return (np.log(k) - 2.0) / k - 18.0 * k / (np.sqrt(k) - 1.0) ** 4


def moe_gap(k: int) -> ViolationReport:
    """Twice the single-channel entropy floor minus the Bell-pair entropy ceiling."""
    _check_k(k)
    gap = float(_gap(k))
    return ViolationReport(
        k=k,
        p="entropy",
        form="MOE",
        single_bound=float(2.0 * moe_single_lower_bound(k)),
        pair_bound=float(pair_entropy_ceiling(k)),
        violated=gap > 0,
        margin=gap,
        minimal_k=moe_minimal_violating_k(),
    )


def moe_minimal_violating_k(k_max: int = 10**12) -> int | None:
    """First k with a positive MOE gap.

    The gap is negative for 2 ≤ k ≤ 8 (log k < 2 up to e²) and changes sign once,
    so an integer bisection on [8, k_max] finds the threshold.
    """
    lo, hi = 8, int(k_max)
    if _gap(hi) <= 0:
        return None
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _gap(mid) > 0:
            hi = mid
        else:
            lo = mid
    return hi


def quadratic_entropy_bound(rho) -> float:
    """log k − k·‖ρ − I/k‖₂², a lower bound on S(ρ) for trace-one ρ."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {rho.shape}")
    trace = float(np.trace(rho).real)
    if abs(trace - 1.0) > ENTROPY_TRACE_TOL:
        raise DomainError(f"density matrix trace is {trace:.10f}, expected 1")
    k = rho.shape[0]
    deviation = rho - np.eye(k) / k
    return math.log(k) - k * float(np.linalg.norm(deviation, "fro")) ** 2


def haar_pair_limit(k: int) -> np.ndarray:
    """(1/k)|b_k⟩⟨b_k| + (1/k²) Σ_{i≠j} |ij⟩⟨ij|, the Bell-input limit for Haar-unitary channels."""
    b = bell_state(k)
    off = np.ones((k, k)) - np.eye(k)
    return np.outer(b, b.conj()) / k + np.diag(off.ravel()) / k**2


@dataclass
class LowPCheckReport:
    table: pd.DataFrame
    g_positive: bool
    additivity_positive: bool
    haar_negative: bool

    @property
    def passed(self) -> bool:
        return self.g_positive and self.additivity_positive and self.haar_negative


def low_p_checks(p_grid=None, k_grid=None) -> LowPCheckReport:
    """Inequality checks for 1 < p ≤ 1.5.

    For every (p, k):
      g = 4p k^{3/2} − (1+k)^p + 1 (must be > 0),
      additivity_diff = isotropic_lower_bound^{2p} − ‖Bell-pair limit‖_p^p (must be > 0),
      haar_contrast = (k^{−1+1/p})^{2p} − ‖haar_pair_limit‖_p^p = k^{−2p}(k − k^p),
      negative for k ≥ 2 and not applicable at k = 1.
    """
    p_grid = np.round(np.arange(1.05, 1.5001, 0.05), 2) if p_grid is None else np.asarray(p_grid, dtype=float)
    k_grid = np.arange(1, 10_001) if k_grid is None else np.asarray(k_grid)
    if np.any(p_grid <= 1) or np.any(p_grid > 1.5):
        raise DomainError("low-p checks need p in (1, 1.5]")
    if np.any(k_grid < 1):
        raise DomainError("low-p checks need k >= 1")

    frames = []
    for p in p_grid:
        k = k_grid.astype(float)
        g = 4.0 * p * k**1.5 - (1.0 + k) ** p + 1.0
        pair_p = (1.0 / k + 1.0 / k**2) ** p + (k**2 - 1.0) * (1.0 / k**2) ** p
        additivity = (k ** (-2.0 + 1.0 / p) * (np.sqrt(k) + 1.0) ** 2) ** (2.0 * p) - pair_p
        haar = np.where(k >= 2, k ** (-2.0 * p) * (k - k**p), np.nan)
        frames.append(pd.DataFrame({
            "p": p, "k": k_grid, "g": g, "additivity_diff": additivity, "haar_contrast": haar,
        }))
    table = pd.concat(frames, ignore_index=True)
    haar_rows = table["haar_contrast"].dropna()
    report = LowPCheckReport(
        table=table,
        g_positive=bool((table["g"] > 0).all()),
        additivity_positive=bool((table["additivity_diff"] > 0).all()),
        haar_negative=bool((haar_rows < 0).all()),
    )
    if not report.passed:
        logger.warning("Low-p inequality checks failed on part of the grid")
    return report
