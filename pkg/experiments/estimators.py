"""Numerical MOpN and MOE of a sampled channel by alternating dual ascent.

Given A, the best input is the top eigenvector of M(A) = Σ a_ij K_i* K_j, because
Tr[Φ^c(|x⟩⟨x|) A] = ⟨x, M(A) x⟩. Given x, the best A is the Hölder maximizer of
B = Φ^c(|x⟩⟨x|), and Tr[B A] = ‖B‖_p. Both half-steps are exact optima, so the
objective never decreases.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence, LinearOperator, eigsh

from channels import complementary_on_vector, effective_kraus, quadratic_form_action, quadratic_form_matrix
from config import (
    ASCENT_TOL,
    DEFAULT_RESTARTS,
    DENSE_EIGEN_CUTOFF,
    MAX_ITERATIONS,
    MIN_RESTARTS,
    MOE_POLISH_ITERATIONS,
    MOE_SURROGATE_P,
    STALL_ROUNDS,
)
from ensembles import generator
from errors import DomainError, EigenSolverError
from freelimits import haagerup_bound
from matrixkit import eig_herm, holder_dual_maximizer, random_pure_state, vector_p_norm, von_neumann_entropy
from models import ChannelKind, KrausFamily, Rectifier, SchattenIndex, SeedSpec

logger = logging.getLogger(__name__)

LOG_FLOOR = 1e-15
DEFAULT_ESTIMATOR_SEED = SeedSpec(0)


@dataclass
class MOpNEstimate:
    value: float
    witness_state: np.ndarray
    witness_A: np.ndarray
    converged: bool
    iterations: int
    history: list[list[float]] = field(default_factory=list)  # objective after every half-step, per restart

    @property
    def haagerup_ceiling(self) -> float:
        """Haagerup bound of the witness over k: the limit ceiling for its own A."""
        return haagerup_bound(self.witness_A) / self.witness_A.shape[0]


@dataclass
class MOEEstimate:
    value: float
    witness_state: np.ndarray
    surrogate_value: float
    converged: bool
    history: list[float] = field(default_factory=list)
    heuristic: bool = True  # global minimality is not certified


def top_eigenpair(kraus: np.ndarray, a, x0: np.ndarray | None = None) -> tuple[float, np.ndarray]:
    """Largest eigenvalue and unit eigenvector of Σ a_ij K_i* K_j for Hermitian a."""
    n = kraus.shape[1]
    if n <= DENSE_EIGEN_CUTOFF:
        profile, vecs = eig_herm(quadratic_form_matrix(kraus, a))
        return profile.max, vecs[:, 0]

    op = LinearOperator((n, n), matvec=lambda v: quadratic_form_action(kraus, a, np.ravel(v)), dtype=complex)
    try:
        vals, vecs = eigsh(op, k=1, which="LA", v0=x0)
    except (ArpackNoConvergence, ArpackError) as e:
        raise EigenSolverError(n, str(e)) from e
    x = vecs[:, 0]
    return float(vals[0]), x / np.linalg.norm(x)


def _rayleigh(kraus: np.ndarray, a, x: np.ndarray) -> float:
    return float(np.real(np.vdot(x, quadratic_form_action(kraus, a, x))))


def _ascend(kraus: np.ndarray, p: SchattenIndex, x: np.ndarray, max_iters: int, tol: float):
    """One restart of the alternating scheme. Returns (value, x, A, converged, history, iterations)."""
    history: list[float] = []
    stall = 0
    value = -math.inf
    a = None
    for iteration in range(1, max_iters + 1):
        b = complementary_on_vector(kraus, x)
        a = holder_dual_maximizer(b, p)
        new_value = vector_p_norm(eig_herm(b)[0].values, p)
        history.append(new_value)
        stall = stall + 1 if new_value - value < tol else 0
        value = max(value, new_value)
        if stall >= STALL_ROUNDS:
            return value, x, a, True, history, iteration

        _, candidate = top_eigenpair(kraus, a, x)
        rayleigh = _rayleigh(kraus, a, candidate)
        if rayleigh >= history[-1] - 1e-14:
            x = candidate
        history.append(max(rayleigh, history[-1]))
    return value, x, a, False, history, max_iters


def estimate_mopn(
    fam: KrausFamily,
    kind: ChannelKind,
    p,
    restarts: int = DEFAULT_RESTARTS,
    max_iters: int = MAX_ITERATIONS,
    rectifier: Rectifier | None = None,
    seed: SeedSpec = DEFAULT_ESTIMATOR_SEED,
    tol: float = ASCENT_TOL,
) -> MOpNEstimate:
    """Best ‖Φ^c(|x⟩⟨x|)‖_p over restarts; restart r starts from a pure state drawn on seed.child(r)."""
    p = SchattenIndex.parse(p)
    if restarts < MIN_RESTARTS:
        raise DomainError(f"restarts must be >= {MIN_RESTARTS}, got {restarts}")
    kraus = effective_kraus(fam, kind, rectifier)

    best = None
    histories = []
    converged_all = True
    total_iters = 0
    for r in range(restarts):
        x0 = random_pure_state(fam.n, generator(seed.child(r)))
        value, x, a, converged, history, iterations = _ascend(kraus, p, x0, max_iters, tol)
        histories.append(history)
        converged_all &= converged
        total_iters += iterations
        if best is None or value > best[0]:
            best = (value, x, a)
    if not converged_all:
        logger.warning(f"MOpN ascent hit the iteration cap ({max_iters}) on some restart (n={fam.n}, k={fam.k}, p={p})")

    value, x, a = best
    logger.debug(f"MOpN estimate n={fam.n} k={fam.k} p={p}: {value:.6f} after {total_iters} iterations")
    return MOpNEstimate(
        value=value, witness_state=x, witness_A=a, converged=converged_all, iterations=total_iters, history=histories,
    )


def _entropy_polish(kraus: np.ndarray, x: np.ndarray, tol: float):
    """Descent on S(Ψ^c(|x⟩⟨x|)): x ← top eigenvector of M(log σ). Monotone for trace-preserving maps."""
    sigma = complementary_on_vector(kraus, x)
    entropy = von_neumann_entropy(sigma)
    history = [entropy]
    for _ in range(MOE_POLISH_ITERATIONS):
        profile, vecs = eig_herm(sigma)
        log_sigma = (vecs * np.log(np.maximum(profile.values, LOG_FLOOR))) @ vecs.conj().T
        _, candidate = top_eigenpair(kraus, log_sigma, x)
        candidate_sigma = complementary_on_vector(kraus, candidate)
        candidate_entropy = von_neumann_entropy(candidate_sigma)
        if candidate_entropy > entropy - tol:
            if candidate_entropy < entropy:
                x, sigma, entropy = candidate, candidate_sigma, candidate_entropy
                history.append(entropy)
            return entropy, x, True, history
        x, sigma, entropy = candidate, candidate_sigma, candidate_entropy
        history.append(entropy)
    return entropy, x, False, history


def estimate_moe(
    fam: KrausFamily,
    kind: ChannelKind,
    rectifier: Rectifier,
    restarts: int = DEFAULT_RESTARTS,
    seed: SeedSpec = DEFAULT_ESTIMATOR_SEED,
    max_iters: int = MAX_ITERATIONS,
    tol: float = ASCENT_TOL,
) -> MOEEstimate:
    """Minimum output entropy of the rectified channel: p=1.05 surrogate ascent, then entropy polish."""
    if not kind.is_rectified:
        raise DomainError("MOE estimation needs the rectified (trace-preserving) channel")
    surrogate = estimate_mopn(fam, kind, MOE_SURROGATE_P, restarts, max_iters, rectifier, seed, tol)
    kraus = effective_kraus(fam, kind, rectifier)
    value, x, converged, history = _entropy_polish(kraus, surrogate.witness_state, tol)
    logger.debug(f"MOE estimate n={fam.n} k={fam.k}: {value:.6f} (surrogate ‖·‖_p={surrogate.value:.6f})")
    return MOEEstimate(
        value=value, witness_state=x, surrogate_value=surrogate.value, converged=converged, history=history,
    )
