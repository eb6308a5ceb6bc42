"""Dense complex matrix helpers: Hermitian eigen, Schatten norms, entropy, Bell states."""

import logging

import numpy as np
import scipy.linalg
from scipy.special import entr

from config import ENTROPY_TRACE_TOL, HERMITIAN_TOL, PSD_CLAMP_TOL
from errors import DimensionMismatchError, DomainError, EigenSolverError, NotPSDError
from models import SchattenIndex, SpectralProfile

logger = logging.getLogger(__name__)

MAJORIZATION_EXPONENTS = (1.5, 2.0, 3.0, np.inf)


def as_hermitian(m) -> np.ndarray:
    """Check m is square and Hermitian within tolerance; return the symmetrized copy."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DomainError("matrix has non-finite entries")
    m = m.astype(complex, copy=False)
    scale = max(1.0, float(np.abs(m).max(initial=0.0)))
    asym = float(np.abs(m - m.conj().T).max(initial=0.0))
    if asym > HERMITIAN_TOL * scale:
        raise DomainError(f"matrix is not Hermitian (asymmetry {asym:.3e})")
    return 0.5 * (m + m.conj().T)


def eig_herm(m) -> tuple[SpectralProfile, np.ndarray]:
    """Return (eigenvalues non-increasing, U) with m = U diag(λ) U*."""
    h = as_hermitian(m)
    try:
        vals, vecs = scipy.linalg.eigh(h)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise EigenSolverError(h.shape[0], str(e)) from e
    return SpectralProfile.from_eigenvalues(vals[::-1]), vecs[:, ::-1]


def eigvals_herm(m) -> np.ndarray:
    """Eigenvalues only, sorted non-increasing."""
    h = as_hermitian(m)
    try:
        vals = scipy.linalg.eigh(h, eigvals_only=True)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise EigenSolverError(h.shape[0], str(e)) from e
    return vals[::-1]


def _clamp_psd(vals: np.ndarray) -> np.ndarray:
    low = float(vals.min(initial=0.0))
    if low < -PSD_CLAMP_TOL:
        raise NotPSDError(low)
    return np.clip(vals, 0.0, None)


def psd_spectrum(m) -> SpectralProfile:
    """Eigenvalues of a PSD matrix with tiny negatives clamped to 0."""
    return SpectralProfile.from_eigenvalues(_clamp_psd(eigvals_herm(m)), psd=True)


def vector_p_norm(values, p: "SchattenIndex | float") -> float:
    """ℓ_p norm of |values|, scaled by the max entry so large p cannot overflow."""
    p = p.p if isinstance(p, SchattenIndex) else float(p)
    v = np.abs(np.asarray(values, dtype=float))
    top = float(v.max(initial=0.0))
    if top == 0.0:
        return 0.0
    if np.isinf(p):
        return top
    return top * float(np.sum((v / top) ** p)) ** (1.0 / p)


def schatten_norm(m, p: SchattenIndex) -> float:
    """‖m‖_p for PSD m."""
    return vector_p_norm(psd_spectrum(m).values, p)


def von_neumann_entropy(rho) -> float:
    """S(ρ) = −Tr ρ log ρ in nats."""
    vals = psd_spectrum(rho).values
    trace = float(vals.sum())
    if abs(trace - 1.0) > ENTROPY_TRACE_TOL:
        raise DomainError(f"density matrix trace is {trace:.10f}, expected 1")
    return float(entr(vals).sum())


def bell_state(n: int) -> np.ndarray:
    """(1/√n) Σ_i e_i ⊗ e_i as a vector of length n²."""
    if n < 1:
        raise DomainError(f"Bell state needs n >= 1, got {n}")
    b = np.zeros(n * n, dtype=complex)
    b[np.arange(n) * (n + 1)] = 1.0 / np.sqrt(n)
    return b


def partial_trace(m, dims: tuple[int, int], keep: int = 0) -> np.ndarray:
    """Trace out one factor of a bipartite operator on C^{d1} ⊗ C^{d2}."""
    d1, d2 = dims
    m = np.asarray(m)
    if m.shape != (d1 * d2, d1 * d2):
        raise DimensionMismatchError(f"shape {m.shape} does not match dims {dims}")
    t = m.reshape(d1, d2, d1, d2)
    if keep == 0:
        return np.einsum("ajbj->ab", t)
    if keep == 1:
        return np.einsum("iaib->ab", t)
    raise DomainError(f"keep must be 0 or 1, got {keep}")


def holder_dual_maximizer(a, p: SchattenIndex) -> np.ndarray:
    """B ≥ 0 with ‖B‖_q = 1 maximizing Tr[aB], so that Tr[aB] = ‖a‖_p.

    Finite p uses λ(B) = (λ(a)/‖a‖_p)^{p−1} on the eigenvectors of a. For p = ∞
    the maximizer is not unique; the projector onto the top eigenvector is returned.
    """
    profile, vecs = eig_herm(a)
    vals = _clamp_psd(profile.values)
    if vals[0] <= 0.0:
        raise DomainError("Hölder maximizer is undefined for the zero matrix")
    if p.is_infinite:
        top = vecs[:, :1]
        return top @ top.conj().T
    norm = vector_p_norm(vals, p)
    weights = (vals / norm) ** (p.p - 1.0)
    return (vecs * weights) @ vecs.conj().T


def majorization_check(a) -> bool:
    """‖diag(a)‖_p ≤ ‖λ(a)‖_p for p in {1.5, 2, 3, ∞}."""
    h = as_hermitian(a)
    diag = np.sort(np.real(np.diag(h)))[::-1]
    eig = eigvals_herm(h)
    for p in MAJORIZATION_EXPONENTS:
        if vector_p_norm(diag, p) > vector_p_norm(eig, p) + 1e-10:
            logger.warning(f"Majorization fails at p={p} for a {h.shape[0]}x{h.shape[0]} matrix")
            return False
    return True


def random_pure_state(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unit vector in C^n."""
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return x / np.linalg.norm(x)


def random_density(k: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random trace-1 PSD matrix of the given rank (full rank by default)."""
    rank = k if rank is None else rank
    g = rng.standard_normal((k, rank)) + 1j * rng.standard_normal((k, rank))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real
