"""Random CP maps Φ_n, their conjugates, complements, and the rectified channels Ψ_n."""

import logging
import math

import numpy as np

from config import EIGEN_FLOOR, PAIR_CHUNK_ENTRIES, STATE_TRACE_TOL
from errors import (
    DimensionMismatchError,
    DomainError,
    NearSingularFrameError,
    RectifierUnavailableError,
)
from matrixkit import as_hermitian, bell_state, eig_herm
from models import ChannelKind, KrausFamily, Rectifier

logger = logging.getLogger(__name__)


def effective_kraus(fam: KrausFamily, kind: ChannelKind, rectifier: Rectifier | None = None) -> np.ndarray:
    """Stack of K_i with the 1/√k weight folded in: X_i, X̄_i, X_iR or conj(X_iR), over √k."""
    ops = fam.ops
    if kind.is_rectified:
        if rectifier is None:
            raise RectifierUnavailableError("rectified channel requested without a rectifier")
        if rectifier.matrix.shape != (fam.n, fam.n):
            raise DimensionMismatchError(
                f"rectifier is {rectifier.matrix.shape}, family has n={fam.n}"
            )
        ops = ops @ rectifier.matrix
    if kind.conjugated:
        ops = ops.conj()
    return ops / math.sqrt(fam.k)


def _check_state(fam: KrausFamily, rho) -> np.ndarray:
    rho = as_hermitian(rho)
    if rho.shape != (fam.n, fam.n):
        raise DimensionMismatchError(f"input is {rho.shape}, channel acts on n={fam.n}")
    trace = float(np.trace(rho).real)
    if abs(trace - 1.0) > STATE_TRACE_TOL:
        raise DomainError(f"input trace is {trace:.10f}, expected 1")
    return rho


def apply_cp(fam: KrausFamily, kind: ChannelKind, rho, rectifier: Rectifier | None = None) -> np.ndarray:
    """Σ K_i ρ K_i* on C^n."""
    rho = _check_state(fam, rho)
    kraus = effective_kraus(fam, kind, rectifier)
    k, n = fam.k, fam.n
    left = (kraus @ rho).transpose(1, 0, 2).reshape(n, k * n)
    right = kraus.conj().transpose(0, 2, 1).reshape(k * n, n)
    return left @ right


def apply_complementary(fam: KrausFamily, kind: ChannelKind, rho, rectifier: Rectifier | None = None) -> np.ndarray:
    """k×k matrix with entries Tr[K_i ρ K_j*]."""
    rho = _check_state(fam, rho)
    kraus = effective_kraus(fam, kind, rectifier)
    k, n = fam.k, fam.n
    return (kraus @ rho).reshape(k, n * n) @ kraus.reshape(k, n * n).conj().T


def complementary_on_vector(kraus: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Φ^c(|x⟩⟨x|) = V V* with rows V_i = K_i x; kraus is an effective_kraus stack."""
    v = kraus @ x
    return v @ v.conj().T


def cp_on_vector(kraus: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Φ(|x⟩⟨x|) = Σ_i (K_i x)(K_i x)*."""
    v = kraus @ x
    return v.T @ v.conj()


def quadratic_form_matrix(ops: np.ndarray, a) -> np.ndarray:
    """Σ_ij a_ij X_i* X_j for a stack of square matrices."""
    a = np.asarray(a)
    k, n, _ = ops.shape
    if a.shape != (k, k):
        raise DimensionMismatchError(f"coefficient matrix is {a.shape}, family has k={k}")
    mixed = np.tensordot(a, ops, axes=(1, 0))
    return ops.reshape(k * n, n).conj().T @ mixed.reshape(k * n, n)


def quadratic_form_action(ops: np.ndarray, a, x: np.ndarray) -> np.ndarray:
    """(Σ_ij a_ij X_i* X_j) x without forming the n×n matrix."""
    v = ops @ x
    w = np.asarray(a) @ v
    return np.einsum("kji,kj->i", ops.conj(), w)


def build_rectifier(fam: KrausFamily, epsilon: float) -> Rectifier:
    """R = √k (Σ X_i*X_i)^{-1/2}, with the eigenvalue bracket checked for this epsilon."""
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    k, n = fam.k, fam.n
    stacked = fam.ops.reshape(k * n, n)
    frame = stacked.conj().T @ stacked
    profile, vecs = eig_herm(frame)
    w_min = profile.min
    if w_min < EIGEN_FLOOR:
        raise NearSingularFrameError(w_min, n, k)

    root_k = math.sqrt(k)
    inv_sqrt = 1.0 / np.sqrt(profile.values)
    matrix = (vecs * (root_k * inv_sqrt)) @ vecs.conj().T
    matrix = 0.5 * (matrix + matrix.conj().T)
    eigen_min = root_k / math.sqrt(profile.max)
    eigen_max = root_k / math.sqrt(w_min)

    lower = math.sqrt(k * (1.0 - epsilon)) / (root_k + 1.0)
    upper = math.sqrt(k * (1.0 + epsilon)) / (root_k - 1.0)
    holds = lower <= eigen_min and eigen_max <= upper
    if not holds:
        logger.warning(
            f"Rectifier bracket fails: eig(R) in [{eigen_min:.4f}, {eigen_max:.4f}], "
            f"bracket [{lower:.4f}, {upper:.4f}] (n={n}, k={k}, eps={epsilon})"
        )
    return Rectifier(
        matrix=matrix,
        lower_edge=lower,
        upper_edge=upper,
        epsilon=epsilon,
        bracket_holds=holds,
        eigen_min=eigen_min,
        eigen_max=eigen_max,
    )


def stacked_isometry_defect(fam: KrausFamily, rectifier: Rectifier) -> float:
    """max |Σ K_i*K_i − I| for the rectified family; zero up to rounding."""
    kraus = effective_kraus(fam, ChannelKind.rectified(), rectifier)
    stacked = kraus.reshape(fam.k * fam.n, fam.n)
    return float(np.abs(stacked.conj().T @ stacked - np.eye(fam.n)).max())


def pair_output_on_bell(
    fam: KrausFamily,
    kind: ChannelKind,
    rectifier: Rectifier | None = None,
    chunk_entries: int = PAIR_CHUNK_ENTRIES,
) -> np.ndarray:
    """(Φ^c ⊗ Φ̄^c)(|b_n⟩⟨b_n|) as a k²×k² matrix.

    Entry ((i,u),(j,v)) = (1/n) Tr[K_i K_u* K_v K_j*] = (1/n)⟨G_jv, G_iu⟩ with
    G_iu = K_i K_u*. The Gram product is accumulated over slabs of rows of the
    G_iu, holding about chunk_entries block entries (never less than one row) at once.
    The conjugated partner is implied by the pair; pass the plain kind.
    """
    if kind.conjugated:
        raise DomainError("pair output takes the plain channel kind; the conjugate partner is implied")
    kraus = effective_kraus(fam, kind, rectifier)
    k, n = fam.k, fam.n
    rows = max(1, min(n, chunk_entries // (k * k * n)))
    adjoints = kraus.conj().transpose(0, 2, 1)[None, :, :, :]
    out = np.zeros((k * k, k * k), dtype=complex)
    for start in range(0, n, rows):
        slab = np.matmul(kraus[:, None, start:start + rows, :], adjoints)
        flat = slab.reshape(k * k, -1)
        out += flat @ flat.conj().T
    out /= n
    return 0.5 * (out + out.conj().T)


def bell_overlap(pair_out) -> float:
    """⟨b_k| pair_out |b_k⟩."""
    pair_out = np.asarray(pair_out)
    dim = pair_out.shape[0]
    k = math.isqrt(dim)
    if k * k != dim or pair_out.shape != (dim, dim):
        raise DimensionMismatchError(f"pair output of shape {pair_out.shape} is not k²×k²")
    b = bell_state(k)
    value = complex(b.conj() @ pair_out @ b)
    if abs(value.imag) > 1e-10 * max(1.0, abs(value.real)):
        logger.warning(f"Bell overlap has imaginary residue {value.imag:.3e}")
    return value.real
