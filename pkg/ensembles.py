"""Seeded GUE / Ginibre sampling at the 1/n variance normalization.

Streams are numpy ``Philox`` generators keyed by ``SeedSequence(master_seed,
spawn_key=path)``, so any stream can be drawn without draining another.
Gaussians come from ``Generator.standard_normal`` (ziggurat); this pair is the
frozen generation method.
"""

import logging
import secrets

import numpy as np

from errors import DomainError
from models import EnsembleFlavor, KrausFamily, SeedSpec

logger = logging.getLogger(__name__)


def generator(seed: SeedSpec) -> np.random.Generator:
    """Independent Philox stream for this seed path."""
    sequence = np.random.SeedSequence(seed.master_seed, spawn_key=seed.path)
    return np.random.Generator(np.random.Philox(sequence))


def draw_master_seed() -> int:
    """Fresh 64-bit master seed from OS entropy."""
    return secrets.randbits(64)


def _standard_complex(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def sample_gue(n: int, seed: SeedSpec) -> np.ndarray:
    """GUE matrix: diagonal N(0, 1/n), off-diagonal Re/Im parts N(0, 1/(2n))."""
    if n < 1:
        raise DomainError(f"matrix size must be >= 1, got {n}")
    g = _standard_complex(generator(seed), n)
    return (g + g.conj().T) / (2.0 * np.sqrt(n))


def sample_ginibre(n: int, seed: SeedSpec) -> np.ndarray:
    """Ginibre matrix: every Re/Im part independent N(0, 1/(2n))."""
    if n < 1:
        raise DomainError(f"matrix size must be >= 1, got {n}")
    return _standard_complex(generator(seed), n) / np.sqrt(2.0 * n)


def ginibre_from_gue(s: np.ndarray, s_prime: np.ndarray) -> np.ndarray:
    """C = (S + iS')/√2 for two independent GUE matrices."""
    return (s + 1j * s_prime) / np.sqrt(2.0)


SAMPLERS = {
    EnsembleFlavor.GUE: sample_gue,
    EnsembleFlavor.GINIBRE: sample_ginibre,
}


def sample_kraus_family(n: int, k: int, flavor: EnsembleFlavor, seed: SeedSpec) -> KrausFamily:
    """k independent matrices of one flavor; operator i uses stream seed.child(i)."""
    if k < 2:
        raise DomainError(f"Kraus family needs k >= 2, got {k}")
    flavor = EnsembleFlavor.parse(flavor)
    sampler = SAMPLERS[flavor]
    ops = np.stack([sampler(n, seed.child(i)) for i in range(k)])
    logger.debug(f"Sampled {flavor.value} family n={n} k={k} seed={seed.label()}")
    return KrausFamily(n=n, k=k, ops=ops, flavor=flavor)
