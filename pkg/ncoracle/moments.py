"""Moments and free cumulants of semicircular / circular systems by brute force over pairings.

Everything here sums over explicit non-crossing partitions, so results are exact when
the coefficient matrix holds Python ints or Fractions and double precision otherwise.
The guards keep the enumeration to certification-sized instances.
"""

import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from config import NC2_MAX_N, ORACLE_MAX_K, ORACLE_MAX_R, ORACLE_MAX_TERMS
from errors import DomainError, SizeGuardError
from models import CoefficientMatrix
from ncoracle.partitions import SetPartition, catalan, enumerate_nc, enumerate_nc2, joins_to_full

logger = logging.getLogger(__name__)

MAX_MOMENTS = 8


class LetterKind(Enum):
    SEMICIRCULAR = "semicircular"
    CIRCULAR = "circular"

    @classmethod
    def parse(cls, value) -> "LetterKind":
        if isinstance(value, cls):
            return value
        text = str(value).strip().lower()
        if text in ("s", "semicircular", "gue"):
            return cls.SEMICIRCULAR
        if text in ("c", "circular", "ge", "ginibre"):
            return cls.CIRCULAR
        raise DomainError(f"unknown letter kind {value!r}")


@dataclass(frozen=True)
class Letter:
    """One free generator s_i, c_i or c_i*; semicircular letters are never starred."""

    index: int
    starred: bool = False
    kind: LetterKind = LetterKind.SEMICIRCULAR

    def __post_init__(self):
        if self.index < 0:
            raise DomainError(f"letter index must be >= 0, got {self.index}")
        if self.kind is LetterKind.SEMICIRCULAR and self.starred:
            object.__setattr__(self, "starred", False)


def _covariance(x: Letter, y: Letter) -> int:
    """κ₂ of two letters: δ_ij for s_i s_j, and δ_ij only across a star for c_i, c_j*."""
    if x.kind is not y.kind or x.index != y.index:
        return 0
    if x.kind is LetterKind.CIRCULAR and x.starred == y.starred:
        return 0
    return 1


def _tree_sum(values: list):
    """Pairwise reduction in a fixed order."""
    if not values:
        return 0
    while len(values) > 1:
        paired = [values[i] + values[i + 1] for i in range(0, len(values) - 1, 2)]
        if len(values) % 2:
            paired.append(values[-1])
        values = paired
    return values[0]


def _pairing_sum(word: tuple[Letter, ...], pairings: list[SetPartition]) -> int:
    total = 0
    for pi in pairings:
        term = 1
        for a, b in pi.blocks:
            term *= _covariance(word[a], word[b])
            if not term:
                break
        total += term
    return total


@lru_cache(maxsize=4096)
def _word_moment(word: tuple[Letter, ...]) -> int:
    if len(word) % 2:
        return 0
    return _pairing_sum(word, enumerate_nc2(len(word)))


def word_moment(word) -> int:
    """φ(word) = Σ over NC₂ pairings of the product of pair covariances."""
    word = tuple(word)
    if len(word) > NC2_MAX_N:
        raise SizeGuardError(f"word length {len(word)} exceeds {NC2_MAX_N}")
    return _word_moment(word)


def _entries(a) -> list[list]:
    if isinstance(a, CoefficientMatrix):
        a = a.matrix
    if isinstance(a, np.ndarray) and a.dtype != object:
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DomainError(f"coefficient matrix must be square, got shape {a.shape}")
        if np.iscomplexobj(a) and not np.any(a.imag):
            a = a.real
        return a.tolist()
    rows = [list(row) for row in a]
    if any(len(row) != len(rows) for row in rows):
        raise DomainError("coefficient matrix must be square")
    return rows


def _letters(kind: LetterKind, k: int) -> list[list[Letter]]:
    """Per factor position the letters y_i* (first) and y_j (second); circular words read c*c."""
    starred = kind is LetterKind.CIRCULAR
    return [[Letter(i, starred, kind) for i in range(k)], [Letter(j, False, kind) for j in range(k)]]


@lru_cache(maxsize=None)
def _support(k: int, adjoints: tuple[bool, ...], kind: LetterKind, connected: bool) -> tuple:
    """Words of a product of quadratic forms with their pairing counts.

    Returns ((index tuple, count), …) where count is the number of (connected) pairings
    whose covariances all equal 1 on that word; for full pairings this is word_moment.
    """
    length = 2 * len(adjoints)
    pairings = enumerate_nc2(length)
    if connected:
        pairings = [pi for pi in pairings if joins_to_full(pi, 2)]
    first, second = _letters(kind, k)
    counts: dict[tuple[int, ...], int] = {}
    for pi in pairings:
        # pair covariances only depend on kind and stars, so check them once per pairing
        probe = [first[0] if pos % 2 == 0 else second[0] for pos in range(length)]
        if any(_covariance(probe[a], probe[b]) == 0 for a, b in pi.blocks):
            continue
        for labels in itertools.product(range(k), repeat=len(pi.blocks)):
            word = [0] * length
            for (a, b), label in zip(pi.blocks, labels):
                word[a] = word[b] = label
            key = tuple(word)
            counts[key] = counts.get(key, 0) + 1
    logger.debug(f"Support k={k} factors={len(adjoints)} {kind.value} connected={connected}: {len(counts)} words")
    return tuple(sorted(counts.items()))


def _coefficient(entries: list[list], indices: tuple[int, ...], adjoints: tuple[bool, ...]):
    """Π a_{u v} for plain factors and conj(a_{v u}) for adjoint ones."""
    value = 1
    for f, adjoint in enumerate(adjoints):
        u, v = indices[2 * f], indices[2 * f + 1]
        value *= entries[v][u].conjugate() if adjoint else entries[u][v]
    return value


def _realify(value):
    if isinstance(value, complex) and abs(value.imag) <= 1e-12 * max(1.0, abs(value.real)):
        return value.real
    return value


def _evaluate(a, adjoints: tuple[bool, ...], kind, connected: bool):
    kind = LetterKind.parse(kind)
    entries = _entries(a)
    k = len(entries)
    if k > ORACLE_MAX_K:
        raise SizeGuardError(f"oracle supports k <= {ORACLE_MAX_K}, got {k}")
    if 2 * len(adjoints) > NC2_MAX_N:
        raise SizeGuardError(f"word length {2 * len(adjoints)} exceeds {NC2_MAX_N}")
    work = catalan(len(adjoints)) * k ** len(adjoints)
    if work > ORACLE_MAX_TERMS:
        raise SizeGuardError(f"support of {work} terms exceeds {ORACLE_MAX_TERMS}")
    terms = [count * _coefficient(entries, indices, adjoints) for indices, count in _support(k, adjoints, kind, connected)]
    return _realify(_tree_sum(terms))


def _check_r(r: int):
    if r < 1:
        raise DomainError(f"r must be >= 1, got {r}")
    if r > ORACLE_MAX_R:
        raise SizeGuardError(f"oracle supports r <= {ORACLE_MAX_R}, got {r}")


def quadratic_form_moment(a, r: int, kind=LetterKind.SEMICIRCULAR):
    """φ(x_A^r) for x_A = Σ a_ij s_i s_j (semicircular) or Σ a_ij c_i* c_j (circular)."""
    _check_r(r)
    return _evaluate(a, (False,) * r, kind, connected=False)


def quadratic_form_cumulant(a, r: int, kind=LetterKind.SEMICIRCULAR):
    """κ_r(x_A, …, x_A) as the sum over pairings connecting all r factors."""
    _check_r(r)
    return _evaluate(a, (False,) * r, kind, connected=True)


def star_moment(a, r: int, kind=LetterKind.SEMICIRCULAR):
    """φ((x_A* x_A)^r); the adjoint factor reads Σ conj(a_ij) y_j* y_i*."""
    _check_r(r)
    return _evaluate(a, (True, False) * r, kind, connected=False)


def _partition_product(pi: SetPartition, cumulants: list):
    value = 1
    for size in pi.block_sizes:
        value *= cumulants[size - 1]
    return value


def cumulant_from_moments(moments) -> list:
    """Möbius inversion of m₁..m_M over NC(n), solved triangularly."""
    moments = list(moments)
    if len(moments) > MAX_MOMENTS:
        raise SizeGuardError(f"at most {MAX_MOMENTS} moments supported, got {len(moments)}")
    cumulants: list = []
    for n, m in enumerate(moments, start=1):
        cumulants.append(0)
        lower = [_partition_product(pi, cumulants) for pi in enumerate_nc(n) if len(pi.blocks) > 1]
        cumulants[-1] = m - _tree_sum(lower)
    return cumulants


def moments_from_cumulants(cumulants) -> list:
    """m_n = Σ_{π∈NC(n)} Π_B κ_{|B|}."""
    cumulants = list(cumulants)
    if len(cumulants) > MAX_MOMENTS:
        raise SizeGuardError(f"at most {MAX_MOMENTS} cumulants supported, got {len(cumulants)}")
    return [_tree_sum([_partition_product(pi, cumulants) for pi in enumerate_nc(n)]) for n in range(1, len(cumulants) + 1)]
