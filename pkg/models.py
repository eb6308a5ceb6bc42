"""Data models for free-channel-lab."""

import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from config import SPHERE_TOL
from errors import DomainError

UINT64_MAX = 2**64 - 1


class EnsembleFlavor(Enum):
    GUE = "gue"
    GINIBRE = "ge"

    @classmethod
    def parse(cls, text: "str | EnsembleFlavor") -> "EnsembleFlavor":
        if isinstance(text, cls):
            return text
        key = str(text).strip().lower()
        if key in ("gue",):
            return cls.GUE
        if key in ("ge", "ginibre"):
            return cls.GINIBRE
        raise DomainError(f"unknown ensemble flavor: {text!r}")


@dataclass(frozen=True)
class SchattenIndex:
    """Schatten exponent p in (1, ∞]; p = math.inf is the exact operator-norm case."""

    p: float

    def __post_init__(self):
        p = float(self.p)
        if math.isnan(p) or p <= 1:
            raise DomainError(f"Schatten index must satisfy p > 1, got {self.p}")
        object.__setattr__(self, "p", p)

    @classmethod
    def infinity(cls) -> "SchattenIndex":
        return cls(math.inf)

    @classmethod
    def parse(cls, text: "str | float | SchattenIndex") -> "SchattenIndex":
        if isinstance(text, cls):
            return text
        if isinstance(text, str):
            key = text.strip().lower()
            if key in ("inf", "infinity", "∞"):
                return cls.infinity()
            try:
                return cls(float(key))
            except ValueError as e:
                raise DomainError(f"cannot parse Schatten index {text!r}") from e
        return cls(float(text))

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.p)

    @property
    def conjugate(self) -> float:
        """Hölder conjugate q with 1/p + 1/q = 1 (q = 1 when p = ∞)."""
        if self.is_infinite:
            return 1.0
        return self.p / (self.p - 1.0)

    def label(self) -> str:
        if self.is_infinite:
            return "inf"
        if self.p.is_integer():
            return str(int(self.p))
        return repr(self.p)

    def __str__(self) -> str:
        return self.label()


@dataclass(frozen=True)
class SeedSpec:
    """A reproducible random stream: master seed plus a path of stream indices."""

    master_seed: int
    stream_index: int = 0
    spawn_key: tuple[int, ...] = ()

    def __post_init__(self):
        if not 0 <= int(self.master_seed) <= UINT64_MAX:
            raise DomainError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}")
        if int(self.stream_index) < 0:
            raise DomainError(f"stream_index must be non-negative, got {self.stream_index}")
        object.__setattr__(self, "spawn_key", tuple(int(i) for i in self.spawn_key))

    def child(self, index: int) -> "SeedSpec":
        return SeedSpec(self.master_seed, index, self.spawn_key + (self.stream_index,))

    @property
    def path(self) -> tuple[int, ...]:
        return self.spawn_key + (self.stream_index,)

    def label(self) -> str:
        return f"{self.master_seed}:" + "/".join(str(i) for i in self.path)

    def to_dict(self) -> dict:
        return {
            "master_seed": self.master_seed,
            "stream_index": self.stream_index,
            "spawn_key": list(self.spawn_key),
        }


@dataclass(frozen=True, eq=False)
class SpectralProfile:
    """Eigenvalues sorted non-increasing."""

    values: np.ndarray

    @classmethod
    def from_eigenvalues(cls, values, psd: bool = False) -> "SpectralProfile":
        vals = np.sort(np.asarray(values, dtype=float).ravel())[::-1]
        if psd:
            vals = np.where((vals < 0) & (vals >= -1e-10), 0.0, vals)
        vals.setflags(write=False)
        return cls(vals)

    @property
    def max(self) -> float:
        return float(self.values[0])

    @property
    def min(self) -> float:
        return float(self.values[-1])

    def __len__(self) -> int:
        return len(self.values)


class ChannelTag(Enum):
    RAW = "raw"              # Φ_n
    RECTIFIED = "rectified"  # Ψ_n


@dataclass(frozen=True)
class ChannelKind:
    tag: ChannelTag = ChannelTag.RAW
    conjugated: bool = False

    @classmethod
    def raw(cls, conjugated: bool = False) -> "ChannelKind":
        return cls(ChannelTag.RAW, conjugated)

    @classmethod
    def rectified(cls, conjugated: bool = False) -> "ChannelKind":
        return cls(ChannelTag.RECTIFIED, conjugated)

    @property
    def is_rectified(self) -> bool:
        return self.tag is ChannelTag.RECTIFIED

    def conjugate(self) -> "ChannelKind":
        return ChannelKind(self.tag, not self.conjugated)


@dataclass(frozen=True, eq=False)
class KrausFamily:
    """k Kraus matrices X_i stored at the ensemble normalization; the 1/k lives in the channel."""

    n: int
    k: int
    ops: np.ndarray
    flavor: EnsembleFlavor = EnsembleFlavor.GUE

    def __post_init__(self):
        if self.k < 2:
            raise DomainError(f"Kraus family needs k >= 2, got {self.k}")
        if self.ops.shape != (self.k, self.n, self.n):
            raise DomainError(
                f"Kraus stack has shape {self.ops.shape}, expected {(self.k, self.n, self.n)}"
            )

    @property
    def scale(self) -> float:
        return 1.0 / self.k


@dataclass(frozen=True, eq=False)
class Rectifier:
    """R = √k W^{-1/2} with the bracket check recorded at construction."""

    matrix: np.ndarray
    lower_edge: float
    upper_edge: float
    epsilon: float
    bracket_holds: bool
    eigen_min: float
    eigen_max: float


@dataclass(frozen=True, eq=False)
class CoefficientMatrix:
    k: int
    matrix: np.ndarray
    spectrum: SpectralProfile

    def __post_init__(self):
        if self.matrix.shape != (self.k, self.k):
            raise DomainError(f"coefficient matrix must be {self.k}x{self.k}, got shape {self.matrix.shape}")
        if len(self.spectrum.values) != self.k or self.spectrum.values.min() < 0:
            raise DomainError("coefficient matrix needs a nonnegative spectrum of length k")


@dataclass(frozen=True)
class TwoLevelProfile:
    """Eigenvalue shape (α, β, …, β) on the q-sphere."""

    alpha: float
    beta: float
    k: int
    q: float
    shape_proven: bool = True  # two-level reduction is proven for q >= 3

    def __post_init__(self):
        if self.k < 2 or self.q < 1:
            raise DomainError(f"two-level profile needs k >= 2 and q >= 1, got k={self.k}, q={self.q}")
        if self.beta < 0 or self.alpha < self.beta - SPHERE_TOL:
            raise DomainError(f"two-level profile needs alpha >= beta >= 0, got ({self.alpha}, {self.beta})")
        norm = self.alpha**self.q + (self.k - 1) * self.beta**self.q
        if abs(norm - 1.0) > SPHERE_TOL:
            raise DomainError(f"two-level profile is off the q-sphere: alpha^q + (k-1) beta^q = {norm}")

    @property
    def levels(self) -> np.ndarray:
        return np.array([self.alpha] + [self.beta] * (self.k - 1))


@dataclass
class ViolationReport:
    k: int
    p: str
    form: str                      # 'MOpN' | 'MOpN-rectified' | 'MOE'
    single_bound: float            # MOpN: single-channel upper bound; MOE: summed single lower bounds
    pair_bound: float              # MOpN: Bell-pair lower bound; MOE: pair entropy ceiling
    violated: bool
    margin: float                  # MOpN: pair − single²; MOE: gap
    lower_scaled: Optional[float] = None   # k^{2p}·pair^p
    upper_scaled: Optional[float] = None   # k^{2p}·single^{2p}
    minimal_k: Optional[int] = None        # MOE: first k with a positive gap

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ConvergenceRecord:
    quantity: str
    n: int
    trial: int
    observed: float
    limit: float
    seed: SeedSpec
    flavor: str = EnsembleFlavor.GUE.value
    within_tolerance: Optional[bool] = None
    status: str = "ok"             # "failed": the trial aborted and observed holds the diagnostic value
    abs_err: float = field(init=False)

    def __post_init__(self):
        self.abs_err = abs(self.observed - self.limit)

    def to_dict(self) -> dict:
        return {
            "quantity": self.quantity,
            "flavor": self.flavor,
            "n": self.n,
            "trial": self.trial,
            "observed": self.observed,
            "limit": self.limit,
            "abs_err": self.abs_err,
            "within_tolerance": self.within_tolerance,
            "status": self.status,
            "seed": self.seed.label(),
        }
