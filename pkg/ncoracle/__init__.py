"""Brute-force non-crossing oracle for moments and free cumulants."""

from ncoracle.moments import (
    Letter,
    LetterKind,
    cumulant_from_moments,
    moments_from_cumulants,
    quadratic_form_cumulant,
    quadratic_form_moment,
    star_moment,
    word_moment,
)
from ncoracle.partitions import (
    SetPartition,
    all_pairings_parity_respecting,
    catalan,
    enumerate_nc,
    enumerate_nc2,
    is_parity_respecting,
    joins_to_full,
)

__all__ = [
    "Letter",
    "LetterKind",
    "SetPartition",
    "all_pairings_parity_respecting",
    "catalan",
    "cumulant_from_moments",
    "enumerate_nc",
    "enumerate_nc2",
    "is_parity_respecting",
    "joins_to_full",
    "moments_from_cumulants",
    "quadratic_form_cumulant",
    "quadratic_form_moment",
    "star_moment",
    "word_moment",
]
