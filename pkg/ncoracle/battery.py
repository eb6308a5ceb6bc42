"""Self-test battery behind `lab.py nc-verify`."""

import logging
import math
from collections.abc import Callable

import numpy as np

from config import PROBE_SEED
from ensembles import generator
from matrixkit import random_density
from models import SeedSpec
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
from ncoracle.partitions import all_pairings_parity_respecting, catalan, enumerate_nc, enumerate_nc2

logger = logging.getLogger(__name__)

RTOL = 1e-10


def fourth_moment_expected(i: int, j: int, u: int, v: int) -> int:
    """φ(x_i x_j* x_u x_v*): 2, 1 or 0 by the index pattern."""
    if i == j == u == v:
        return 2
    if (i == j and u == v) or (i == v and j == u):
        return 1
    return 0


def narayana_moments(rate, count: int) -> list:
    """Marchenko–Pastur moments Σ_j N(m, j) λ^j."""
    return [
        sum(math.comb(m, j) * math.comb(m, j - 1) // m * rate**j for j in range(1, m + 1))
        for m in range(1, count + 1)
    ]


def _close(a, b, scale=1.0) -> bool:
    return abs(a - b) <= RTOL * max(1.0, abs(scale))


def _catalan_counts() -> tuple[bool, str]:
    bad = [n for n in range(1, 11) if len(enumerate_nc(n)) != catalan(n)]
    bad += [n for n in range(2, 17, 2) if len(enumerate_nc2(n)) != catalan(n // 2)]
    return not bad, f"mismatched sizes: {bad}" if bad else "NC(1..10), NC2(2..16)"


def _no_crossings() -> tuple[bool, str]:
    crossing = sum(pi.is_crossing for n in range(1, 9) for pi in enumerate_nc(n))
    return crossing == 0, f"{crossing} crossing partitions enumerated"


def _parity() -> tuple[bool, str]:
    bad = [n for n in range(2, 17, 2) if not all_pairings_parity_respecting(n)]
    return not bad, f"failing n: {bad}" if bad else "n = 2..16"


def _fourth_moments() -> tuple[bool, str]:
    misses = 0
    for kind in LetterKind:
        for i, j, u, v in np.ndindex(3, 3, 3, 3):
            word = [Letter(i, False, kind), Letter(j, True, kind), Letter(u, False, kind), Letter(v, True, kind)]
            misses += word_moment(word) != fourth_moment_expected(i, j, u, v)
    return misses == 0, f"{misses} table entries differ"


def _random_psd(rng, k: int) -> np.ndarray:
    return k * random_density(k, rng)


def _quadratic_forms(samples: int, rng) -> tuple[bool, str]:
    """Moments of s_A against Σ_{π∈NC(r)} Π Tr A^|B|, and both cumulant routes against Tr A^r."""
    failures = 0
    for s in range(samples):
        a = _random_psd(rng, 2 + s % 2)
        lam = np.linalg.eigvalsh(a)
        traces = [float(np.sum(lam**r)) for r in range(1, 5)]
        expected = moments_from_cumulants(traces)
        moments = [quadratic_form_moment(a, r) for r in range(1, 5)]
        inverted = cumulant_from_moments(moments)
        for r in range(4):
            scale = expected[r]
            failures += not _close(moments[r], expected[r], scale)
            failures += not _close(inverted[r], traces[r], scale)
            failures += not _close(quadratic_form_cumulant(a, r + 1), traces[r], scale)
            failures += not _close(quadratic_form_moment(a, r + 1, LetterKind.CIRCULAR), moments[r], scale)
    return failures == 0, f"{failures} mismatches over {samples} matrices"


def _star_moments(samples: int, rng) -> tuple[bool, str]:
    failures = 0
    for _ in range(samples):
        a = _random_psd(rng, 2)
        for r in range(1, 4):
            s_value = star_moment(a, r, LetterKind.SEMICIRCULAR)
            failures += not _close(s_value, star_moment(a, r, LetterKind.CIRCULAR), s_value)
    return failures == 0, f"{failures} mismatches over {samples} matrices"


def _mp_cumulants() -> tuple[bool, str]:
    ok = True
    for rate in (1, 2, 3):
        moments = narayana_moments(rate, 6)
        ok &= moments_from_cumulants([rate] * 6) == moments
        ok &= cumulant_from_moments(moments) == [rate] * 6
    semicircle = cumulant_from_moments([0, 1, 0, 2, 0, 5])
    ok &= semicircle == [0, 1, 0, 0, 0, 0]
    return bool(ok), "Marchenko–Pastur rates 1..3 and the semicircle"


def run_battery(samples: int = 100, seed: int = PROBE_SEED) -> list[dict]:
    """Each check returns a row {check, passed, detail}."""
    rng = generator(SeedSpec(seed))
    checks: list[tuple[str, Callable[[], tuple[bool, str]]]] = [
        ("catalan_counts", _catalan_counts),
        ("non_crossing", _no_crossings),
        ("parity_pairings", _parity),
        ("fourth_moment_table", _fourth_moments),
        ("quadratic_form_moments", lambda: _quadratic_forms(samples, rng)),
        ("star_moments_s_vs_c", lambda: _star_moments(max(1, samples // 10), rng)),
        ("moment_cumulant_inversion", _mp_cumulants),
    ]
    rows = []
    for name, check in checks:
        passed, detail = check()
        level = logging.INFO if passed else logging.ERROR
        logger.log(level, f"{name}: {'ok' if passed else 'FAILED'} ({detail})")
        rows.append({"check": name, "passed": bool(passed), "detail": detail})
    return rows
