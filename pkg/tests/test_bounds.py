import math

import numpy as np
import pytest

from errors import DimensionMismatchError, DomainError
from freelimits import (
    bell_pair_limit,
    bell_pair_lower_bound,
    f_limit,
    haar_pair_limit,
    isotropic_lower_bound,
    limit_mopn,
    low_p_checks,
    minimal_violating_k,
    moe_gap,
    moe_minimal_violating_k,
    mopn_transfer_window,
    multiplicativity_verdict,
    quadratic_entropy_bound,
    rectified_multiplicativity_verdict,
    single_channel_upper_bound,
    violation_rows,
)
from matrixkit import schatten_norm
from models import SchattenIndex


@pytest.mark.parametrize("p,expected", [(2, 153), (3, 23), ("inf", 16)])
def test_minimal_violating_k(p, expected):
    assert minimal_violating_k(p) == expected


@pytest.mark.parametrize("p", [1.4, 1.6])
def test_no_violation_at_small_p(p):
    assert minimal_violating_k(p) is None


def test_verdict_at_infinity():
    verdict = multiplicativity_verdict(16, "inf")
    assert verdict.single_bound == 0.25
    assert verdict.pair_bound == 17 / 256
    assert verdict.violated
    # k = 15 is the equality case
    assert not multiplicativity_verdict(15, "inf").violated


def test_verdict_scaled_forms_agree():
    for k in (10, 50, 1000):
        for p in (2.0, 3.0, 5.0):
            verdict = multiplicativity_verdict(k, p)
            assert (verdict.lower_scaled > verdict.upper_scaled) == verdict.violated


def test_pair_bound_is_the_limit_norm():
    for k in (2, 3, 6):
        for p in (1.5, 2.0, 4.0, math.inf):
            norm = schatten_norm(bell_pair_limit(k), SchattenIndex(p))
            assert abs(norm - bell_pair_lower_bound(k, p)) < 1e-12


def test_single_bound_vectorized():
    ks = np.arange(2, 50)
    table = single_channel_upper_bound(ks, 3.0)
    assert np.allclose(table, [single_channel_upper_bound(int(k), 3.0) for k in ks], rtol=0, atol=1e-15)
    with pytest.raises(DomainError):
        single_channel_upper_bound(1, 2.0)


def test_isotropic_lower_bound():
    for k in (2, 5, 30):
        for p in (1.2, 2.0, 3.0):
            q = p / (p - 1)
            assert abs(isotropic_lower_bound(k, p) - f_limit(np.eye(k) * k ** (-1 / q))[0] / k) < 1e-9


def test_violation_rows_flag_first_once():
    frames = list(violation_rows(3, 2, 100, chunk=10))
    assert len(frames) == 10
    table = np.concatenate([f["first_violation"].to_numpy() for f in frames])
    ks = np.concatenate([f["k"].to_numpy() for f in frames])
    assert table.sum() == 1
    assert ks[table][0] == 23
    with pytest.raises(DomainError):
        next(violation_rows(3, 5, 4))


def test_rectified_verdict():
    verdict = rectified_multiplicativity_verdict(10**4, "inf")
    assert verdict.form == "MOpN-rectified"
    assert verdict.violated
    assert not rectified_multiplicativity_verdict(16, "inf").violated


def test_transfer_window():
    low, high = mopn_transfer_window(16, 1 / 16)
    assert low < 1 < high
    assert abs(low - 0.6) < 1e-12
    assert abs(high - 17 / 9) < 1e-12
    low2, high2 = mopn_transfer_window(16, 1 / 16, m=2)
    assert abs(low2 - low**2) < 1e-15 and abs(high2 - high**2) < 1e-12


def test_moe_threshold():
    assert moe_minimal_violating_k() == 486751282
    assert moe_gap(486751282).violated
    assert moe_gap(100).minimal_k == 486751282
    assert moe_gap(100).to_dict()["minimal_k"] == 486751282
    assert not moe_gap(486751281).violated
    assert not moe_gap(10**6).violated
    assert moe_minimal_violating_k(10**6) is None
    with pytest.raises(DomainError):
        moe_gap(1)


def test_quadratic_entropy_bound_at_identity():
    assert abs(quadratic_entropy_bound(np.eye(5) / 5) - math.log(5)) < 1e-15
    with pytest.raises(DomainError):
        quadratic_entropy_bound(np.eye(5))
    with pytest.raises(DimensionMismatchError):
        quadratic_entropy_bound(np.ones((2, 3)) / 4)


def test_haar_contrast_formula():
    for k in (2, 3, 7):
        for p in (1.1, 1.3, 1.5):
            norm_p = schatten_norm(haar_pair_limit(k), SchattenIndex(p)) ** p
            contrast = (k ** (-1 + 1 / p)) ** (2 * p) - norm_p
            assert abs(contrast - k ** (-2 * p) * (k - k**p)) < 1e-12


def test_low_p_checks():
    report = low_p_checks()
    assert report.passed
    assert len(report.table) == 10 * 10_000
    assert report.table.loc[report.table["k"] == 1, "haar_contrast"].isna().all()
    with pytest.raises(DomainError):
        low_p_checks(p_grid=[1.6])


@pytest.mark.parametrize("k", [50, 100, 200])
@pytest.mark.parametrize("p", [2, 3])
def test_single_bound_dominates_limit(k, p):
    value, _ = limit_mopn(k, p)
    assert single_channel_upper_bound(k, p) >= value
