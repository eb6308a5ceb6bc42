import math

import numpy as np
import pytest

from errors import DomainError
from models import (
    ChannelKind,
    CoefficientMatrix,
    ConvergenceRecord,
    EnsembleFlavor,
    KrausFamily,
    SchattenIndex,
    SeedSpec,
    SpectralProfile,
    TwoLevelProfile,
)


def test_schatten_index_parse_and_conjugate():
    assert SchattenIndex.parse("inf").is_infinite
    assert SchattenIndex.parse("∞").conjugate == 1.0
    assert SchattenIndex.parse("2").conjugate == 2.0
    assert abs(SchattenIndex(3).conjugate - 1.5) < 1e-15
    assert SchattenIndex(2).label() == "2"
    assert SchattenIndex(1.5).label() == "1.5"
    assert str(SchattenIndex.infinity()) == "inf"


@pytest.mark.parametrize("bad", [1, 0.5, "1", "abc", math.nan])
def test_schatten_index_rejects(bad):
    with pytest.raises(DomainError):
        SchattenIndex.parse(bad)


def test_seed_spec_paths():
    root = SeedSpec(7)
    child = root.child(3)
    assert child.path == (0, 3)
    assert child.child(1).path == (0, 3, 1)
    assert child.label() == "7:0/3"
    assert root.child(3) == child
    assert root.child(4) != child


@pytest.mark.parametrize("seed", [-1, 2**64])
def test_seed_spec_range(seed):
    with pytest.raises(DomainError):
        SeedSpec(seed)


def test_flavor_parse():
    assert EnsembleFlavor.parse("GUE") is EnsembleFlavor.GUE
    assert EnsembleFlavor.parse("ginibre") is EnsembleFlavor.GINIBRE
    assert EnsembleFlavor.parse("ge") is EnsembleFlavor.GINIBRE
    with pytest.raises(DomainError):
        EnsembleFlavor.parse("goe")


def test_spectral_profile_sorted_and_clamped():
    profile = SpectralProfile.from_eigenvalues([1.0, -1e-12, 3.0], psd=True)
    assert profile.values.tolist() == [3.0, 1.0, 0.0]
    assert profile.max == 3.0 and profile.min == 0.0
    assert len(profile) == 3
    with pytest.raises(ValueError):
        profile.values[0] = 5.0


def test_channel_kind_conjugate():
    kind = ChannelKind.rectified()
    assert kind.is_rectified
    assert kind.conjugate().conjugated
    assert not ChannelKind.raw().is_rectified


def test_kraus_family_validation():
    with pytest.raises(DomainError):
        KrausFamily(n=3, k=1, ops=np.zeros((1, 3, 3)))
    with pytest.raises(DomainError):
        KrausFamily(n=3, k=2, ops=np.zeros((2, 3, 4)))
    assert KrausFamily(n=3, k=4, ops=np.zeros((4, 3, 3))).scale == 0.25


def test_two_level_levels():
    profile = TwoLevelProfile(alpha=0.7, beta=0.1, k=4, q=1.0)
    assert profile.levels.tolist() == [0.7, 0.1, 0.1, 0.1]
    assert TwoLevelProfile(alpha=0.8, beta=0.6, k=2, q=2.0).levels.tolist() == [0.8, 0.6]


@pytest.mark.parametrize(
    "alpha,beta,k,q",
    [
        (0.9, 0.1, 4, 3.0),   # off the q-sphere
        (0.6, 0.8, 2, 2.0),   # repeated level on top
        (1.2, -0.2, 2, 1.0),
        (1.0, 0.0, 1, 2.0),
    ],
)
def test_two_level_profile_rejects(alpha, beta, k, q):
    with pytest.raises(DomainError):
        TwoLevelProfile(alpha=alpha, beta=beta, k=k, q=q)


def test_coefficient_matrix_validation():
    good = CoefficientMatrix(k=2, matrix=np.eye(2), spectrum=SpectralProfile.from_eigenvalues([1.0, 1.0]))
    assert good.k == 2
    with pytest.raises(DomainError):
        CoefficientMatrix(k=2, matrix=np.eye(3), spectrum=SpectralProfile.from_eigenvalues([1.0, 1.0, 1.0]))
    with pytest.raises(DomainError):
        CoefficientMatrix(k=2, matrix=np.diag([1.0, -1.0]), spectrum=SpectralProfile.from_eigenvalues([1.0, -1.0]))


def test_convergence_record_abs_err_and_dict():
    record = ConvergenceRecord("w_max", n=100, trial=2, observed=9.25, limit=9.0, seed=SeedSpec(5).child(1))
    assert record.abs_err == 0.25
    row = record.to_dict()
    assert row["seed"] == "5:0/1"
    assert row["status"] == "ok"
    assert row["flavor"] == "gue"
