import numpy as np
import pytest

from channels import (
    apply_complementary,
    apply_cp,
    bell_overlap,
    build_rectifier,
    complementary_on_vector,
    cp_on_vector,
    effective_kraus,
    pair_output_on_bell,
    quadratic_form_action,
    quadratic_form_matrix,
    stacked_isometry_defect,
)
from ensembles import generator, sample_kraus_family
from errors import DimensionMismatchError, DomainError, NearSingularFrameError, RectifierUnavailableError
from freelimits import bell_pair_limit
from matrixkit import bell_state, partial_trace, random_density, random_pure_state
from models import ChannelKind, EnsembleFlavor, KrausFamily, SeedSpec


@pytest.fixture
def family():
    return sample_kraus_family(8, 3, EnsembleFlavor.GUE, SeedSpec(101))


def test_outputs_share_the_trace(family):
    rho = random_density(8, generator(SeedSpec(1)))
    out = apply_cp(family, ChannelKind.raw(), rho)
    comp = apply_complementary(family, ChannelKind.raw(), rho)
    w = quadratic_form_matrix(family.ops, np.eye(3))
    assert abs(np.trace(out) - np.trace(w @ rho) / 3) < 1e-12
    assert abs(np.trace(out) - np.trace(comp)) < 1e-12
    assert np.abs(comp - comp.conj().T).max() < 1e-12


def test_vector_forms_match(family):
    x = random_pure_state(8, generator(SeedSpec(2)))
    xx = np.outer(x, x.conj())
    kraus = effective_kraus(family, ChannelKind.raw())
    assert np.abs(complementary_on_vector(kraus, x) - apply_complementary(family, ChannelKind.raw(), xx)).max() < 1e-12
    assert np.abs(cp_on_vector(kraus, x) - apply_cp(family, ChannelKind.raw(), xx)).max() < 1e-12


def test_conjugate_channel(family):
    x = random_pure_state(8, generator(SeedSpec(3)))
    xx = np.outer(x, x.conj())
    plain = apply_cp(family, ChannelKind.raw(), xx)
    conj = apply_cp(family, ChannelKind.raw(conjugated=True), xx.conj())
    assert np.abs(conj - plain.conj()).max() < 1e-12


def test_quadratic_form_action(family):
    rng = generator(SeedSpec(4))
    a = 3 * random_density(3, rng)
    x = random_pure_state(8, rng)
    m = quadratic_form_matrix(family.ops, a)
    loop = sum(a[i, j] * family.ops[i].conj().T @ family.ops[j] for i in range(3) for j in range(3))
    assert np.abs(m - loop).max() < 1e-12
    assert np.abs(quadratic_form_action(family.ops, a, x) - m @ x).max() < 1e-12
    # Tr[Φ^c(|x⟩⟨x|) A] = ⟨x, M(A) x⟩ with the 1/k in the Kraus stack
    kraus = effective_kraus(family, ChannelKind.raw())
    lhs = np.trace(complementary_on_vector(kraus, x) @ a)
    assert abs(lhs - np.vdot(x, quadratic_form_matrix(kraus, a) @ x)) < 1e-12
    with pytest.raises(DimensionMismatchError):
        quadratic_form_matrix(family.ops, np.eye(2))


def test_state_checks(family):
    with pytest.raises(DomainError):
        apply_cp(family, ChannelKind.raw(), np.eye(8))
    with pytest.raises(DimensionMismatchError):
        apply_cp(family, ChannelKind.raw(), np.eye(4) / 4)
    with pytest.raises(RectifierUnavailableError):
        effective_kraus(family, ChannelKind.rectified())


def test_rectifier_makes_a_channel():
    fam = sample_kraus_family(40, 4, EnsembleFlavor.GUE, SeedSpec(5))
    rectifier = build_rectifier(fam, 0.3)
    assert stacked_isometry_defect(fam, rectifier) < 1e-10
    assert np.abs(rectifier.matrix - rectifier.matrix.conj().T).max() < 1e-12
    rho = random_density(40, generator(SeedSpec(6)))
    out = apply_cp(fam, ChannelKind.rectified(), rho, rectifier)
    assert abs(np.trace(out).real - 1.0) < 1e-10
    comp = apply_complementary(fam, ChannelKind.rectified(), rho, rectifier)
    assert abs(np.trace(comp).real - 1.0) < 1e-10


def test_rectifier_bracket():
    fam = sample_kraus_family(200, 9, EnsembleFlavor.GUE, SeedSpec(7))
    rectifier = build_rectifier(fam, 0.3)
    assert rectifier.bracket_holds
    assert rectifier.lower_edge <= rectifier.eigen_min <= rectifier.eigen_max <= rectifier.upper_edge


def test_rectifier_errors(family):
    with pytest.raises(DomainError):
        build_rectifier(family, 0.0)
    with pytest.raises(DomainError):
        build_rectifier(family, 1.0)
    dead = KrausFamily(n=3, k=2, ops=np.zeros((2, 3, 3), dtype=complex))
    with pytest.raises(NearSingularFrameError):
        build_rectifier(dead, 0.3)


def test_pair_output_matches_tensor_product():
    fam = sample_kraus_family(3, 2, EnsembleFlavor.GINIBRE, SeedSpec(8))
    kraus = effective_kraus(fam, ChannelKind.raw())
    b = bell_state(3)
    rows = np.array([np.kron(kraus[i], kraus[u].conj()) @ b for i in range(2) for u in range(2)])
    brute = rows @ rows.conj().T
    assert np.abs(pair_output_on_bell(fam, ChannelKind.raw()) - brute).max() < 1e-12


def test_pair_output_rectified():
    fam = sample_kraus_family(30, 3, EnsembleFlavor.GUE, SeedSpec(9))
    rectifier = build_rectifier(fam, 0.3)
    kind = ChannelKind.rectified()
    pair = pair_output_on_bell(fam, kind, rectifier)
    assert abs(np.trace(pair).real - 1.0) < 1e-10
    assert np.linalg.eigvalsh(pair).min() > -1e-12
    reduced = partial_trace(pair, (3, 3), keep=0)
    single = apply_complementary(fam, kind, np.eye(30) / 30, rectifier)
    assert np.abs(reduced - single).max() < 1e-10


def test_bell_overlap_of_limit():
    for k in (2, 3, 5):
        assert abs(bell_overlap(bell_pair_limit(k)) - (1 / k + 1 / k**2)) < 1e-14
    with pytest.raises(DimensionMismatchError):
        bell_overlap(np.eye(5))


def test_rank_one_outputs_share_nonzero_spectrum():
    fam = sample_kraus_family(32, 4, EnsembleFlavor.GUE, SeedSpec(10))
    kraus = effective_kraus(fam, ChannelKind.raw())
    rng = generator(SeedSpec(11))
    worst = 0.0
    for _ in range(1000):
        x = random_pure_state(32, rng)
        direct = np.linalg.eigvalsh(cp_on_vector(kraus, x))[::-1][:4]
        comp = np.linalg.eigvalsh(complementary_on_vector(kraus, x))[::-1]
        worst = max(worst, np.abs(direct - comp).max() / max(1.0, comp[0]))
    assert worst < 1e-10


@pytest.mark.parametrize("flavor", [EnsembleFlavor.GUE, EnsembleFlavor.GINIBRE])
def test_outputs_are_positive_on_pure_inputs(flavor):
    fam = sample_kraus_family(24, 3, flavor, SeedSpec(12))
    kraus = effective_kraus(fam, ChannelKind.raw())
    rng = generator(SeedSpec(13))
    lowest = min(
        min(np.linalg.eigvalsh(cp_on_vector(kraus, x)).min(), np.linalg.eigvalsh(complementary_on_vector(kraus, x)).min())
        for x in (random_pure_state(24, rng) for _ in range(1000))
    )
    assert lowest >= -1e-10


def test_pair_output_slabs_agree():
    fam = sample_kraus_family(20, 3, EnsembleFlavor.GUE, SeedSpec(14))
    rectifier = build_rectifier(fam, 0.3)
    for kind, rect in ((ChannelKind.raw(), None), (ChannelKind.rectified(), rectifier)):
        whole = pair_output_on_bell(fam, kind, rect)
        one_row = pair_output_on_bell(fam, kind, rect, chunk_entries=1)
        uneven = pair_output_on_bell(fam, kind, rect, chunk_entries=9 * 20 * 7)
        assert np.abs(whole - one_row).max() < 1e-12
        assert np.abs(whole - uneven).max() < 1e-12


def test_pair_output_rejects_conjugated_kind(family):
    with pytest.raises(DomainError):
        pair_output_on_bell(family, ChannelKind.raw(conjugated=True))
