import pytest
from gmpy2 import mpq

from affgaudin.golden import golden_state
from affgaudin.hbar import (HbarConfig, build_sigma_tilde, check_pairwise, check_proof_combinatorics,
                            check_singular_mod_hbar3, combinatorial_prefactors, correction_coefficient,
                            pairwise_closed_form, pairwise_fit, rescale, uniqueness_dimension,
                            witness_coefficient, xi, zeta)
from affgaudin.scalars import ConfigurationError, QExt


def test_closed_form_numbers():
    assert [witness_coefficient(n) for n in (1, 2, 3)] == [-4, mpq(-8, 3), mpq(-12, 5)]
    assert correction_coefficient(1) == 0
    assert correction_coefficient(2) == mpq(20, 3)
    assert zeta(1, 1) == 8
    assert zeta(1, 3) == mpq(16, 3)
    assert combinatorial_prefactors(3) == (12, 4, 12)


@pytest.mark.parametrize("n", range(1, 7))
def test_xi_identity(n):
    assert xi(2 * n - 1) == mpq(n * (2 * n + 1) * (2 * n - 2), 2 * n - 1)


def test_config_validation():
    with pytest.raises(ConfigurationError):
        HbarConfig(cutoff=0)
    with pytest.raises(ConfigurationError):
        HbarConfig(m=2)


def test_rescale_matches_quadratic_density():
    assert rescale(golden_state("sigma1"), 2) == build_sigma_tilde(1)


def test_rescale_rejects_rescaled_input():
    with pytest.raises(ConfigurationError):
        rescale(build_sigma_tilde(1))


def test_truncation_is_reduction_of_exact_quartic():
    exact = rescale(golden_state("sigma3"), 4, cutoff=None)
    tilde = build_sigma_tilde(2)
    for h in (0, 1):
        assert exact.hbar_part(h) == tilde.hbar_part(h).with_regime(exact.regime)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_singular_mod_hbar3(n):
    rep = check_singular_mod_hbar3(n)
    assert rep.invariant
    assert rep.ok


@pytest.mark.parametrize("n", [1, 2])
def test_uniqueness(n):
    res = uniqueness_dimension(n)
    assert res["solution_dimension"] == 1
    assert res["top_dimension"] == 1


@pytest.mark.parametrize("m,n", [(1, 1), (1, 3)])
def test_pairwise_closed_form_exact_for_unit_left_exponent(m, n):
    rep = check_pairwise(m, n)
    assert rep.residual_zero and rep.regular
    rec = rep.record()
    assert set(rec) == {"m", "n", "hbar_cutoff", "term_count_peak", "residual_zero", "regular", "wall_time"}


def test_pairwise_fit_for_left_exponent_three():
    # the B part needs an extra factor m for m > 1
    a, b = pairwise_fit(3, 1)
    z = QExt(zeta(3, 1))
    assert (a / z, b / z) == (QExt(1), QExt(3))


def test_low_cutoff_closed_form_vanishes():
    A, B = pairwise_closed_form(1, 1, cutoff=2)
    assert not A and not B


def test_combinatorics_m3():
    assert check_proof_combinatorics(3).ok
    with pytest.raises(ValueError):
        check_proof_combinatorics(2)
