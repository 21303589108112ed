import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spectregap.bounds import (
    FAIL,
    INDETERMINATE,
    PASS,
    bound_report,
    check,
    check_bracketed,
    gamma_witness,
    perturbation_gap_bound,
    submultiplicativity_check,
    two_block_perturbation,
)
from spectregap.construction import construction_coefficients, rogue_matrix
from spectregap.core import DomainError, NonnegMatrix, named_matrix, random_doubly_stochastic, random_positive
from spectregap.pf import additive_symmetrize, lazify, pf_data
from spectregap.spectral import spectral_summary


def test_check_slack():
    assert check("x", 1.0, 1.0 - 5e-10).status == PASS
    assert check("x", 1.0, 1.0 - 5e-9).status == FAIL
    assert check("x", 1e3, 1e3 * (1 - 5e-10)).status == PASS


def test_bracket_logic():
    assert check_bracketed("lo", 0.1, 0.2, 0.3, "lower").status == PASS
    assert check_bracketed("lo", 0.4, 0.2, 0.3, "lower").status == FAIL
    assert check_bracketed("lo", 0.25, 0.2, 0.3, "lower").status == INDETERMINATE
    assert check_bracketed("up", 0.35, 0.2, 0.3, "upper").status == PASS
    assert check_bracketed("up", 0.1, 0.2, 0.3, "upper").status == FAIL


def test_uniform_report():
    rep = bound_report(named_matrix("uniform_J", 4))
    assert abs(rep.phi - 0.5) < 1e-12 and abs(rep.re_lambda2) < 1e-12
    assert abs(rep.records["fiedler_upper"].rhs - math.sqrt(2)) < 1e-12
    assert abs(rep.records["ds_lower_35n"].lhs - 1 / 140) < 1e-12
    assert rep.passed and rep.records["detailed_balance_cheeger_lo"].status == PASS


def test_rogue_report():
    rep = bound_report(rogue_matrix(9, "rational"))
    assert rep.passed and rep.spectrum_method == "exact_nilpotent"
    assert rep.re_lambda2 == 0 and rep.records["ds_lower_35n"].margin > 0.2


def test_identity_report():
    rep = bound_report(named_matrix("identity", 4))
    assert rep.phi == 0 and abs(rep.re_lambda2 - 1) < 1e-12
    assert rep.records["fiedler_upper"].status == PASS
    assert rep.passed


def test_degenerate_report():
    rep = bound_report(np.array([[1.0, 1.0], [0.0, 1.0]]))
    assert rep.phi == 0 and rep.classification == "reducible_degenerate"
    assert rep.records["general_lower"].status == "not_applicable"
    assert rep.passed


def test_bracket_used_beyond_limit():
    rep = bound_report(rogue_matrix(25))
    assert rep.phi_method == "bracket"
    assert rep.phi_lo <= rep.phi_hi and abs(rep.phi_hi - float(construction_coefficients(25).b)) < 1e-12
    assert not rep.failures()


def test_cycle_sigma_bound_vacuous():
    rep = bound_report(named_matrix("directed_cycle", 6))
    assert rep.records["sigma_lower"].lhs == pytest.approx(0, abs=1e-12)
    assert abs(rep.phi - 1 / 3) < 1e-12 and rep.passed


@given(st.integers(2, 8), st.integers(0, 10_000))
def test_symmetric_cheeger(n, seed):
    M = additive_symmetrize(random_doubly_stochastic(n, seed))
    rep = bound_report(M)
    assert rep.records["detailed_balance_cheeger_lo"].status == PASS
    assert rep.records["detailed_balance_cheeger_hi"].status == PASS


@given(st.integers(3, 10), st.integers(0, 10_000))
def test_general_matrices_pass(n, seed):
    rep = bound_report(random_positive(n, seed))
    assert rep.passed, rep.failures()


@given(st.integers(3, 12), st.integers(0, 10_000))
def test_ds_consistency(n, seed):
    rep = bound_report(random_doubly_stochastic(n, seed))
    assert rep.passed
    assert rep.kappa == 1 / n


def test_gamma_witness():
    g = gamma_witness(4)
    assert g.gamma_upper_witness <= 0.5 and g.gamma_lower_bound == 1 / 140
    g = gamma_witness(100)
    assert g.gamma_upper_witness <= 11 / 120 + 1e-15 < 0.1
    for n in (5, 9, 12, 16, 36):
        g = gamma_witness(n)
        assert g.gamma_lower_bound <= g.gamma_upper_witness <= 1 / math.sqrt(n) + 1e-9
    assert gamma_witness(10).lambda2_route == "schur_witness"


def test_submultiplicativity_examples():
    R = random_doubly_stochastic(6, 4)
    pf = pf_data(R)
    a, b = submultiplicativity_check(R, pf, 1)
    assert abs(a - b) < 1e-12
    C = named_matrix("directed_cycle", 6)
    phi2, twice = submultiplicativity_check(C, pf_data(C), 2)
    assert phi2 == 0 and abs(twice - 2 / 3) < 1e-12
    a, b = submultiplicativity_check(R, pf, 3)
    assert a <= b + 1e-10


@given(st.integers(2, 8), st.integers(0, 10_000), st.integers(2, 4))
def test_submultiplicativity_general(n, seed, k):
    R = random_positive(n, seed)
    a, b = submultiplicativity_check(R, pf_data(R), k)
    assert a <= b + 1e-10


def test_perturbation_bound():
    assert perturbation_gap_bound(0, 8, 1 / 8) == 0
    assert perturbation_gap_bound(0.01, 8, 1 / 8) == pytest.approx(0.3 * (8 + math.log(8)))
    with pytest.raises(DomainError):
        perturbation_gap_bound(0.1, 4, 0)
    A, A0, B = two_block_perturbation(8, 0.0)
    assert abs(spectral_summary(A).spectral_gap) < 1e-12
    for delta in (0.01, 0.1, 0.5):
        A, A0, B = two_block_perturbation(8, delta)
        w = np.full(8, 1 / math.sqrt(8))
        assert abs(np.linalg.norm(B, 2) - 1) < 1e-12 and np.abs(B @ w).max() < 1e-15
        gap = spectral_summary(A).spectral_gap
        assert gap <= perturbation_gap_bound(delta, 8, 1 / 8)
