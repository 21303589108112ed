import math

import numpy as np
import pytest
import scipy.linalg
from fractions import Fraction
from hypothesis import given, strategies as st

from spectregap.construction import de_bruijn, rogue_matrix
from spectregap.core import DomainError, named_matrix, random_doubly_stochastic, random_positive
from spectregap.expansion import phi_exact
from spectregap.pf import additive_symmetrize, balance, pf_data
from spectregap.spectral import (
    EXACT_NILPOTENT,
    deflated_exact,
    nilpotency_index,
    operator_norm,
    schur_decompose,
    spectral_summary,
    triangular_mix_power,
    triangular_mix_power_loose,
    triangular_power_bound,
)

from conftest import multiset_close


def test_schur_basic():
    f = schur_decompose(np.eye(3))
    np.testing.assert_allclose(f.T, np.eye(3), atol=1e-14)
    M = additive_symmetrize(random_doubly_stochastic(6, 2)).to_float()
    f = schur_decompose(M)
    assert np.abs(np.triu(f.T, 1)).max() <= 1e-8
    assert f.unitarity_residual <= 1e-10 and f.reconstruction_residual <= 1e-8 * np.abs(M).max()


@given(st.integers(2, 12), st.integers(0, 5000))
def test_schur_diagonal_matches_eig(n, seed):
    a = random_positive(n, seed).to_float()
    f = schur_decompose(a)
    assert np.abs(np.tril(f.T, -1)).max() <= 1e-12
    assert multiset_close(np.diag(f.T), np.linalg.eigvals(a), 1e-8)


def test_summary_uniform():
    s = spectral_summary(named_matrix("uniform_J", 5))
    assert abs(s.lambda2) < 1e-12 and s.sigma2 < 1e-12 and abs(s.spectral_gap - 1) < 1e-12


def test_summary_cycle():
    s = spectral_summary(named_matrix("directed_cycle", 4))
    assert multiset_close(s.nontrivial_eigs, [-1, 1j, -1j], 1e-12)
    assert abs(s.lambda2 - 1j) < 1e-12  # tie at real part 0 resolved to +i
    assert abs(abs(s.lambda_m) - 1) < 1e-12 and abs(s.sigma2 - 1) < 1e-12


def test_summary_rogue_singular_values():
    s = spectral_summary(rogue_matrix(16))
    assert abs(s.sigma2 - 5 / 6) <= 1e-8


def test_rogue_zero_spectrum_is_certified_exactly():
    # the float eigensolver cannot resolve a nilpotent block of size n-1;
    # the rational matrix is certified instead
    s = spectral_summary(rogue_matrix(16, "rational"))
    assert s.method == EXACT_NILPOTENT and s.nilpotency_index == 15
    assert abs(s.lambda2) == 0
    s9 = spectral_summary(rogue_matrix(9, "rational"))
    assert np.all(s9.nontrivial_eigs == 0)


@given(st.integers(2, 10), st.integers(0, 5000))
def test_deflation_matches_full_spectrum(n, seed):
    R = random_positive(n, seed)
    A, w = balance(R, pf_data(R))
    s = spectral_summary(A, w)
    full = np.linalg.eigvals(A.to_float())
    assert multiset_close(np.append(s.nontrivial_eigs, 1.0), full, 1e-8)
    assert s.deflation_residual <= 1e-10
    assert all(s.lambda2.real >= z.real - 1e-12 for z in s.nontrivial_eigs)
    assert all(abs(s.lambda_m) >= abs(z) - 1e-12 for z in s.nontrivial_eigs)
    assert 0 <= s.spectral_gap <= 2
    assert abs(s.singular_values[0] - 1) <= 1e-8


@given(st.integers(3, 9), st.integers(0, 5000))
def test_gap_zero_iff_phi_zero(n, seed):
    rng = np.random.default_rng(seed)
    R = random_doubly_stochastic(n, seed)
    if seed % 2:
        k = int(rng.integers(1, n))
        a = scipy.linalg.block_diag(random_doubly_stochastic(k, seed).to_float() if k > 1 else np.eye(1),
                                    random_doubly_stochastic(n - k, seed + 1).to_float() if n - k > 1 else np.eye(1))
        R = a
    s = spectral_summary(R)
    assert np.abs(s.nontrivial_eigs).max() <= 1 + 1e-8
    phi = phi_exact(R, pf_data(R)).phi
    assert (abs(s.lambda2 - 1) <= 1e-8) == (phi <= 1e-12)


def test_cycle_sigma_weak():
    for n in (6, 8):
        C = named_matrix("directed_cycle", n)
        assert abs(spectral_summary(C).sigma2 - 1) < 1e-12
        assert abs(phi_exact(C, pf_data(C)).phi - 2 / n) < 1e-12


@given(st.integers(2, 10), st.integers(0, 5000))
def test_symmetric_sigma_equals_modulus(n, seed):
    M = additive_symmetrize(random_doubly_stochastic(n, seed)).to_float()
    sv = np.sort(np.linalg.svd(M, compute_uv=False))
    assert np.allclose(sv, np.sort(np.abs(np.linalg.eigvalsh(M))), atol=1e-8)


def test_nilpotency_index():
    N = np.zeros((4, 4), dtype=object)
    N[:, :] = Fraction(0)
    N[0, 1] = N[1, 2] = N[2, 3] = Fraction(7, 3)
    assert nilpotency_index(N) == 4
    assert nilpotency_index(deflated_exact(np.eye(3))) is None
    J3 = np.full((3, 3), Fraction(1, 3), dtype=object)
    assert nilpotency_index(deflated_exact(J3)) == 1
    # float 1/3 is not exactly 1/3, so the float J_3 is not certified
    assert nilpotency_index(deflated_exact(named_matrix("uniform_J", 3))) is None
    for k in range(1, 6):
        assert nilpotency_index(deflated_exact(de_bruijn(k))) == k
    # float rounding of the construction destroys exact nilpotency
    assert nilpotency_index(deflated_exact(rogue_matrix(9))) is None


def test_operator_norm():
    a = random_positive(300, 1).to_float()
    assert abs(operator_norm(a) - np.linalg.norm(a, 2)) <= 1e-8 * np.linalg.norm(a, 2)


def test_triangular_power_bound_formula():
    assert triangular_power_bound(1, 1.0, 0.5, 3) == pytest.approx(1.0, rel=1e-12)
    assert triangular_power_bound(3, 1.5, 1.0, 3) == pytest.approx(3 * 1.5**3 * math.comb(6, 3), rel=1e-12)
    assert triangular_power_bound(3, 1.0, 0.0, 5) == 0.0
    assert triangular_power_bound(3, 1.0, 0.0, 2) == math.inf
    assert triangular_power_bound(4, 1.0, 0.9, 2000) == pytest.approx(4 * math.comb(2004, 4) * 0.9**1996, rel=1e-9)
    with pytest.raises(DomainError):
        triangular_power_bound(3, 0.9, 0.5, 2)


def test_triangular_mix_power():
    assert triangular_mix_power(4, 0.0, 0.1) == 20
    k0 = triangular_mix_power(6, 0.0, 0.01)
    assert abs(triangular_mix_power(6, 0.5, 0.01) - 2 * k0) <= 1
    for n in range(1, 30):
        assert triangular_mix_power(n, 0.3, 0.01) <= triangular_mix_power_loose(n, 0.3, 0.01)
    with pytest.raises(DomainError):
        triangular_mix_power(4, 1.0, 0.1)


@given(st.integers(1, 8), st.sampled_from([0.0, 0.3, 0.7]), st.integers(0, 10_000))
def test_triangular_bounds_hold(n, alpha, seed):
    from spectregap.verify import random_triangular

    T = random_triangular(np.random.default_rng(seed), n, alpha)
    sigma = max(1.0, np.linalg.norm(T, 2))
    beta = float(np.abs(np.diag(T)).max())
    P = np.eye(n)
    for k in range(1, 51):
        P = P @ T
        assert np.linalg.norm(P, 2) <= triangular_power_bound(n, sigma, beta, k) * (1 + 1e-9) + 1e-12
    for eps in (0.1, 0.01):
        k = triangular_mix_power(n, alpha, eps)
        assert np.linalg.norm(np.linalg.matrix_power(T, k), 2) <= eps
