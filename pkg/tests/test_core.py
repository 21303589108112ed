from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spectregap.construction import rogue_matrix
from spectregap.core import (
    ConvergenceError,
    DegenerateError,
    DomainError,
    FormatError,
    NonnegMatrix,
    ValidationError,
    exact_matmul,
    load_matrix,
    named_matrix,
    random_doubly_stochastic,
    save_matrix,
    scale_to_unit_pf,
    sinkhorn,
    to_fractions,
    validate,
)
from spectregap.pf import pf_data


def test_negative_entries():
    with pytest.raises(ValidationError):
        NonnegMatrix(np.array([[1.0, -0.5], [0.0, 1.0]]))
    m = NonnegMatrix(np.array([[1.0, -1e-16], [0.0, 1.0]]))
    assert m.entries[0, 1] == 0.0
    with pytest.raises(ValidationError):
        NonnegMatrix(np.array([[np.nan]]))
    with pytest.raises(DomainError):
        NonnegMatrix(np.ones((2, 3)))


def test_tags_recomputed():
    assert named_matrix("identity", 5).tags == {"doubly_stochastic", "lazy", "symmetric"}
    assert "doubly_stochastic" in named_matrix("directed_cycle", 3).tags
    assert "symmetric" not in named_matrix("directed_cycle", 3).tags
    assert NonnegMatrix(np.array([[2.0]])).tags == {"symmetric", "lazy"}


def test_named_matrices():
    np.testing.assert_array_equal(named_matrix("uniform_J", 2).to_float(), [[0.5, 0.5], [0.5, 0.5]])
    c = named_matrix("directed_cycle", 3).to_float()
    for i in range(3):
        assert c[i, (i + 1) % 3] == 1 and c[i].sum() == 1
    with pytest.raises(DomainError):
        named_matrix("identity", 0)
    with pytest.raises(DomainError):
        named_matrix("directed_cycle", 1)


@pytest.mark.parametrize("kind", ["identity", "uniform_J", "directed_cycle"])
@pytest.mark.parametrize("n", [2, 3, 17, 64])
def test_named_are_doubly_stochastic(kind, n):
    assert validate(named_matrix(kind, n)).doubly_stochastic_ok


def test_validate_examples():
    rep = validate(named_matrix("uniform_J", 4), pf_data(named_matrix("uniform_J", 4)))
    assert rep.doubly_stochastic_ok and rep.symmetric_dev == 0 and rep.detailed_balance_dev == 0
    rep = validate(rogue_matrix(4))
    assert rep.row_sum_max_dev <= 1e-15 and rep.col_sum_max_dev <= 1e-15
    rep = validate(named_matrix("directed_cycle", 3))
    # brute entry comparison of C - C^T
    c = named_matrix("directed_cycle", 3).to_float()
    assert rep.symmetric_dev == max(abs(c[i, j] - c[j, i]) for i in range(3) for j in range(3))
    assert rep.doubly_stochastic_ok
    with pytest.raises(DomainError):
        validate(named_matrix("identity", 2), tol=0)


def test_validate_rational_is_exact():
    rep = validate(rogue_matrix(25, "rational"))
    assert rep.row_sum_max_dev == 0 and rep.col_sum_max_dev == 0 and rep.doubly_stochastic_ok


def test_json_roundtrip(tmp_path):
    m = named_matrix("uniform_J", 3)
    save_matrix(m, tmp_path / "j.json")
    back = load_matrix(tmp_path / "j.json")
    assert np.array_equal(back.entries, m.entries)
    r = rogue_matrix(4, "rational")
    save_matrix(r, tmp_path / "r.json")
    back = load_matrix(tmp_path / "r.json")
    assert back.mode == "rational"
    assert back.entries[1, 2] == Fraction(19, 24)
    assert (back.entries == r.entries).all()


def test_json_minimal(tmp_path):
    p = tmp_path / "one.json"
    p.write_text('{"n":1,"rows":[[1.0]]}')
    assert load_matrix(p).to_float().tolist() == [[1.0]]


def test_matrix_market_coordinate(tmp_path):
    p = tmp_path / "eye.mtx"
    p.write_text("%%MatrixMarket matrix coordinate real general\n% comment\n2 2 2\n1 1 1.0\n2 2 1.0\n")
    np.testing.assert_array_equal(load_matrix(p).to_float(), np.eye(2))


def test_matrix_market_roundtrip(tmp_path):
    m = random_doubly_stochastic(5, seed=3)
    save_matrix(m, tmp_path / "m.mtx", "matrix_market")
    assert np.array_equal(load_matrix(tmp_path / "m.mtx").entries, m.entries)
    r = rogue_matrix(9, "rational")
    save_matrix(r, tmp_path / "r.mtx", "matrix_market")
    assert (load_matrix(tmp_path / "r.mtx").entries == r.entries).all()


def test_format_errors_carry_line(tmp_path):
    p = tmp_path / "bad.mtx"
    p.write_text("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 abc\n")
    with pytest.raises(FormatError, match="line 3"):
        load_matrix(p)
    q = tmp_path / "bad.json"
    q.write_text('{"n": 2,\n "rows": [[1, 0]')
    with pytest.raises(FormatError, match="line"):
        load_matrix(q)
    neg = tmp_path / "neg.json"
    neg.write_text('{"n":1,"rows":[[-0.5]]}')
    with pytest.raises(ValidationError):
        load_matrix(neg)


def test_unwritable_path(tmp_path):
    with pytest.raises(OSError):
        save_matrix(named_matrix("identity", 2), tmp_path / "missing" / "x.json")


@given(st.integers(2, 12), st.integers(0, 10_000))
def test_random_doubly_stochastic(n, seed):
    m = random_doubly_stochastic(n, seed)
    rep = validate(m)
    assert rep.row_sum_max_dev <= 1e-12 and rep.col_sum_max_dev <= 1e-12
    assert m.to_float().min() > 0
    assert np.array_equal(m.entries, random_doubly_stochastic(n, seed).entries)
    assert pf_data(m).classification == "irreducible"


@given(st.integers(0, 1000))
def test_two_by_two_shape(seed):
    a = random_doubly_stochastic(2, seed).to_float()
    p = a[0, 0]
    np.testing.assert_allclose(a, [[p, 1 - p], [1 - p, p]], atol=1e-12)


def test_sinkhorn_guard():
    with pytest.raises(ConvergenceError):
        sinkhorn(np.array([[1.0, 1.0], [0.0, 1.0]]), max_sweeps=5)


def test_scale_to_unit_pf():
    two = NonnegMatrix(2 * np.eye(2))
    np.testing.assert_array_equal(scale_to_unit_pf(two, pf_data(two)).to_float(), np.eye(2))
    J = named_matrix("uniform_J", 3)
    np.testing.assert_array_equal(scale_to_unit_pf(J, pf_data(J)).to_float(), J.to_float())
    four = NonnegMatrix(np.full((2, 2), 2.0))
    pf = pf_data(four)
    assert abs(pf.r - 4) < 1e-12
    np.testing.assert_allclose(scale_to_unit_pf(four, pf).to_float(), np.full((2, 2), 0.5))
    with pytest.raises(DegenerateError):
        z = NonnegMatrix(np.zeros((2, 2)))
        scale_to_unit_pf(z, pf_data(z))


@given(st.integers(2, 8), st.integers(0, 500))
def test_scale_idempotent(n, seed):
    R = NonnegMatrix(3 * np.random.default_rng(seed).random((n, n)) + 0.01)
    once = scale_to_unit_pf(R, pf_data(R))
    twice = scale_to_unit_pf(once, pf_data(once))
    np.testing.assert_allclose(once.to_float(), twice.to_float(), atol=1e-12)


def test_exact_matmul_against_loops():
    rng = np.random.default_rng(0)
    X = np.array([[Fraction(int(a), int(b)) for a, b in zip(r1, r2)]
                  for r1, r2 in zip(rng.integers(-9, 9, (3, 3)), rng.integers(1, 9, (3, 3)))], dtype=object)
    Y = to_fractions(rng.random((3, 3)))
    P = exact_matmul(X, Y)
    for i in range(3):
        for j in range(3):
            assert P[i, j] == sum(X[i, k] * Y[k, j] for k in range(3))
