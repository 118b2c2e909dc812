import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supverma import fp_linalg as fp

PRIMES = [3, 5, 7]


def matrices(max_rows=6, max_cols=6):
    return st.tuples(st.sampled_from(PRIMES), st.integers(1, max_rows), st.integers(1, max_cols)).flatmap(
        lambda t: st.tuples(
            st.just(t[0]),
            st.lists(st.lists(st.integers(0, t[0] - 1), min_size=t[2], max_size=t[2]),
                     min_size=t[1], max_size=t[1]).map(lambda rows: np.array(rows, dtype=np.int64))))


def test_binomial_examples():
    assert fp.binom_mod_p(4, 2, 3) == 0
    assert fp.binom_mod_p(0, 0, 5) == 1
    assert fp.binom_mod_p((2, 1), (1, 1), 3) == 2
    assert fp.binom_mod_p(2, 3, 5) == 0


@pytest.mark.parametrize("p", [3, 5, 7])
def test_lucas_matches_factorials(p):
    for n in range(2 * p * p):
        for k in range(n + 1):
            assert fp.binom_mod_p(n, k, p) == math.comb(n, k) % p


def test_characteristic_two_rejected():
    with pytest.raises(ValueError, match="characteristic 2 unsupported"):
        fp.check_modulus(2)
    with pytest.raises(ValueError):
        fp.check_modulus(9)


def test_rank_examples():
    assert fp.rank(fp.identity(6), 3) == 6
    assert fp.rank(fp.zeros(4, 4), 5) == 0


def test_solve_examples():
    x, ker = fp.solve(fp.identity(2), np.array([[1], [2]]), 3)
    assert x.ravel().tolist() == [1, 2] and ker.shape[1] == 0
    with pytest.raises(fp.NoSolution):
        fp.solve(fp.zeros(2, 2), np.array([[1], [0]]), 3)
    with pytest.raises(ValueError):
        fp.solve(fp.identity(2), np.array([[1], [2], [0]]), 3)


def test_kernel_of_rank_three_matrix():
    a = np.array([[1, 0, 0, 2, 1], [0, 1, 0, 1, 1], [0, 0, 1, 0, 2]])
    assert fp.rank(a, 3) == 3
    ker = fp.nullspace(a, 3)
    assert ker.shape == (5, 2)
    assert not np.any(fp.matmul(a, ker, 3))


def test_inverse_and_singular():
    a = np.array([[1, 2], [0, 1]])
    inv = fp.inverse(a, 5)
    assert np.array_equal(fp.matmul(a, inv, 5), fp.identity(2))
    with pytest.raises(ZeroDivisionError):
        fp.inverse(np.array([[1, 2], [2, 4]]), 5)


def test_matmul_large_entries_exact():
    p = 7
    rng = np.random.default_rng(0)
    a = rng.integers(0, p, (40, 300))
    b = rng.integers(0, p, (300, 30))
    assert np.array_equal(fp.matmul(a, b, p), (a @ b) % p)


@given(matrices())
@settings(max_examples=80, deadline=None)
def test_rank_of_transpose(data):
    p, a = data
    assert fp.rank(a, p) == fp.rank(a.T, p)


@given(matrices(), st.integers(0, 2 ** 32))
@settings(max_examples=80, deadline=None)
def test_solve_reproduces_rhs(data, seed):
    p, a = data
    rng = np.random.default_rng(seed)
    x0 = rng.integers(0, p, (a.shape[1], 1))
    b = fp.matmul(a, x0, p)
    x, ker = fp.solve(a, b, p)
    assert np.array_equal(fp.matmul(a, x, p), b % p)
    assert ker.shape[1] == a.shape[1] - fp.rank(a, p)
    assert not np.any(fp.matmul(a, ker, p))


@given(matrices())
@settings(max_examples=60, deadline=None)
def test_rref_is_deterministic_and_reduced(data):
    p, a = data
    r1, piv1 = fp.rref(a, p)
    r2, piv2 = fp.rref(a.copy(), p)
    assert np.array_equal(r1, r2) and piv1 == piv2
    for i, c in enumerate(piv1):
        assert r1[i, c] == 1 and np.count_nonzero(r1[:, c]) == 1


def test_row_space_basis_matches_stacked_rank():
    p = 5
    rng = np.random.default_rng(3)
    blocks = [rng.integers(0, p, (7, 9)) for _ in range(4)]
    basis = fp.row_space_basis(iter(blocks), 9, p, chunk=5)
    assert basis.shape[0] == fp.rank(np.vstack(blocks), p)
