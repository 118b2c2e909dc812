import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supverma import fp_linalg as fp
from supverma.cartan_witt import (AlgebraError, DividedMonomial, WittAlgebra, apply_D, apply_d, bracket_oracle,
                                  build_W, check_algebra, divided_product, jacobi_violation, l0_is_gl,
                                  subalgebra_filter)

from conftest import CONFIGS, algebra

X = DividedMonomial


def test_divided_product_examples():
    assert divided_product(X((1,)), X((1,)), 3, (1,)) == {X((2,)): 2}
    assert divided_product(X((2,)), X((1,)), 3, (1,)) == {}
    assert divided_product(X((0,), (0,)), X((0,), (0,)), 3, (1,)) == {}


def test_divided_product_odd_reordering_sign():
    # xi2 * xi1 = -xi1 xi2
    assert divided_product(X((0,), (1,)), X((0,), (0,)), 5, (1,)) == {X((0,), (0, 1)): 4}


def test_apply_D_examples():
    assert apply_D(0, X((2,), (0,)), 3) == {X((1,), (0,)): 1}
    assert apply_D(0, X((0,), (0,)), 3) == {}
    assert apply_D(1, X((0, 1)), 3) == {X((0, 0)): 1}
    with pytest.raises(IndexError):
        apply_D(2, X((0, 1)), 3)


def test_apply_d_examples():
    assert apply_d(0, X((1,), (0,)), 3) == {X((1,)): 1}
    assert apply_d(0, X((2,)), 3) == {}
    assert apply_d(1, X((0,), (0, 1)), 3, l=2) == {X((0,), (0,)): 2}
    with pytest.raises(IndexError):
        apply_d(2, X((0,)), 3, l=2)


def test_bracket_examples():
    W = algebra(3, 1, 1, (1,))
    x2D = W.element((2,), (), 0)
    assert W.bracket(W.D(0), x2D) == {W.element((1,), (), 0): 1}
    W2 = algebra(3, 2, 1, (1, 1))
    assert W2.bracket(W2.D(0), W2.D(1)) == {}
    xd = W.element((0,), (0,), 1)
    assert W.bracket(xd, xd) == {}


@pytest.mark.parametrize("cfg,dim", [((3, 1, 1, (1,)), 12), ((3, 2, 1, (1, 1)), 54), ((5, 1, 1, (1,)), 20)])
def test_dimensions(cfg, dim):
    W = algebra(*cfg)
    assert W.dim == dim == W.expected_dim()
    assert len(set(W.labels)) == dim


@pytest.mark.parametrize("cfg", CONFIGS + [(3, 1, 2, (1,))])
def test_all_invariants(cfg):
    rep = check_algebra(algebra(*cfg))
    assert rep.ok, rep.summary()
    assert l0_is_gl(algebra(*cfg))


def test_invalid_parameters():
    for args in [(2, 1, 1, (1,)), (4, 1, 1, (1,)), (3, 0, 1, ()), (3, 1, 0, (1,)), (3, 1, 1, (0,)), (3, 2, 1, (1,))]:
        with pytest.raises(ValueError):
            build_W(*args)


def test_corrupted_constant_caught():
    W = algebra(3, 1, 1, (1,))
    t = W.table.copy()
    a, b = W.D(0), W.element((2,), (), 0)
    c = W.element((0,), (0,), 1)  # keeps degree and parity consistent
    t[a, b, c] = (t[a, b, c] + 1) % 3
    t[b, a, c] = (t[b, a, c] - 1) % 3
    bad = WittAlgebra(3, 1, 1, (1,), table=t)
    assert jacobi_violation(bad) is not None
    rep = check_algebra(bad)
    assert not rep.ok and rep.jacobi is not None and rep.anticommutative is None


def test_serialization_round_trip():
    W = algebra(3, 1, 1, (1,))
    again = WittAlgebra.from_json(__import__("json").loads(W.dumps()))
    assert np.array_equal(again.table, W.table) and again.labels == W.labels
    assert again.dumps() == W.dumps()


def test_neg_part_abelian_and_grading():
    for cfg in CONFIGS:
        W = algebra(*cfg)
        assert not np.any(W.table[:W.nneg, :W.nneg])
        for a, b, c in np.argwhere(W.table):
            assert W.degree[c] == W.degree[a] + W.degree[b]
            assert W.parity[c] == (W.parity[a] + W.parity[b]) % 2


def test_ad_D_nilpotent():
    for cfg in CONFIGS:
        W = algebra(*cfg)
        for i, z in enumerate(W.z_exponents):
            assert not np.any(fp.mat_power(W.ad(W.D(i)), z, W.p))
            assert np.any(fp.mat_power(W.ad(W.D(i)), z - 1, W.p))


def test_l0_dimension():
    for cfg in CONFIGS:
        W = algebra(*cfg)
        assert len(W.l0_indices) == (W.k + W.l) ** 2


def test_subalgebra_filter():
    W = algebra(3, 1, 1, (1,))
    k = subalgebra_filter(W, lambda e: e.zdegree >= 0)
    assert k == W.k_indices
    with pytest.raises(ValueError):
        subalgebra_filter(W, lambda e: e.zdegree == 1 or e.zdegree == -1)


@pytest.mark.parametrize("cfg", CONFIGS)
def test_build_and_check_under_ten_seconds(cfg):
    t = time.perf_counter()
    W = WittAlgebra(*cfg)
    assert check_algebra(W).ok
    assert time.perf_counter() - t < 10


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_bracket_matches_operator_oracle(data):
    W = algebra(*data.draw(st.sampled_from(CONFIGS)))
    a = data.draw(st.integers(0, W.dim - 1))
    b = data.draw(st.integers(0, W.dim - 1))
    expect = np.zeros(W.dim, dtype=np.int64)
    for c, v in W.bracket(a, b).items():
        expect[c] = v
    assert np.array_equal(bracket_oracle(W, a, b), expect)


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_super_anticommutativity(data):
    W = algebra(*data.draw(st.sampled_from(CONFIGS)))
    a = data.draw(st.integers(0, W.dim - 1))
    b = data.draw(st.integers(0, W.dim - 1))
    s = fp.sign(int(W.parity[a] * W.parity[b]), W.p)
    lhs = W.table[a, b]
    rhs = (-s * W.table[b, a]) % W.p
    assert np.array_equal(lhs, rhs)
