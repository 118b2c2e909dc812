import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supverma import fp_linalg as fp
from supverma.modules import dual_module
from supverma.superspace import (GradedSpace, SuperMap, double_dual_identification, koszul_sign,
                                 super_commutator, supertrace)
from supverma.verma import natural_module, trivial_module

from conftest import algebra, SMALL


def test_koszul_sign_examples():
    assert koszul_sign(0, 1, 3) == 1
    assert koszul_sign(1, 1, 3) == 2
    assert koszul_sign(1, 0, 3) == 1


@given(st.integers(0, 1), st.integers(0, 1), st.integers(0, 1))
def test_koszul_sign_symmetric_and_multiplicative(a, b, c):
    p = 5
    assert koszul_sign(a, b, p) == koszul_sign(b, a, p)
    assert koszul_sign(a, b, p) * koszul_sign(a, c, p) % p == koszul_sign(a, (b + c) % 2, p)


def test_supertrace_examples():
    sp = GradedSpace.build(["a", "b", "c"], [0, 0, 1], p=5)
    assert supertrace(fp.identity(3), sp) == 1
    assert supertrace(fp.zeros(3, 3), sp) == 0


def test_supertrace_of_x_d1_on_negative_part(W113):
    a = W113.element((1,), (), 0)
    assert supertrace(W113.rho_LK(a), W113.neg_space) == 2


def test_labels_unique():
    with pytest.raises(ValueError):
        GradedSpace.build(["a", "a"], [0, 1])


def test_dual_space_negates_degrees():
    sp = GradedSpace.build(["a", "b"], [0, 1], [2, -1], 3)
    d = sp.dual()
    assert d.degree == (-2, 1) and d.parity == sp.parity


def test_supermap_homogeneity():
    sp = GradedSpace.build(["e", "o"], [0, 1], [0, 0], 3)
    odd = SuperMap(sp, sp, np.array([[0, 1], [1, 0]]), 1, 0)
    assert odd.is_homogeneous()
    bad = SuperMap(sp, sp, np.array([[1, 1], [0, 0]]), 1, 0)
    assert bad.homogeneity_violation() == (0, 0)


def homogeneous_matrix(par, parity, rng, p):
    m = rng.integers(0, p, (len(par), len(par)))
    mask = (par[:, None] + par[None, :] + parity) % 2 == 0
    return m * mask


@given(st.integers(0, 2 ** 32), st.integers(0, 1), st.integers(0, 1))
@settings(max_examples=60, deadline=None)
def test_supertrace_kills_supercommutators(seed, pa, pb):
    p = 7
    rng = np.random.default_rng(seed)
    par = rng.integers(0, 2, 5)
    sp = GradedSpace.build([str(i) for i in range(5)], par, p=p)
    a = homogeneous_matrix(par, pa, rng, p)
    b = homogeneous_matrix(par, pb, rng, p)
    if (pa + pb) % 2 == 0:
        assert supertrace(super_commutator(a, pa, b, pb, p), sp) == 0


def test_dual_of_trivial_is_trivial(W113):
    V = trivial_module(W113)
    assert not np.any(dual_module(V).action)


def test_double_dual_natural_gl11(W113):
    V = natural_module(W113)
    VV = dual_module(dual_module(V))
    J = double_dual_identification(V.space)
    p = W113.p
    for a in W113.k_indices:
        lhs = fp.matmul(J, V.matrix(a), p)
        rhs = fp.matmul(VV.matrix(a), J, p)
        assert np.array_equal(lhs, rhs)
        if W113.parity[a] == 0:
            # even elements: the raw double-dual matrices coincide
            assert np.array_equal(VV.matrix(a), V.matrix(a))


def test_dual_preserves_nilpotency(W113):
    V = natural_module(W113)
    Vd = dual_module(V)
    for a in W113.k_indices:
        if not np.any(fp.mat_power(V.matrix(a), V.dim, 3)):
            assert not np.any(fp.mat_power(Vd.matrix(a), V.dim, 3))
