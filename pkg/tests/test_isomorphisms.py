import numpy as np
import pytest

from supverma import fp_linalg as fp
from supverma import isomorphisms as iso
from supverma import verma as vm
from supverma.cartan_witt import DividedMonomial
from supverma.enveloping import PBWMonomial, top_monomial
from supverma.modules import LModule, direct_sum, trivial_lmodule

from conftest import CONFIGS, SMALL, algebra, coinduced, module

E = PBWMonomial


@pytest.mark.parametrize("cfg", CONFIGS)
@pytest.mark.parametrize("name", ["trivial", "natural", "dual_natural"])
def test_phi_bijective_equivariant(cfg, name):
    rep, ind, P = iso.build_phi(module(cfg, name))
    assert rep.residual == 0 and rep.bijective and rep.map.is_homogeneous()
    assert rep.map.parity == algebra(*cfg).l % 2


def test_phi_on_one_is_top_chi():
    V = module(SMALL, "trivial")
    rep, ind, P = iso.build_phi(V)
    one = ind.meta["monomials"].index(E((0,)))
    chi = vm.chi_vector(P, V, top_monomial(V.alg), np.array([1]))
    assert np.array_equal(rep.map.matrix[:, one], chi)
    assert rep.rank == 6


def test_phi_fails_with_wrong_twist():
    V = module(SMALL, "natural")
    for s in (0, -1):
        ind = vm.induce(vm.twist(V, s))
        P = vm.coinduce(V)
        F = vm.SuperMap(ind.space, P.space, iso.phi_matrix(ind, P, V), 1, top_monomial(V.alg).length)
        assert iso.equivariance(F, ind, P).residual > 0


def test_naturality_square():
    V = module(SMALL, "natural")
    W = direct_sum(V, V, ("1", "2"))
    incl = np.vstack([fp.identity(V.dim), fp.identity(V.dim)])  # diagonal embedding
    assert iso.naturality_square(V, W, incl)["pass"]
    with pytest.raises(ValueError):
        iso.naturality_square(V, V, np.array([[1, 0], [0, 2]]))


def test_untwisted_variant_fails_since_sigma_nonzero():
    for cfg in CONFIGS:
        sigma_zero, rep = iso.identity_twist_report(module(cfg, "trivial"))
        assert not sigma_zero and rep.residual > 0


@pytest.mark.parametrize("cfg", CONFIGS)
@pytest.mark.parametrize("name", ["trivial", "natural"])
def test_psi_dual(cfg, name):
    V = module(cfg, name)
    rep, src, tgt = iso.build_psi_dual(V)
    assert rep.verdict
    assert src.dim == tgt.dim == 2 ** V.alg.l * V.alg.p ** sum(V.alg.m) * V.dim


def test_psi_dual_explicit_preimage():
    V = module(SMALL, "natural")
    rep, src, tgt = iso.build_psi_dual(V)
    rng = np.random.default_rng(1)
    for _ in range(5):
        f = rng.integers(0, 3, tgt.dim)
        phi = iso.psi_preimage(V, tgt, f, src.dim)
        assert np.array_equal(fp.matmul(rep.map.matrix, phi[:, None], 3)[:, 0], f)


@pytest.mark.parametrize("cfg", CONFIGS)
def test_self_duality_trivial_says_no_on_both_sides(cfg):
    res = iso.check_thm_3_6(module(cfg, "trivial"))
    assert res["agree"] and not res["V_side"] and not res["Ind_side"]
    assert all(v["hom_dim"] == 0 for v in res["V_to_dual_Vsigma"].values())


@pytest.mark.parametrize("cfg", CONFIGS)
def test_self_duality_half_twist_says_yes(cfg):
    res = iso.check_thm_3_6(module(cfg, "half_twist"))
    assert res["agree"] and res["V_side"] and res["Ind_side"]


@pytest.mark.parametrize("name", ["natural", "dual_natural", "adjoint0"])
def test_self_duality_agreement_other_modules(name):
    assert iso.check_thm_3_6(module(SMALL, name))["agree"]


def test_has_invertible_paths():
    assert iso.has_invertible([], 3) == (False, "exact")
    assert iso.has_invertible([fp.identity(2)], 3) == (True, "exact")
    nil = np.array([[0, 1], [0, 0]])
    assert iso.has_invertible([nil, nil.T * 0], 3) == (False, "exact")
    many = [np.diag([1 if i == j else 0 for i in range(8)]) for j in range(8)]
    ok, how = iso.has_invertible(many, 3)
    assert ok and how == "exact"


@pytest.mark.parametrize("cfg", CONFIGS)
@pytest.mark.parametrize("name", ["trivial", "natural"])
def test_psi_embed_on_coinduced(cfg, name):
    res = iso.psi_embed(coinduced(cfg, name))
    assert res["pass"] and res["injective"] and res["transitive"]
    assert res["rank"] == coinduced(cfg, name).dim
    assert res["degree_zero"] and res["image_of_M0_is_P0"]


def test_psi_embed_flags_nontransitive():
    W = algebra(*SMALL)
    M = direct_sum(coinduced(SMALL, "trivial"), trivial_lmodule(W, 1, "t"), ("P", "t"))
    res = iso.psi_embed(M)
    assert not res["transitive"] and not res["injective"] and res["equivariant"]


def test_psi_embed_rejects_truncation():
    P = coinduced(SMALL, "natural")
    deg = np.array(P.space.degree)
    keep = deg == 0
    act = P.action * keep[None, :, None] * keep[None, None, :]
    trunc = LModule(P.alg, P.space, act, "custom")
    with pytest.raises(vm.PreconditionError):
        iso.psi_embed(trunc)


def test_psi_embed_rejects_negative_grading():
    with pytest.raises(vm.PreconditionError):
        iso.psi_embed(vm.induce(module(SMALL, "trivial")))


@pytest.mark.parametrize("cfg", CONFIGS)
@pytest.mark.parametrize("name", ["trivial", "natural"])
def test_mixed_product(cfg, name):
    res = iso.verify_mixed(module(cfg, name))
    assert res["pass"] and res["sign_family"] == "parity"
    assert res["dimension"] == res["expected_dimension"]


def test_mixed_formula_examples():
    V = module(SMALL, "trivial")
    res = iso.verify_mixed(V)
    M = res["mixed"]
    monos = M.meta["monomials"]
    i = monos.index(E((2,), (0,)))
    j = monos.index(E((1,), (0,)))
    assert M.action[0][:, i].tolist() == [1 if r == j else 0 for r in range(M.dim)]
    d1 = V.alg.d(0)
    for a in range(3):
        assert not np.any(M.action[d1][:, monos.index(E((a,)))])


def test_mixed_needs_length_sign_for_two_odd_variables():
    res = iso.verify_mixed(module((3, 1, 2, (1,)), "trivial"))
    assert res["pass"] and res["sign_family"] == "length"
    # s(n) = (-1)^(n(n-1)/2)
    assert res["sign_convention"] == [1, 1, -1]
    assert all(t["mismatched_entries"] > 0 for t in res["tried"][:4])
