"""Explicit matrices for Phi, Psi, psi and the mixed-product transport, with checks.

Map parities: d(Phi) = l mod 2, d(Psi) = d(psi) = d(mu) = 0.  A homogeneous
map F of parity d(F) is a homomorphism when F(x.m) = (-1)^(d(x)d(F)) x.F(m).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import fp_linalg as fp
from .cartan_witt import DividedMonomial, apply_D, apply_d
from .enveloping import PBWMonomial, top_monomial, transpose_monomial
from .modules import KModule, LModule, ModuleError, dual_module
from .superspace import GradedSpace, SuperMap
from .verma import (PreconditionError, chi_signs, chi_vector, coinduce, induce, is_positively_graded,
                    is_transitive, module_degree_zero, straightener, twist)


class VerificationError(Exception):
    def __init__(self, msg: str, witness=None):
        super().__init__(msg if witness is None else f"{msg}: witness {witness}")
        self.witness = witness


@dataclass
class EquivarianceReport:
    map: SuperMap = field(repr=False)
    residual: int
    rank: int
    bijective: bool
    witness: tuple | None = None
    claimed_bijective: bool = True

    @property
    def verdict(self) -> bool:
        return self.residual == 0 and (self.bijective or not self.claimed_bijective) and \
            self.map.is_homogeneous()

    def to_json(self) -> dict:
        return {"residual_entries": self.residual, "rank": self.rank, "bijective": self.bijective,
                "homogeneous": self.map.is_homogeneous(), "pass": self.verdict,
                "witness": None if self.witness is None else list(self.witness)}


def equivariance(F: SuperMap, src: LModule, tgt: LModule, claimed_bijective: bool = True,
                 generators=None) -> EquivarianceReport:
    p = src.p
    alg = src.alg
    resid = 0
    witness = None
    gens = range(alg.dim) if generators is None else generators
    for x in gens:
        s = fp.sign(int(alg.parity[x]) * F.parity, p)
        diff = (fp.matmul(F.matrix, src.action[x], p) - s * fp.matmul(tgt.action[x], F.matrix, p)) % p
        nz = int(np.count_nonzero(diff))
        if nz and witness is None:
            r, c = fp.first_nonzero(diff)
            witness = (alg.labels[x], src.space.labels[c])
        resid += nz
    rk = fp.rank(F.matrix, p)
    bij = F.matrix.shape[0] == F.matrix.shape[1] == rk
    return EquivarianceReport(F, resid, rk, bij, witness, claimed_bijective)


# ---------------------------------------------------------------------------
# Ind(V_sigma) -> Coind(V)


def phi_matrix(ind: LModule, P: LModule, V: KModule) -> np.ndarray:
    """Column (N, b) = (-1)^(|u| l) N . chi_(v_b)^(pi,E)."""
    alg = V.alg
    p = alg.p
    monos = P.meta["monomials"]
    top = top_monomial(alg)
    d = V.dim
    chis = np.stack([chi_vector(P, V, top, fp.identity(d)[b]) for b in range(d)], axis=1)
    out = np.zeros((P.dim, ind.dim), dtype=np.int64)
    for i, m in enumerate(monos):
        img = fp.matmul(P.word_matrix(m.letters(alg.k)), chis, p)
        out[:, i * d:(i + 1) * d] = fp.sign(len(m.u) * alg.l, p) * img % p
    return out


def build_phi(V: KModule, ind: LModule | None = None, P: LModule | None = None,
              strict: bool = True) -> tuple[EquivarianceReport, LModule, LModule]:
    if V.twist_coeff != 0:
        raise ValueError("build_phi expects an untwisted K-module")
    ind = induce(twist(V, 1)) if ind is None else ind
    P = coinduce(V) if P is None else P
    F = SuperMap(ind.space, P.space, phi_matrix(ind, P, V), V.alg.l % 2, top_monomial(V.alg).length)
    rep = equivariance(F, ind, P)
    if strict and not rep.verdict:
        raise VerificationError("Phi is not a bijective homomorphism", rep.witness)
    return rep, ind, P


def identity_twist_report(V: KModule) -> tuple[bool, EquivarianceReport]:
    """The same construction from Ind(V) instead of Ind(V_sigma).

    Returns (sigma vanishes, report); the map is a homomorphism when sigma = 0.
    """
    sigma_zero = not any(V.alg.sigma().values())
    ind = induce(V)
    P = coinduce(V)
    F = SuperMap(ind.space, P.space, phi_matrix(ind, P, V), V.alg.l % 2, top_monomial(V.alg).length)
    return sigma_zero, equivariance(F, ind, P)


def block_diag_map(phi: np.ndarray, blocks: int) -> np.ndarray:
    return np.kron(fp.identity(blocks), phi)


def naturality_square(V: KModule, W: KModule, phi: np.ndarray) -> dict:
    """phi^* o Phi_V == Phi_W o (id (x) phi) for an even K-module map phi: V -> W."""
    p = V.p
    hom = SuperMap(V.space, W.space, fp.reduce_mod(phi, p), 0, 0)
    resid = 0
    for a in V.alg.k_indices:
        diff = (fp.matmul(phi, V.matrix(a), p) - fp.matmul(W.matrix(a), phi, p)) % p
        resid += int(np.count_nonzero(diff))
    if resid or not hom.is_homogeneous():
        raise ValueError("phi is not an even K-module homomorphism")
    rv, _, _ = build_phi(V)
    rw, _, _ = build_phi(W)
    n_monos = rv.map.matrix.shape[0] // V.dim
    big = block_diag_map(phi, n_monos)
    lhs = fp.matmul(big, rv.map.matrix, p)
    rhs = fp.matmul(rw.map.matrix, big, p)
    diff = int(np.count_nonzero((lhs - rhs) % p))
    return {"residual_entries": diff, "pass": diff == 0 and rv.verdict and rw.verdict}


# ---------------------------------------------------------------------------
# Adjoint isomorphism (Ind V)^* -> Coind(V^*)


def build_psi_dual(V: KModule, strict: bool = True) -> tuple[EquivarianceReport, LModule, LModule]:
    """Psi(phi)(x): v -> phi(x^T (x) v)."""
    alg = V.alg
    p = alg.p
    st = straightener(alg)
    ind = induce(V)
    ind_dual = dual_module(ind)
    Vd = dual_module(V)
    P = coinduce(Vd)
    monos = P.meta["monomials"]
    d = V.dim
    s = chi_signs(monos, Vd)
    mat = np.zeros((P.dim, ind_dual.dim), dtype=np.int64)
    for i, m in enumerate(monos):
        tau, mt = transpose_monomial(st, m)
        j = monos.index(mt)
        for b in range(d):
            # dual basis functional f_(m,b) maps to the value tau * f_b at monomial m^T
            mat[j * d + b, i * d + b] = tau * s[j * d + b] % p
    F = SuperMap(ind_dual.space, P.space, mat, 0, 0)
    rep = equivariance(F, ind_dual, P)
    if strict and not rep.verdict:
        raise VerificationError("Psi is not a bijective homomorphism", rep.witness)
    return rep, ind_dual, P


def psi_preimage(V: KModule, P: LModule, f: np.ndarray, ind_dim: int) -> np.ndarray:
    """phi(x (x) v) := f(x^T)(v), as coordinates on the dual basis of Ind(V)."""
    alg = V.alg
    p = alg.p
    st = straightener(alg)
    monos = P.meta["monomials"]
    d = V.dim
    Vd = dual_module(V)
    s = chi_signs(monos, Vd)
    vals = f * s % p  # value coordinates: f(m) as a functional on V
    out = np.zeros(ind_dim, dtype=np.int64)
    for i, m in enumerate(monos):
        tau, mt = transpose_monomial(st, m)
        j = monos.index(mt)
        out[i * d:(i + 1) * d] = tau * vals[j * d:(j + 1) * d] % p
    return out


# ---------------------------------------------------------------------------
# Hom spaces and the self-duality criterion


def _parity_mask(src: GradedSpace, tgt: GradedSpace, parity: int) -> np.ndarray:
    return (np.array(tgt.parity)[:, None] % 2) == ((np.array(src.parity)[None, :] + parity) % 2)


def hom_space_small(src_action: np.ndarray, src: GradedSpace, tgt_action: np.ndarray,
                    tgt: GradedSpace, gen_parity, parity: int, p: int) -> list[np.ndarray]:
    """Basis of parity-homogeneous X with X A_x = (-1)^(d(x)d(X)) B_x X for all x."""
    mask = _parity_mask(src, tgt, parity).reshape(-1)
    signs = [fp.sign(int(g) * parity, p) for g in gen_parity]
    cons = fp.kron_sylvester(list(src_action), list(tgt_action), signs, p)
    cols = np.nonzero(mask)[0]
    if cols.size == 0:
        return []
    ker = fp.nullspace(cons[:, cols] if cons.size else fp.zeros(0, cols.size), p)
    out = []
    for j in range(ker.shape[1]):
        x = np.zeros(mask.size, dtype=np.int64)
        x[cols] = ker[:, j]
        out.append(x.reshape(tgt.dim, src.dim))
    return out


def hom_space_induced(ind: LModule, tgt: LModule, V_dim: int, parity: int) -> list[np.ndarray]:
    """L-homomorphisms out of Ind, parameterized by the images of 1 (x) v_b.

    Every such map is F(N (x) v_b) = (-1)^(|u| d(F)) N . m_b; equivariance
    under every basis element of L is imposed as linear constraints on the
    m_b.
    """
    alg = ind.alg
    p = alg.p
    monos = ind.meta["monomials"]
    one = monos.index(PBWMonomial((0,) * alg.k))
    tpar = np.array(tgt.space.parity)
    unknowns = []  # (b, r)
    for b in range(V_dim):
        sp = ind.space.parity[one * V_dim + b]
        for r in range(tgt.dim):
            if tpar[r] == (sp + parity) % 2:
                unknowns.append((b, r))
    if not unknowns:
        return []
    words = [tgt.word_matrix(m.letters(alg.k)) for m in monos]
    U = len(unknowns)
    Fp = np.zeros((U, tgt.dim, ind.dim), dtype=np.int64)
    for q, (b, r) in enumerate(unknowns):
        for i, m in enumerate(monos):
            Fp[q, :, i * V_dim + b] = fp.sign(len(m.u) * parity, p) * words[i][:, r] % p
    Ff = Fp.astype(np.float64)

    def blocks():
        for x in range(alg.dim):
            s = fp.sign(int(alg.parity[x]) * parity, p)
            e = (np.mod(np.matmul(Ff, ind.action[x].astype(np.float64)).astype(np.int64), p)
                 - s * np.mod(np.matmul(tgt.action[x].astype(np.float64), Ff).astype(np.int64), p)) % p
            yield e.reshape(U, -1).T

    ker = fp.nullspace_stacked(blocks(), U, p)
    return [np.tensordot(ker[:, j], Fp, axes=(0, 0)) % p for j in range(ker.shape[1])]


def has_invertible(basis: list[np.ndarray], p: int, rng=None, exact_limit: int = 3 ** 6,
                   samples: int = 256) -> tuple[bool, str]:
    """Decide whether some linear combination of ``basis`` is invertible."""
    r = len(basis)
    if r == 0:
        return False, "exact"
    n = basis[0].shape[0]
    if basis[0].shape[0] != basis[0].shape[1]:
        return False, "exact"
    stack = np.stack(basis)
    if p ** r <= exact_limit:
        for coeffs in itertools.product(range(p), repeat=r):
            if not any(coeffs):
                continue
            m = np.tensordot(np.array(coeffs, dtype=np.int64), stack, axes=(0, 0)) % p
            if fp.rank(m, p) == n:
                return True, "exact"
        return False, "exact"
    if rng is None:
        from .rng import SplitMix64
        rng = SplitMix64(0)
    for _ in range(samples):
        coeffs = np.array([rng.below(p) for _ in range(r)], dtype=np.int64)
        m = np.tensordot(coeffs, stack, axes=(0, 0)) % p
        if fp.rank(m, p) == n:
            return True, "exact"
    return False, "probabilistic"


def check_thm_3_6(V: KModule, rng=None) -> dict:
    """Ind(V_sigma) = Ind(V_sigma)^* iff V = (V_sigma)^*; both sides computed."""
    alg = V.alg
    p = alg.p
    Vs = twist(V, 1)
    Vs_dual = dual_module(Vs)
    l0 = alg.l0_indices
    small = {}
    for par in (0, 1):
        basis = hom_space_small(V.action[[a - alg.nneg for a in l0]], V.space,
                                Vs_dual.action[[a - alg.nneg for a in l0]], Vs_dual.space,
                                alg.parity[l0], par, p)
        ok, how = has_invertible(basis, p, rng)
        small[par] = {"hom_dim": len(basis), "isomorphism": ok, "method": how}
    ind = induce(Vs)
    ind_dual = dual_module(ind)
    big = {}
    for par in (0, 1):
        basis = hom_space_induced(ind, ind_dual, V.dim, par)
        ok, how = has_invertible(basis, p, rng)
        big[par] = {"hom_dim": len(basis), "isomorphism": ok, "method": how}
    left = any(v["isomorphism"] for v in small.values())
    right = any(v["isomorphism"] for v in big.values())
    return {"module": V.name, "V_to_dual_Vsigma": small, "Ind_to_dual_Ind": big,
            "V_side": left, "Ind_side": right, "agree": left == right, "pass": left == right}


# ---------------------------------------------------------------------------
# Embedding of a positively graded module into Coind(M_0)


def psi_embed(M: LModule) -> dict:
    """psi(v)(x) = (-1)^(d(x)d(v)) pr_0(x.v); reports all Prop-style checks."""
    alg = M.alg
    p = alg.p
    w = M.compatibility_violation()
    if w is not None:
        raise PreconditionError(f"input is not an L-module (bracket witness {alg.labels[w[0]]}, {alg.labels[w[1]]})")
    if not is_positively_graded(M):
        raise PreconditionError("input is not positively graded")
    if not M.z_annihilated():
        raise PreconditionError("z_i does not act as zero")
    transitive, witness = is_transitive(M)
    M0 = module_degree_zero(M)
    P = coinduce(M0)
    monos = P.meta["monomials"]
    deg = np.array(M.space.degree)
    idx0 = [i for i in range(M.dim) if deg[i] == 0]
    d0 = len(idx0)
    s = chi_signs(monos, M0)
    mpar = np.array(M.space.parity)
    mat = np.zeros((P.dim, M.dim), dtype=np.int64)
    for i, m in enumerate(monos):
        Wm = M.word_matrix(m.letters(alg.k))[idx0, :]  # pr_0(N . v_j)
        sgn = np.where((len(m.u) * mpar) % 2 == 1, p - 1, 1)
        mat[i * d0:(i + 1) * d0, :] = Wm * sgn[None, :] % p
    mat = mat * s[:, None] % p
    F = SuperMap(M.space, P.space, mat, 0, 0)
    rep = equivariance(F, M, P, claimed_bijective=False)
    injective = rep.rank == M.dim
    one = monos.index(PBWMonomial((0,) * alg.k))
    p0_cols = np.zeros((P.dim, d0), dtype=np.int64)
    for c in range(d0):
        p0_cols[one * d0 + c, c] = 1
    img0 = mat[:, idx0]
    image_is_P0 = fp.rank(img0, p) == d0 and fp.in_span(p0_cols, img0, p)
    return {
        "transitive": transitive,
        "transitivity_witness": None if witness is None else witness.tolist(),
        "equivariant": rep.residual == 0,
        "residual_entries": rep.residual,
        "degree_zero": F.is_homogeneous(),
        "injective": injective,
        "rank": rep.rank,
        "image_of_M0_is_P0": image_is_P0,
        "pass": rep.residual == 0 and F.is_homogeneous() and image_is_P0 and (injective or not transitive),
        "map": F,
        "coinduced": P,
    }


# ---------------------------------------------------------------------------
# Mixed product O(k,l,m) (x) V


def divided_of(m: PBWMonomial) -> DividedMonomial:
    return DividedMonomial(m.alpha, m.u)


def mixed_expected(alg, monos: list[PBWMonomial], d: int) -> dict[int, np.ndarray]:
    """Matrices of D_i and d_j on O (x) V from the divided-power formulas."""
    p = alg.p
    midx = {divided_of(m): i for i, m in enumerate(monos)}
    n = len(monos) * d
    eye = fp.identity(d)
    out = {}
    for der in range(alg.nneg):
        mat = np.zeros((n, n), dtype=np.int64)
        for i, m in enumerate(monos):
            f = divided_of(m)
            img = apply_D(der, f, p) if der < alg.k else apply_d(der - alg.k, f, p, alg.l)
            for g, c in img.items():
                j = midx[g]
                mat[j * d:(j + 1) * d, i * d:(i + 1) * d] += c * eye
        out[der] = mat % p
    return out


def _sign_conventions(l: int):
    # parity-only conventions first, then arbitrary functions of |u|
    seen = set()
    for s0, s1 in itertools.product((1, -1), repeat=2):
        conv = tuple(s0 if n % 2 == 0 else s1 for n in range(l + 1))
        seen.add(conv)
        yield "parity", conv
    for conv in itertools.product((1, -1), repeat=l + 1):
        if conv not in seen:
            yield "length", conv


def verify_mixed(V: KModule, P: LModule | None = None) -> dict:
    """Find a sign s(|u|) so that x^(a)xi^u (x) v -> s chi_v^(a,u) transports
    the coinduced action onto the displayed D_i / d_j formulas."""
    alg = V.alg
    p = alg.p
    P = coinduce(V) if P is None else P
    monos = P.meta["monomials"]
    d = V.dim
    expected = mixed_expected(alg, monos, d)
    labels, parity, degree = [], [], []
    for m in monos:
        for b in range(d):
            labels.append(f"{divided_of(m).label()}(x){V.space.labels[b]}")
            parity.append((len(m.u) + V.space.parity[b]) % 2)
            degree.append(m.length + V.space.degree[b])
    space = GradedSpace.build(labels, parity, degree, p)
    tried = []
    for family, conv in _sign_conventions(alg.l):
        diag = np.array([conv[len(m.u)] % p for m in monos for _ in range(d)], dtype=np.int64)
        # Theta is diagonal, and its own inverse since the entries are +-1
        pulled = diag[None, :, None] * P.action * diag[None, None, :] % p
        mismatch = sum(int(np.count_nonzero((pulled[a] - expected[a]) % p)) for a in range(alg.nneg))
        tried.append({"convention": list(conv), "family": family, "mismatched_entries": mismatch})
        if mismatch:
            continue
        mixed = LModule(alg, space, pulled, "mixed", {"monomials": monos, "V": V.name})
        positive = is_positively_graded(mixed)
        transitive = is_transitive(mixed)[0] if positive else False
        z_zero = mixed.z_annihilated()
        module_ok = mixed.compatibility_violation() is None
        theta = SuperMap(space, P.space, np.diag(diag), 0, 0)
        return {
            "pass": positive and transitive and z_zero and module_ok,
            "sign_convention": list(conv),
            "sign_family": family,
            "dimension": mixed.dim,
            "expected_dimension": 2 ** alg.l * p ** sum(alg.m) * d,
            "positively_graded": positive,
            "transitive": transitive,
            "z_annihilated": z_zero,
            "module": module_ok,
            "tried": tried,
            "mixed": mixed,
            "theta": theta,
        }
    raise VerificationError("no sign convention transports Coind onto the mixed product",
                            tried)
