"""Generalized reduced Verma modules Ind_K(V) and coinduced modules Coind_K(V).

Ind_K(V) has basis e^alpha xi^u (x) v with Z-degree -(|alpha|+|u|) + deg v.
Coind_K(V) has basis chi_v^(beta,t), the left theta-linear map sending
e^alpha xi^u to (-1)^(d(chi)|u|) delta delta v; its Z-degree is
|beta| + |t| + deg v, so it is positively graded.

Coinduced modules are built over the K-module exactly as passed in; the
sigma twist is applied by the caller choosing V or ``twist(V, s)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fp_linalg as fp
from .cartan_witt import WittAlgebra
from .enveloping import PBWMonomial, Straightener, pbw_basis, top_monomial
from .modules import KModule, LModule, ModuleError, dual_module
from .superspace import GradedSpace, SuperMap, sign_vector


def straightener(alg: WittAlgebra) -> Straightener:
    st = alg.__dict__.get("_straightener")
    if st is None:
        st = Straightener(alg)
        alg.__dict__["_straightener"] = st
    return st


# ---------------------------------------------------------------------------
# K-modules


def compute_sigma(alg: WittAlgebra) -> dict[int, int]:
    return alg.sigma()


def twist(V: KModule, s: int) -> KModule:
    """x o v = x.v + s sigma(x) v."""
    if s not in (-1, 0, 1):
        raise ValueError("twist coefficient must be -1, 0 or +1")
    if s == 0:
        return V
    if V.twist_coeff + s not in (-1, 0, 1):
        raise ValueError(f"cannot twist a module with twist_coeff {V.twist_coeff} by {s}")
    p = V.p
    sig = V.alg.sigma()
    act = V.action.copy()
    eye = fp.identity(V.dim)
    for a, val in sig.items():
        if val:
            act[a - V.alg.nneg] = (act[a - V.alg.nneg] + s * val * eye) % p
    suffix = {1: "_sigma", -1: "_-sigma"}
    name = V.name
    for suf in suffix.values():
        if name.endswith(suf):
            name = name[: -len(suf)]
    total = V.twist_coeff + s
    out = KModule(V.alg, V.space, act, total, name + suffix.get(total, ""))
    w = out.compatibility_violation()
    if w is not None:
        raise ModuleError("twisted module fails bracket compatibility", w)
    return out


def extend_to_K(alg: WittAlgebra, space: GradedSpace, l0_action: dict[int, np.ndarray],
                name: str = "V") -> KModule:
    """K-module with the given L_0 matrices and L^+ acting by zero."""
    d = space.dim
    act = np.zeros((len(alg.k_indices), d, d), dtype=np.int64)
    for a in alg.l0_indices:
        act[a - alg.nneg] = fp.reduce_mod(l0_action.get(a, np.zeros((d, d))), alg.p)
    V = KModule(alg, space, act, 0, name)
    return V.validate()


def trivial_module(alg: WittAlgebra) -> KModule:
    space = GradedSpace.build(["v"], [0], [0], alg.p)
    return extend_to_K(alg, space, {}, "trivial")


def natural_module(alg: WittAlgebra) -> KModule:
    """L_0 acting on L_{-1} by the adjoint action."""
    nneg = alg.nneg
    space = GradedSpace.build(alg.labels[:nneg], alg.parity[:nneg], [0] * nneg, alg.p)
    return extend_to_K(alg, space, {a: alg.rho_LK(a) for a in alg.l0_indices}, "natural")


def dual_natural_module(alg: WittAlgebra) -> KModule:
    V = dual_module(natural_module(alg))
    V = KModule(V.alg, V.space.regraded([0] * V.dim), V.action, 0, "dual_natural")
    return V.validate()


def adjoint0_module(alg: WittAlgebra) -> KModule:
    l0 = alg.l0_indices
    space = GradedSpace.build([alg.labels[a] for a in l0], alg.parity[l0], [0] * len(l0), alg.p)
    return extend_to_K(alg, space, {a: alg.ad(a)[np.ix_(l0, l0)] for a in l0}, "adjoint0")


def character_module(alg: WittAlgebra, values: dict[int, int], name: str = "char") -> KModule:
    """One-dimensional even L_0-module on which x acts by values[x]."""
    space = GradedSpace.build(["v"], [0], [0], alg.p)
    return extend_to_K(alg, space, {a: np.array([[values.get(a, 0)]]) for a in alg.l0_indices}, name)


def half_twist_module(alg: WittAlgebra) -> KModule:
    """The character -sigma/2; it is the unique character c with F_c = (F_c sigma)^*."""
    p = alg.p
    half = fp.inv_mod(2, p)
    sig = alg.sigma()
    return character_module(alg, {a: (-sig[a] * half) % p for a in alg.l0_indices}, "half_twist")


BUILTIN_MODULES = {
    "trivial": trivial_module,
    "natural": natural_module,
    "dual_natural": dual_natural_module,
    "adjoint0": adjoint0_module,
    "half_twist": half_twist_module,
}


def builtin_module(alg: WittAlgebra, name: str) -> KModule:
    try:
        return BUILTIN_MODULES[name](alg)
    except KeyError:
        raise ValueError(f"unknown module {name!r}; choose from {sorted(BUILTIN_MODULES)}") from None


# ---------------------------------------------------------------------------
# induced module


def induce(V: KModule, validate: bool = True) -> LModule:
    """Ind_K(V) = U(L) (x)_theta V, acting through left_mult."""
    alg = V.alg
    st = straightener(alg)
    monos = pbw_basis(alg)
    midx = {m: i for i, m in enumerate(monos)}
    d = V.dim
    n = len(monos) * d
    labels, parity, degree = [], [], []
    for m in monos:
        for b in range(d):
            labels.append(f"{m.label()}|{V.space.labels[b]}")
            parity.append((m.parity + V.space.parity[b]) % 2)
            degree.append(m.zdegree + V.space.degree[b])
    space = GradedSpace.build(labels, parity, degree, alg.p)
    act = np.zeros((alg.dim, n, n), dtype=np.int64)
    eye = fp.identity(d)
    for x in range(alg.dim):
        for i, m in enumerate(monos):
            for t in st.left_mult(x, m):
                j = midx[t.mono]
                block = eye if not t.tail else V.word_matrix(t.tail)
                act[x, j * d:(j + 1) * d, i * d:(i + 1) * d] += t.coeff * block
    act %= alg.p
    mod = LModule(alg, space, act, "induced", {"V": V.name, "monomials": monos})
    return mod.validate() if validate else mod


# ---------------------------------------------------------------------------
# coinduced module


def chi_signs(monos: list[PBWMonomial], V: KModule) -> np.ndarray:
    """s[(beta,t), b] = (-1)^(d(chi) |t|) with d(chi) = |t| + d(v_b)."""
    p = V.p
    out = []
    for m in monos:
        t = len(m.u)
        for b in range(V.dim):
            out.append(fp.sign(((t + V.space.parity[b]) * t), p))
    return np.array(out, dtype=np.int64)


def coinduce(V: KModule, validate: bool = True) -> LModule:
    """Coind_K(V) = Hom_theta(U(L), V) with (y.f)(x) = (-1)^(d(y)(d(f)+d(x))) f(xy)."""
    alg = V.alg
    p = alg.p
    st = straightener(alg)
    monos = pbw_basis(alg)
    midx = {m: i for i, m in enumerate(monos)}
    d = V.dim
    n = len(monos) * d
    vpar = np.array(V.space.parity, dtype=np.int64)
    labels, parity, degree = [], [], []
    for m in monos:
        for b in range(d):
            labels.append(f"chi[{V.space.labels[b]}]({m.label()})")
            parity.append((len(m.u) + vpar[b]) % 2)
            degree.append(m.length + V.space.degree[b])
    space = GradedSpace.build(labels, parity, degree, p)

    # value coordinates: g_(N,b) is the theta-linear map with g(N) = v_b
    act = np.zeros((alg.dim, n, n), dtype=np.int64)
    eye = fp.identity(d)
    for y in range(alg.dim):
        dy = int(alg.parity[y])
        for i, m in enumerate(monos):  # row monomial e^alpha xi^u
            du = len(m.u)
            for t in st.right_mult(m, y):
                j = midx[t.mono]
                dw = sum(int(alg.parity[a]) for a in t.tail) % 2
                w = eye if not t.tail else V.word_matrix(t.tail)
                dg = (len(t.mono.u) + vpar) % 2  # parity of g_(N', b) per b
                col_sign = np.where((dy * (dg + du) + dw * dg) % 2 == 1, p - 1, 1)
                act[y, i * d:(i + 1) * d, j * d:(j + 1) * d] += t.coeff * w * col_sign[None, :]
    act %= p
    s = chi_signs(monos, V)
    act = (s[None, :, None] * act * s[None, None, :]) % p
    mod = LModule(alg, space, act, "coinduced", {"V": V.name, "monomials": monos})
    return mod.validate() if validate else mod


def chi_index(monos: list[PBWMonomial], V: KModule, mono: PBWMonomial, b: int) -> int:
    return monos.index(mono) * V.dim + b


def chi_vector(P: LModule, V: KModule, mono: PBWMonomial, v: np.ndarray) -> np.ndarray:
    """Coordinates of chi_v^(mono) for a homogeneous vector v of V."""
    monos = P.meta["monomials"]
    out = np.zeros(P.dim, dtype=np.int64)
    i = monos.index(mono)
    out[i * V.dim:(i + 1) * V.dim] = v
    return out % V.p


def evaluate(P: LModule, V: KModule, f: np.ndarray, mono: PBWMonomial) -> np.ndarray:
    """f(e^alpha xi^u) for f given in chi coordinates (f may be inhomogeneous)."""
    monos = P.meta["monomials"]
    i = monos.index(mono)
    s = chi_signs(monos, V)
    return (f * s)[i * V.dim:(i + 1) * V.dim] % V.p


# ---------------------------------------------------------------------------
# grading, mu, transitivity


@dataclass
class GradingReport:
    degrees: list[int]
    negative: list[int]
    violation: tuple | None

    @property
    def ok(self) -> bool:
        return not self.negative and self.violation is None


def grade_P(P: LModule) -> GradingReport:
    """P-degree |beta|+|t| of each chi; checks L_j P_i within P_(i+j)."""
    monos = P.meta["monomials"]
    d = P.dim // len(monos)
    degs = [m.length for m in monos for _ in range(d)]
    neg = [i for i, g in enumerate(degs) if g < 0]
    degs_arr = np.array(degs)
    viol = None
    for x in range(P.alg.dim):
        bad = (P.action[x] != 0) & (degs_arr[:, None] != degs_arr[None, :] + P.alg.degree[x])
        w = fp.first_nonzero(bad)
        if w is not None:
            viol = (x,) + w
            break
    return GradingReport(degs, neg, viol)


def mu_iso(P: LModule, V: KModule) -> tuple[SuperMap, int, bool]:
    """mu(f) = f(1) on P_0; returns (map, residual count, bijective)."""
    monos = P.meta["monomials"]
    d = V.dim
    one = monos.index(PBWMonomial((0,) * P.alg.k))
    p0 = list(range(one * d, (one + 1) * d))
    p0_space = GradedSpace(tuple(P.space.labels[i] for i in p0), tuple(P.space.parity[i] for i in p0),
                           tuple(P.space.degree[i] for i in p0), P.p)
    mat = np.zeros((d, d), dtype=np.int64)
    for c, i in enumerate(p0):
        basis_vec = np.zeros(P.dim, dtype=np.int64)
        basis_vec[i] = 1
        mat[:, c] = evaluate(P, V, basis_vec, monos[one])
    mu = SuperMap(p0_space, V.space, mat, 0, 0)
    resid = 0
    for x in P.alg.l0_indices:
        blk = P.action[x][np.ix_(p0, p0)]
        leak = np.delete(P.action[x][:, p0], p0, axis=0)
        resid += int(np.count_nonzero(leak % P.p))
        diff = (fp.matmul(mat, blk, P.p) - fp.matmul(V.matrix(x), mat, P.p)) % P.p
        resid += int(np.count_nonzero(diff))
    return mu, resid, fp.rank(mat, P.p) == d


def is_positively_graded(M: LModule) -> bool:
    if min(M.space.degree, default=0) < 0:
        return False
    return M.homogeneity_violation(check_degree=True) is None


class PreconditionError(ValueError):
    pass


def is_transitive(M: LModule) -> tuple[bool, np.ndarray | None]:
    """Compare the joint kernel of L^- with the degree-0 component."""
    if not is_positively_graded(M):
        raise PreconditionError("module is not positively graded")
    alg = M.alg
    stack = np.vstack([M.action[a] for a in alg.neg_basis])
    ker = fp.nullspace(stack, M.p)
    deg = M.space.deg
    outside = deg != 0
    for j in range(ker.shape[1]):
        if np.any(ker[outside, j]):
            return False, ker[:, j]
    if ker.shape[1] != int(np.sum(deg == 0)):
        # positivity forces V_0 into the kernel, so this cannot happen
        return False, None
    return True, None


def module_degree_zero(M: LModule) -> KModule:
    """M_0 as a K-module: L_0 acts by restriction, L^+ by zero (pr_0)."""
    deg = np.array(M.space.degree)
    idx = [i for i in range(M.dim) if deg[i] == 0]
    alg = M.alg
    space = GradedSpace(tuple(M.space.labels[i] for i in idx), tuple(M.space.parity[i] for i in idx),
                        tuple(0 for _ in idx), M.p)
    return extend_to_K(alg, space, {a: M.action[a][np.ix_(idx, idx)] for a in alg.l0_indices}, "M0")


def top_index(P: LModule) -> int:
    return P.meta["monomials"].index(top_monomial(P.alg))
