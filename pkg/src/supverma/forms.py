"""Bilinear forms on modules: symmetry, invariance, radical and the zeta bridge.

A form is stored as its Gram matrix, gram[i, j] = lambda(b_i, b_j).  Forms
need not be homogeneous.  Invariance means

    lambda(x.v, w) = -(-1)^(d(v)d(x)) lambda(v, x.w),

i.e. A_x^T G + S_x G A_x = 0 with S_x = diag((-1)^(d(x)d(b_i))).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fp_linalg as fp
from .enveloping import PBWMonomial, top_monomial
from .modules import KModule, LModule, dual_module
from .superspace import GradedSpace, SuperMap, sign_vector
from .verma import twist


class FormError(ValueError):
    def __init__(self, msg: str, witness=None):
        super().__init__(msg if witness is None else f"{msg}: witness {witness}")
        self.witness = witness


@dataclass(frozen=True)
class BilinearForm:
    space: GradedSpace
    gram: np.ndarray

    def __post_init__(self):
        if self.gram.shape != (self.space.dim, self.space.dim):
            raise ValueError(f"Gram shape {self.gram.shape} does not match dim {self.space.dim}")

    @property
    def p(self) -> int:
        return self.space.p

    def __call__(self, v: np.ndarray, w: np.ndarray) -> int:
        return int(v @ self.gram @ w % self.p)

    def parity_parts(self) -> tuple["BilinearForm", "BilinearForm"]:
        par = self.space.par
        even = (par[:, None] + par[None, :]) % 2 == 0
        return (BilinearForm(self.space, np.where(even, self.gram, 0)),
                BilinearForm(self.space, np.where(even, 0, self.gram)))

    def parity(self) -> int | None:
        """0 or 1 for a homogeneous nonzero form, None otherwise (0 for the zero form)."""
        ev, od = self.parity_parts()
        if not np.any(od.gram):
            return 0
        if not np.any(ev.gram):
            return 1
        return None

    def to_json(self) -> list[list[int]]:
        return self.gram.astype(int).tolist()


def _koszul(space: GradedSpace) -> np.ndarray:
    par = space.par
    return np.where((par[:, None] * par[None, :]) % 2 == 1, space.p - 1, 1)


def is_supersymmetric(lam: BilinearForm) -> bool:
    return not np.any((lam.gram - _koszul(lam.space) * lam.gram.T) % lam.p)


def is_skew(lam: BilinearForm) -> bool:
    return not np.any((lam.gram + _koszul(lam.space) * lam.gram.T) % lam.p)


def symmetry_type(lam: BilinearForm) -> str:
    sup, sk = is_supersymmetric(lam), is_skew(lam)
    if sup and sk:
        return "both"
    return "supersymmetric" if sup else "skew" if sk else "neither"


def invariance_violation(lam: BilinearForm, M: LModule) -> tuple | None:
    p = lam.p
    G = lam.gram
    for x in range(M.alg.dim):
        A = M.action[x]
        s = sign_vector(M.space.par, int(M.alg.parity[x]), p)
        resid = (fp.matmul(A.T, G, p) + s[:, None] * fp.matmul(G, A, p)) % p
        w = fp.first_nonzero(resid)
        if w is not None:
            return M.alg.labels[x], M.space.labels[w[0]], M.space.labels[w[1]]
    return None


def is_invariant(lam: BilinearForm, M: LModule) -> tuple[bool, tuple | None]:
    if lam.space.dim != M.dim:
        raise ValueError("form and module live on different spaces")
    w = invariance_violation(lam, M)
    return w is None, w


def radical(lam: BilinearForm) -> np.ndarray:
    """Basis (columns) of {v : lambda(v, w) = 0 for all w}."""
    return fp.nullspace(lam.gram.T, lam.p)


def radical_dim(lam: BilinearForm) -> int:
    return lam.space.dim - fp.rank(lam.gram, lam.p)


def radical_is_submodule(lam: BilinearForm, M: LModule) -> bool:
    rad = radical(lam)
    if rad.shape[1] == 0:
        return True
    return all(fp.in_span(rad, fp.matmul(M.action[x], rad, lam.p), lam.p) for x in range(M.alg.dim))


def symmetrize(beta: BilinearForm) -> BilinearForm:
    return BilinearForm(beta.space, (beta.gram + _koszul(beta.space) * beta.gram.T) % beta.p)


# ---------------------------------------------------------------------------
# forms <-> maps into the dual


def form_to_map(lam: BilinearForm, parity: int | None = None) -> SuperMap:
    """phi(v)(w) := lambda(v, w), written against the dual basis."""
    par = lam.parity() if parity is None else parity
    if par is None:
        raise FormError("form is not homogeneous; split it with parity_parts first")
    return SuperMap(lam.space, lam.space.dual(), lam.gram.T % lam.p, par, 0)


def map_to_form(phi: SuperMap) -> BilinearForm:
    return BilinearForm(phi.source, phi.matrix.T % phi.source.p)


def map_is_homomorphism(phi: SuperMap, M: LModule, Md: LModule) -> tuple[bool, tuple | None]:
    """phi(x.v) = (-1)^(d(x)d(phi)) x.phi(v) for every basis element x."""
    p = M.p
    for x in range(M.alg.dim):
        s = fp.sign(int(M.alg.parity[x]) * phi.parity, p)
        diff = (fp.matmul(phi.matrix, M.action[x], p) - s * fp.matmul(Md.action[x], phi.matrix, p)) % p
        w = fp.first_nonzero(diff)
        if w is not None:
            return False, (M.alg.labels[x],) + w
    return True, None


def bridge_check(lam: BilinearForm, M: LModule) -> dict:
    """Invariance of lambda versus equivariance of its homogeneous parts as maps."""
    Md = dual_module(M)
    inv, _ = is_invariant(lam, M)
    parts_ok = []
    for par, part in enumerate(lam.parity_parts()):
        phi = form_to_map(part, par)
        parts_ok.append(map_is_homomorphism(phi, M, Md)[0])
        back = map_to_form(phi)
        if np.any((back.gram - part.gram) % lam.p):
            raise FormError("form/map translation is not inverse")
    ker = fp.nullspace(lam.gram.T, lam.p)
    return {"invariant": inv, "equivariant": all(parts_ok), "agree": inv == all(parts_ok),
            "kernel_dim": ker.shape[1], "radical_dim": radical_dim(lam)}


# ---------------------------------------------------------------------------
# zeta: V -> (V_sigma)^* and the explicit form on Ind(V_sigma)


def zeta_violation(zeta: SuperMap, V: KModule) -> tuple | None:
    """None when zeta is a homogeneous L_0-isomorphism V -> (V_sigma)^*."""
    alg = V.alg
    p = alg.p
    target = dual_module(twist(V, 1))
    if zeta.matrix.shape != (target.dim, V.dim):
        return ("shape", zeta.matrix.shape)
    w = zeta.parity_violation()
    if w is not None:
        return ("parity",) + tuple(w)
    for a in alg.l0_indices:
        s = fp.sign(int(alg.parity[a]) * zeta.parity, p)
        diff = (fp.matmul(zeta.matrix, V.matrix(a), p) - s * fp.matmul(target.matrix(a), zeta.matrix, p)) % p
        w = fp.first_nonzero(diff)
        if w is not None:
            return ("L0", alg.labels[a]) + w
    if fp.rank(zeta.matrix, p) != V.dim or zeta.matrix.shape[0] != V.dim:
        return ("rank", fp.rank(zeta.matrix, p))
    return None


def zeta_map(V: KModule, matrix, parity: int = 0) -> SuperMap:
    target = dual_module(twist(V, 1))
    return SuperMap(V.space, target.space, fp.reduce_mod(np.asarray(matrix, dtype=np.int64), V.p),
                    parity, 0)


def zeta_symmetry(zeta: SuperMap, V: KModule) -> str:
    """Which of zeta(v)(w) = +-(-1)^(d(v)d(w)) zeta(w)(v) holds."""
    # zeta(v_a)(v_b) = Z[b, a], so the form (a, b) -> zeta(v_a)(v_b) has Gram Z^T
    return symmetry_type(BilinearForm(V.space, zeta.matrix.T % V.p))


def simplified_sign(u: int, t: int, dv1: int, dzeta: int, l: int) -> int:
    """Exponent of -1 for x_1 = e^alpha xi^u, x_2 = e^beta xi^t (sizes |u|, |t|)."""
    return (u * t + t * dv1 + (dzeta + l) * (u + t)) % 2


def shuffle_sign(first: tuple[int, ...], second: tuple[int, ...]) -> int:
    """Exponent of -1 in xi^first xi^second = +- xi^(first + second)."""
    return sum(1 for a in first for b in second if a > b) % 2


def pairing_sign(m1: PBWMonomial, m2: PBWMonomial, dv1: int, dzeta: int, l: int,
                 literal: bool = False) -> int:
    """Sign exponent of lambda(m1 (x) v_1, m2 (x) v_2) relative to zeta(v_1)(v_2).

    The closed form keeps only the Koszul part; the evaluation of
    chi^(pi,E)(x_2^T x_1) also carries the transpose sign of x_2 and the
    shuffle sign of xi^t xi^u, which ``literal=True`` drops.
    """
    e = simplified_sign(len(m1.u), len(m2.u), dv1, dzeta, l)
    if not literal:
        e += sum(m2.alpha) + len(m2.u) + shuffle_sign(m2.u, m1.u)
    return e % 2


def form_from_zeta(zeta: SuperMap, V: KModule, ind: LModule, check: bool = True,
                   literal: bool = False) -> BilinearForm:
    """Gram matrix on Ind(V_sigma) pairing e^alpha xi^u (x) v_1 with e^beta xi^t (x) v_2.

    Nonzero only when alpha + beta = pi and u, t are complementary in
    {1..l}.  ``literal`` selects the simplified sign without the transpose
    and shuffle factors; that variant is generally not invariant.
    """
    if check:
        w = zeta_violation(zeta, V)
        if w is not None:
            raise FormError("zeta is not an L0-isomorphism V -> (V_sigma)^*", w)
    alg = V.alg
    p = alg.p
    monos = ind.meta["monomials"]
    midx = {m: i for i, m in enumerate(monos)}
    top = top_monomial(alg)
    full = set(range(alg.l))
    d = V.dim
    Z = zeta.matrix % p
    G = np.zeros((ind.dim, ind.dim), dtype=np.int64)
    for i, m in enumerate(monos):
        alpha2 = tuple(pi - a for pi, a in zip(top.alpha, m.alpha))
        t = tuple(sorted(full - set(m.u)))
        j = midx[PBWMonomial(alpha2, t)]
        for a in range(d):
            e = pairing_sign(m, monos[j], V.space.parity[a], zeta.parity, alg.l, literal)
            G[i * d + a, j * d:(j + 1) * d] = fp.sign(e, p) * Z[:, a] % p
    return BilinearForm(ind.space, G)


def zeta_from_form(lam: BilinearForm, V: KModule, ind: LModule, check: bool = True,
                   literal: bool = False) -> SuperMap:
    """Read zeta(v_1)(v_2) off lambda(1 (x) v_1, e^pi xi^E (x) v_2)."""
    alg = V.alg
    p = alg.p
    if check:
        if radical_dim(lam) != 0:
            raise FormError("form is degenerate", radical_dim(lam))
        ok, w = is_invariant(lam, ind)
        if not ok:
            raise FormError("form is not invariant", w)
    monos = ind.meta["monomials"]
    d = V.dim
    i0 = monos.index(PBWMonomial((0,) * alg.k))
    it = monos.index(top_monomial(alg))
    raw = lam.gram[i0 * d:(i0 + 1) * d, it * d:(it + 1) * d] % p  # raw[a, b]
    vpar = np.array(V.space.parity)
    nz = np.argwhere(raw != 0)
    pars = {int(vpar[a] + vpar[b]) % 2 for a, b in nz}
    if len(pars) > 1:
        raise FormError("extracted zeta is not homogeneous")
    dz = pars.pop() if pars else 0
    Z = np.zeros((d, d), dtype=np.int64)
    one, top = monos[i0], monos[it]
    for a in range(d):
        e = pairing_sign(one, top, int(vpar[a]), dz, alg.l, literal)
        Z[:, a] = fp.sign(e, p) * raw[a, :] % p
    zeta = zeta_map(V, Z, dz)
    if check:
        w = zeta_violation(zeta, V)
        if w is not None:
            raise FormError("extracted zeta fails the L0-isomorphism check", w)
        if zeta_symmetry(zeta, V) == "neither":
            raise FormError("extracted zeta satisfies neither symmetry condition")
    return zeta


def find_zeta(V: KModule, rng=None) -> SuperMap | None:
    """An L0-isomorphism V -> (V_sigma)^* with one of the two symmetries, if any.

    Searches the even then the odd hom space; exact enumeration when the
    space is small, seeded sampling otherwise.
    """
    import itertools

    from .isomorphisms import hom_space_small
    from .rng import SplitMix64

    alg = V.alg
    p = alg.p
    target = dual_module(twist(V, 1))
    l0 = [a - alg.nneg for a in alg.l0_indices]
    for par in (0, 1):
        basis = hom_space_small(V.action[l0], V.space, target.action[l0], target.space,
                                alg.parity[alg.l0_indices], par, p)
        if not basis:
            continue
        stack = np.stack(basis)
        r = len(basis)
        if p ** r <= 3 ** 6:
            combos = (c for c in itertools.product(range(p), repeat=r) if any(c))
        else:
            gen = rng or SplitMix64(0)
            combos = ([gen.below(p) for _ in range(r)] for _ in range(256))
        for c in combos:
            Z = np.tensordot(np.array(c, dtype=np.int64), stack, axes=(0, 0)) % p
            z = SuperMap(V.space, target.space, Z, par, 0)
            if zeta_violation(z, V) is None and zeta_symmetry(z, V) != "neither":
                return z
    return None
