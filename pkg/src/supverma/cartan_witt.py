"""The divided power superalgebra O(k,l,m) and the Witt superalgebra W(k,l,m).

Elements of O are dicts ``DividedMonomial -> coefficient``.  The Lie
superalgebra W is tabulated once as a dense structure-constant tensor
``C[a, b, c]`` (coefficient of basis element c in [a, b]).

Basis order of W is (Z-degree, derivation, monomial).  In particular the
first ``k + l`` basis elements are D_1..D_k, d_1..d_l, so every index below
``nneg`` lies in L^- and every index from ``nneg`` on lies in K = L_0 + L^+.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np

from . import fp_linalg as fp
from .superspace import GradedSpace, supertrace


@dataclass(frozen=True, order=True)
class DividedMonomial:
    """x^(alpha) xi^u with u a strictly increasing tuple of 0-based odd indices."""

    alpha: tuple[int, ...]
    u: tuple[int, ...] = ()

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.u, self.u[1:])):
            raise ValueError(f"u must be strictly increasing, got {self.u}")

    @property
    def parity(self) -> int:
        return len(self.u) % 2

    @property
    def zdegree(self) -> int:
        return sum(self.alpha) + len(self.u)

    def label(self) -> str:
        parts = []
        if any(self.alpha):
            parts.append("x^(" + ",".join(map(str, self.alpha)) + ")")
        parts.extend(f"xi{j + 1}" for j in self.u)
        return "".join(parts) or "1"


def check_params(p: int, k: int, l: int, m: Iterable[int]) -> tuple[int, int, int, tuple[int, ...]]:
    p = fp.check_modulus(p)
    m = tuple(int(x) for x in m)
    if k < 1 or l < 1:
        raise ValueError(f"need k, l >= 1 (got k={k}, l={l})")
    if len(m) != k or any(x < 1 for x in m):
        raise ValueError(f"m must be {k} positive integers, got {m}")
    return p, int(k), int(l), m


def divided_basis(p: int, k: int, l: int, m: tuple[int, ...]) -> list[DividedMonomial]:
    ranges = [range(p ** mi) for mi in m]
    subsets = [u for s in range(l + 1) for u in itertools.combinations(range(l), s)]
    return sorted((DividedMonomial(tuple(a), u) for a in itertools.product(*ranges) for u in subsets),
                  key=lambda f: (f.zdegree, f.alpha, f.u))


def _add(acc: dict, key, c: int, p: int) -> None:
    v = (acc.get(key, 0) + c) % p
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


def divided_product(a: DividedMonomial, b: DividedMonomial, p: int,
                    m: tuple[int, ...]) -> dict[DividedMonomial, int]:
    """x^(a)xi^u * x^(b)xi^t = C(a+b, a) sign(u,t) x^(a+b) xi^(u cup t)."""
    if set(a.u) & set(b.u):
        return {}
    s = tuple(x + y for x, y in zip(a.alpha, b.alpha))
    if any(si >= p ** mi for si, mi in zip(s, m)):
        return {}
    c = fp.binom_mod_p(s, a.alpha, p)
    if c == 0:
        return {}
    # sorting the concatenated odd indices: one sign per inversion
    inversions = sum(1 for i in a.u for j in b.u if i > j)
    c = c * fp.sign(inversions, p) % p
    return {DividedMonomial(s, tuple(sorted(a.u + b.u))): c}


def apply_D(i: int, f: DividedMonomial, p: int) -> dict[DividedMonomial, int]:
    if not 0 <= i < len(f.alpha):
        raise IndexError(f"D index {i} out of range")
    if f.alpha[i] == 0:
        return {}
    a = list(f.alpha)
    a[i] -= 1
    return {DividedMonomial(tuple(a), f.u): 1}


def apply_d(j: int, f: DividedMonomial, p: int, l: int | None = None) -> dict[DividedMonomial, int]:
    if j < 0 or (l is not None and j >= l):
        raise IndexError(f"d index {j} out of range")
    if j not in f.u:
        return {}
    pos = f.u.index(j)  # = u(j), the number of odd indices below j
    return {DividedMonomial(f.alpha, f.u[:pos] + f.u[pos + 1:]): fp.sign(pos, p)}


@dataclass(frozen=True)
class WittBasisElement:
    f: DividedMonomial
    der: int  # 0..k-1 -> D_{der+1}; k..k+l-1 -> d_{der-k+1}
    k: int

    @property
    def der_parity(self) -> int:
        return 0 if self.der < self.k else 1

    @property
    def parity(self) -> int:
        return (self.f.parity + self.der_parity) % 2

    @property
    def zdegree(self) -> int:
        return self.f.zdegree - 1

    def label(self) -> str:
        d = f"D{self.der + 1}" if self.der < self.k else f"d{self.der - self.k + 1}"
        return d if self.f.label() == "1" else f"{self.f.label()}*{d}"


class WittAlgebra:
    """W(k,l,m) over F_p with a dense structure-constant table."""

    def __init__(self, p: int, k: int, l: int, m: Iterable[int], *, table: np.ndarray | None = None):
        self.p, self.k, self.l, self.m = check_params(p, k, l, m)
        self.monomials = divided_basis(self.p, self.k, self.l, self.m)
        elems = [WittBasisElement(f, d, self.k) for f in self.monomials for d in range(self.k + self.l)]
        elems.sort(key=lambda e: (e.zdegree, e.der, e.f.zdegree, e.f.alpha, e.f.u))
        self.basis: list[WittBasisElement] = elems
        self.index = {(e.f, e.der): i for i, e in enumerate(elems)}
        self.labels = [e.label() for e in elems]
        self.parity = np.array([e.parity for e in elems], dtype=np.int64)
        self.degree = np.array([e.zdegree for e in elems], dtype=np.int64)
        self.nneg = self.k + self.l
        self.z_exponents = tuple(self.p ** mi for mi in self.m)
        self.pi = tuple(z - 1 for z in self.z_exponents)
        self.table = self._tabulate() if table is None else fp.reduce_mod(table, self.p)

    # -- basic data ---------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def neg_basis(self) -> list[int]:
        return list(range(self.nneg))

    @property
    def k_indices(self) -> list[int]:
        return list(range(self.nneg, self.dim))

    @property
    def l0_indices(self) -> list[int]:
        return [i for i in range(self.dim) if self.degree[i] == 0]

    @property
    def lplus_indices(self) -> list[int]:
        return [i for i in range(self.dim) if self.degree[i] > 0]

    @cached_property
    def space(self) -> GradedSpace:
        return GradedSpace(tuple(self.labels), tuple(int(x) for x in self.parity),
                           tuple(int(x) for x in self.degree), self.p)

    def D(self, i: int) -> int:
        """Basis index of D_{i+1}."""
        return i

    def d(self, j: int) -> int:
        """Basis index of d_{j+1}."""
        return self.k + j

    def element(self, alpha, u, der: int) -> int:
        return self.index[(DividedMonomial(tuple(alpha), tuple(u)), der)]

    def expected_dim(self) -> int:
        return 2 ** self.l * self.p ** sum(self.m) * (self.k + self.l)

    # -- derivations of O -----------------------------------------------------

    def apply_derivation(self, der: int, f: DividedMonomial) -> dict[DividedMonomial, int]:
        if der < self.k:
            return apply_D(der, f, self.p)
        return apply_d(der - self.k, f, self.p, self.l)

    def act_on_O(self, a: int, g: DividedMonomial) -> dict[DividedMonomial, int]:
        """(f * der)(g) = f * der(g)."""
        e = self.basis[a]
        out: dict[DividedMonomial, int] = {}
        for h, c in self.apply_derivation(e.der, g).items():
            for q, c2 in divided_product(e.f, h, self.p, self.m).items():
                _add(out, q, c * c2, self.p)
        return out

    def witt_bracket(self, a: int, b: int) -> dict[int, int]:
        """[f D, g D'] = f D(g) D' - (-1)^(|x||y|) g D'(f) D."""
        x, y = self.basis[a], self.basis[b]
        p = self.p
        out: dict[int, int] = {}
        for h, c in self.act_on_O(a, y.f).items():
            _add(out, self.index[(h, y.der)], c, p)
        s = fp.sign(x.parity * y.parity, p)
        for h, c in self.act_on_O(b, x.f).items():
            _add(out, self.index[(h, x.der)], -s * c, p)
        return out

    def _tabulate(self) -> np.ndarray:
        n = self.dim
        t = np.zeros((n, n, n), dtype=np.int64)
        for a in range(n):
            for b in range(n):
                for c, v in self.witt_bracket(a, b).items():
                    t[a, b, c] = v
        return t

    # -- table-driven queries -------------------------------------------------

    def bracket(self, a: int, b: int) -> dict[int, int]:
        row = self.table[a, b]
        return {int(c): int(row[c]) for c in np.nonzero(row)[0]}

    def bracket_vec(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Bracket of coordinate vectors (assumed homogeneous is not required)."""
        return fp.reduce_mod(np.einsum("a,b,abc->c", x, y, self.table), self.p)

    def ad(self, a: int) -> np.ndarray:
        """Matrix of ad(basis a): column b holds [a, b]."""
        return self.table[a].T.copy()

    @cached_property
    def ad_all(self) -> np.ndarray:
        return np.transpose(self.table, (0, 2, 1)).copy()

    def operator_matrix(self, a: int) -> np.ndarray:
        """Matrix of basis element a acting on O(k,l,m) (column = image)."""
        idx = {f: i for i, f in enumerate(self.monomials)}
        mat = fp.zeros(len(self.monomials), len(self.monomials))
        for j, g in enumerate(self.monomials):
            for h, c in self.act_on_O(a, g).items():
                mat[idx[h], j] = c
        return mat

    @cached_property
    def operators(self) -> np.ndarray:
        return np.stack([self.operator_matrix(a) for a in range(self.dim)])

    def rho_LK(self, a: int) -> np.ndarray:
        """Action of a K-element on L/K, basis = images of D_i, d_j."""
        return self.ad(a)[: self.nneg, : self.nneg].copy()

    @cached_property
    def neg_space(self) -> GradedSpace:
        return GradedSpace(tuple(self.labels[: self.nneg]),
                           tuple(int(x) for x in self.parity[: self.nneg]),
                           tuple([0] * self.nneg), self.p)

    def sigma(self) -> dict[int, int]:
        """sigma(x) = str(rho(x)) for every K basis element."""
        return {a: supertrace(self.rho_LK(a), self.neg_space) for a in self.k_indices}

    # -- verification ---------------------------------------------------------

    def check(self) -> "AlgebraCheck":
        return check_algebra(self)

    # -- serialization --------------------------------------------------------

    def to_json(self) -> dict:
        nz = np.argwhere(self.table != 0)
        return {
            "type": "W",
            "p": self.p,
            "k": self.k,
            "l": self.l,
            "m": list(self.m),
            "basis": [
                {"label": lab, "parity": int(par), "degree": int(deg)}
                for lab, par, deg in zip(self.labels, self.parity, self.degree)
            ],
            "structure_constants": [[int(a), int(b), int(c), int(self.table[a, b, c])] for a, b, c in nz],
        }

    @classmethod
    def from_json(cls, data: dict) -> "WittAlgebra":
        alg = cls(data["p"], data["k"], data["l"], data["m"], table=np.zeros((1, 1, 1), dtype=np.int64))
        n = alg.dim
        if [b["label"] for b in data["basis"]] != alg.labels:
            raise ValueError("basis labels in dump do not match W(k,l,m)")
        t = np.zeros((n, n, n), dtype=np.int64)
        for a, b, c, v in data["structure_constants"]:
            t[a, b, c] = v % alg.p
        alg.table = t
        return alg

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))


def build_W(p: int, k: int, l: int, m: Iterable[int], check: bool = True) -> WittAlgebra:
    alg = WittAlgebra(p, k, l, m)
    if check:
        report = check_algebra(alg)
        if not report.ok:
            raise AlgebraError(report)
    return alg


class AlgebraError(Exception):
    def __init__(self, report: "AlgebraCheck"):
        super().__init__(report.summary())
        self.report = report


@dataclass
class AlgebraCheck:
    dimension_ok: bool = True
    anticommutative: tuple[int, int] | None = None
    jacobi: tuple[int, int, int] | None = None
    abelian_neg: tuple[int, int] | None = None
    grading: tuple[int, int] | None = None
    derivation: tuple[int, int] | None = None
    nilpotent_D: int | None = None
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return (self.dimension_ok and self.anticommutative is None and self.jacobi is None
                and self.abelian_neg is None and self.grading is None
                and self.derivation is None and self.nilpotent_D is None)

    def witnesses(self) -> dict:
        return {k: v for k, v in {
            "anticommutativity": self.anticommutative,
            "jacobi": self.jacobi,
            "abelian_L_minus": self.abelian_neg,
            "grading": self.grading,
            "derivation_oracle": self.derivation,
            "ad_D_nilpotency": self.nilpotent_D,
        }.items() if v is not None}

    def summary(self) -> str:
        if self.ok:
            return "algebra checks passed"
        return "algebra check failed: " + ", ".join(f"{k}={v}" for k, v in self.witnesses().items())


def anticommutativity_violation(alg: WittAlgebra):
    p = alg.p
    t = alg.table
    s = np.where(np.outer(alg.parity, alg.parity) % 2 == 1, p - 1, 1)
    resid = (t + s[:, :, None] * np.transpose(t, (1, 0, 2))) % p
    w = fp.first_nonzero(resid)
    return None if w is None else w[:2]


def jacobi_violation(alg: WittAlgebra):
    """First (x, y, z) breaking (-1)^{xz}[x,[y,z]] + cyclic = 0.

    Exhaustive over all triples, chunked over x to bound memory.
    """
    p, n, t = alg.p, alg.dim, alg.table
    tf = t.astype(np.float64)
    par = alg.parity
    sgn = np.where(np.outer(par, par) % 2 == 1, p - 1, 1)
    # right factor: [a, w]_v laid out as (w, a v)
    aw = np.transpose(tf, (1, 0, 2)).reshape(n, n * n)
    step = max(1, int(2e7 // max(1, n ** 3)))
    for lo in range(0, n, step):
        X = list(range(lo, min(n, lo + step)))
        c = len(X)
        # [x,[y,z]]: sum_w t[y,z,w] t[x,w,v] -> (y z, x v)
        t1 = np.mod(tf.reshape(n * n, n) @ aw.reshape(n, n, n)[:, X, :].reshape(n, c * n), p)
        t1 = np.transpose(t1.reshape(n, n, c, n), (2, 0, 1, 3))
        # [y,[z,x]]: sum_w t[z,x,w] t[y,w,v] -> (z x, y v)
        t2 = np.mod(tf[:, X, :].reshape(n * c, n) @ aw, p)
        t2 = np.transpose(t2.reshape(n, c, n, n), (1, 2, 0, 3))
        # [z,[x,y]]: sum_w t[x,y,w] t[z,w,v] -> (x y, z v)
        t3 = np.mod(tf[X].reshape(c * n, n) @ aw, p).reshape(c, n, n, n)
        s = sgn[X]
        resid = (s[:, None, :, None] * t1.astype(np.int64)
                 + sgn[:, X].T[:, :, None, None] * t2.astype(np.int64)
                 + sgn.T[None, :, :, None] * t3.astype(np.int64)) % p
        w = fp.first_nonzero(resid)
        if w is not None:
            return (X[w[0]], w[1], w[2])
    return None


def bracket_oracle(alg: WittAlgebra, a: int, b: int) -> np.ndarray:
    """[a, b] recovered from the operator supercommutator on O.

    The representation of W on O is faithful, so the coordinates are the
    unique solution of a linear system.
    """
    p = alg.p
    ops = alg.operators
    s = fp.sign(int(alg.parity[a] * alg.parity[b]), p)
    comm = (fp.matmul(ops[a], ops[b], p) - s * fp.matmul(ops[b], ops[a], p)) % p
    basis = ops.reshape(alg.dim, -1).T
    x, _ = fp.solve(basis, comm.reshape(-1), p)
    return x


def derivation_violation(alg: WittAlgebra):
    """Compare every tabulated bracket against the operator supercommutator."""
    p, n = alg.p, alg.dim
    ops = alg.operators.astype(np.float64)
    par = alg.parity
    s = np.where(np.outer(par, par) % 2 == 1, p - 1, 1)
    prod = np.mod(np.einsum("aij,bjk->abik", ops, ops).astype(np.int64), p)
    comm = (prod - s[:, :, None, None] * np.transpose(prod, (1, 0, 2, 3))) % p
    rhs = np.mod(np.tensordot(alg.table.astype(np.float64), ops, axes=([2], [0])).astype(np.int64), p)
    w = fp.first_nonzero((comm - rhs) % p)
    return None if w is None else w[:2]


def check_algebra(alg: WittAlgebra) -> AlgebraCheck:
    p = alg.p
    rep = AlgebraCheck()
    rep.dimension_ok = alg.dim == alg.expected_dim()
    rep.anticommutative = anticommutativity_violation(alg)
    rep.jacobi = jacobi_violation(alg)
    neg = alg.table[: alg.nneg, : alg.nneg]
    w = fp.first_nonzero(neg)
    rep.abelian_neg = None if w is None else w[:2]
    deg = alg.degree
    bad = (alg.table != 0) & (deg[None, None, :] != deg[:, None, None] + deg[None, :, None])
    w = fp.first_nonzero(bad)
    rep.grading = None if w is None else w[:2]
    rep.derivation = derivation_violation(alg)
    for i in range(alg.k):
        if np.any(fp.mat_power(alg.ad(alg.D(i)), alg.z_exponents[i], p)):
            rep.nilpotent_D = i
            break
    return rep


def l0_is_gl(alg: WittAlgebra) -> bool:
    """ad: L_0 -> End(L_{-1}) is injective and its image closes under supercommutator."""
    p = alg.p
    l0 = alg.l0_indices
    if len(l0) != (alg.k + alg.l) ** 2:
        return False
    mats = [alg.rho_LK(a) for a in l0]
    stack = np.stack([m.reshape(-1) for m in mats], axis=1)
    if fp.rank(stack, p) != len(l0):
        return False
    for i, a in enumerate(l0):
        for j, b in enumerate(l0):
            s = fp.sign(int(alg.parity[a] * alg.parity[b]), p)
            c = (fp.matmul(mats[i], mats[j], p) - s * fp.matmul(mats[j], mats[i], p)) % p
            if not fp.in_span(stack, c.reshape(-1, 1), p):
                return False
    return True


def subalgebra_filter(alg: WittAlgebra, keep) -> list[int]:
    """Basis indices selected by ``keep(element)``, checked to close under the bracket.

    Hook for subspaces spanned by basis elements; raises if the span is not
    a subalgebra.
    """
    idx = [i for i, e in enumerate(alg.basis) if keep(e)]
    outside = [c for c in range(alg.dim) if c not in set(idx)]
    w = fp.first_nonzero(alg.table[np.ix_(idx, idx, outside)]) if idx and outside else None
    if w is not None:
        raise ValueError(f"span is not closed: [{alg.labels[idx[w[0]]]}, {alg.labels[idx[w[1]]]}]")
    return idx
