"""Finite-dimensional K- and L-modules given by action matrices.

An action is an int64 tensor ``A`` of shape (generators, dim, dim) with
``A[x][:, j]`` the image of basis vector j under generator x.  For an
L-module the generators are all basis elements of the Witt algebra; for a
K-module they are the K basis elements ``alg.k_indices`` in order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from . import fp_linalg as fp
from .cartan_witt import WittAlgebra
from .superspace import GradedSpace, SuperMap, dual_action


class ModuleError(Exception):
    """A constructed action fails bracket compatibility or homogeneity."""

    def __init__(self, msg: str, witness=None):
        super().__init__(msg if witness is None else f"{msg}: witness {witness}")
        self.witness = witness


def compatibility_violation(alg: WittAlgebra, gens: list[int], action: np.ndarray,
                            p: int) -> tuple[int, int] | None:
    """First generator pair (x, y) with M_x M_y - s M_y M_x != M_[x,y].

    ``gens`` must span a subalgebra; brackets falling outside it count as
    violations only if their coefficients are nonzero outside ``gens``.
    """
    g = len(gens)
    if g == 0:
        return None
    pos = {a: i for i, a in enumerate(gens)}
    sub = alg.table[np.ix_(gens, gens)]  # (g, g, n)
    outside = [c for c in range(alg.dim) if c not in pos]
    if outside:
        w = fp.first_nonzero(sub[:, :, outside])
        if w is not None:
            raise ValueError(f"generators do not close under bracket at {gens[w[0]]},{gens[w[1]]}")
    sub = sub[:, :, gens].astype(np.float64)
    par = alg.parity[gens]
    s = np.where(np.outer(par, par) % 2 == 1, p - 1, 1)
    d = action.shape[1]
    af = action.astype(np.float64)
    # chunk over the first generator to bound memory
    step = max(1, int(4e6 // max(1, g * d * d)))
    for lo in range(0, g, step):
        hi = min(g, lo + step)
        prod_xy = np.mod(np.matmul(af[lo:hi, None], af[None, :]).astype(np.int64), p)
        prod_yx = np.mod(np.matmul(af[None, :], af[lo:hi, None]).astype(np.int64), p)
        rhs = np.mod(np.tensordot(sub[lo:hi], af, axes=([2], [0])).astype(np.int64), p)
        resid = (prod_xy - s[lo:hi, :, None, None] * prod_yx - rhs) % p
        w = fp.first_nonzero(resid)
        if w is not None:
            return gens[lo + w[0]], gens[w[1]]
    return None


def homogeneity_violation(space: GradedSpace, action: np.ndarray, gen_parity, gen_degree,
                          check_degree: bool = True):
    for x in range(action.shape[0]):
        f = SuperMap(space, space, action[x], int(gen_parity[x]),
                     int(gen_degree[x]))
        w = f.homogeneity_violation() if check_degree else f.parity_violation()
        if w is not None:
            return x, w
    return None


@dataclass(frozen=True)
class KModule:
    """A representation of K = L_0 + L^+ on a graded space."""

    alg: WittAlgebra = field(repr=False)
    space: GradedSpace
    action: np.ndarray = field(repr=False)
    twist_coeff: int = 0
    name: str = "V"

    def __post_init__(self):
        n_k = len(self.alg.k_indices)
        if self.action.shape != (n_k, self.space.dim, self.space.dim):
            raise ValueError(f"K-action has shape {self.action.shape}, expected "
                             f"({n_k}, {self.space.dim}, {self.space.dim})")

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def p(self) -> int:
        return self.alg.p

    def matrix(self, a: int) -> np.ndarray:
        """Action of the Witt basis element a (which must lie in K)."""
        return self.action[a - self.alg.nneg]

    @property
    def sigma(self) -> dict[int, int]:
        return self.alg.sigma()

    def word_matrix(self, word) -> np.ndarray:
        """Matrix of k_1 k_2 ... k_r acting on V (k_r acts first)."""
        m = fp.identity(self.dim)
        for a in word:
            m = fp.matmul(m, self.matrix(a), self.p)
        return m

    def compatibility_violation(self):
        return compatibility_violation(self.alg, self.alg.k_indices, self.action, self.p)

    def l0_compatibility_violation(self):
        l0 = self.alg.l0_indices
        return compatibility_violation(self.alg, l0, self.action[[a - self.alg.nneg for a in l0]], self.p)

    def homogeneity_violation(self, check_degree: bool = False):
        ks = self.alg.k_indices
        return homogeneity_violation(self.space, self.action, self.alg.parity[ks],
                                     self.alg.degree[ks], check_degree)

    def validate(self) -> "KModule":
        w = self.homogeneity_violation()
        if w is not None:
            raise ModuleError(f"{self.name}: action not parity-homogeneous", w)
        w = self.compatibility_violation()
        if w is not None:
            raise ModuleError(f"{self.name}: K bracket compatibility fails", w)
        return self


@dataclass(frozen=True)
class LModule:
    """A representation of the whole Witt algebra on a graded space."""

    alg: WittAlgebra = field(repr=False)
    space: GradedSpace
    action: np.ndarray = field(repr=False)
    kind: str = "custom"
    meta: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.action.shape != (self.alg.dim, self.space.dim, self.space.dim):
            raise ValueError(f"L-action has shape {self.action.shape}")

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def p(self) -> int:
        return self.alg.p

    def matrix(self, a: int) -> np.ndarray:
        return self.action[a]

    def word_matrix(self, word) -> np.ndarray:
        m = fp.identity(self.dim)
        for a in word:
            m = fp.matmul(m, self.action[a], self.p)
        return m

    def compatibility_violation(self):
        return compatibility_violation(self.alg, list(range(self.alg.dim)), self.action, self.p)

    def homogeneity_violation(self, check_degree: bool = True):
        return homogeneity_violation(self.space, self.action, self.alg.parity, self.alg.degree,
                                     check_degree)

    def is_module(self) -> bool:
        return self.compatibility_violation() is None

    def validate(self) -> "LModule":
        w = self.homogeneity_violation()
        if w is not None:
            raise ModuleError(f"{self.kind}: action not homogeneous", w)
        w = self.compatibility_violation()
        if w is not None:
            raise ModuleError(f"{self.kind}: L bracket compatibility fails", w)
        return self

    def restrict_to_K(self, name: str = "res") -> KModule:
        return KModule(self.alg, self.space, self.action[self.alg.k_indices].copy(), 0, name)

    def z_annihilated(self) -> bool:
        return all(not np.any(fp.mat_power(self.action[self.alg.D(i)], z, self.p))
                   for i, z in enumerate(self.alg.z_exponents))

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "algebra": {"type": "W", "p": self.alg.p, "k": self.alg.k, "l": self.alg.l,
                        "m": list(self.alg.m)},
            "basis": [{"label": lab, "parity": int(par), "degree": int(deg)}
                      for lab, par, deg in zip(self.space.labels, self.space.parity, self.space.degree)],
            "action": {self.alg.labels[a]: self.action[a].astype(int).tolist()
                       for a in range(self.alg.dim)},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, data: dict, alg: WittAlgebra) -> "LModule":
        space = GradedSpace.build([b["label"] for b in data["basis"]],
                                  [b["parity"] for b in data["basis"]],
                                  [b["degree"] for b in data["basis"]], alg.p)
        act = np.stack([np.array(data["action"][lab], dtype=np.int64).reshape(space.dim, space.dim)
                        for lab in alg.labels]) % alg.p
        return cls(alg, space, act, data.get("kind", "custom"))


# ---------------------------------------------------------------------------
# constructions on modules


def dual_module(mod):
    """V* with (x.f)(v) = -(-1)^(d(x)d(f)) f(x.v); degrees are negated."""
    space = mod.space.dual()
    if isinstance(mod, LModule):
        act = dual_action(mod.action, mod.alg.parity, mod.space)
        return LModule(mod.alg, space, act, "dual", {"of": mod.kind})
    act = dual_action(mod.action, mod.alg.parity[mod.alg.k_indices], mod.space)
    return KModule(mod.alg, space, act, mod.twist_coeff, f"({mod.name})*")


def direct_sum(a, b, tags=("a", "b")):
    space = a.space.direct_sum(b.space, tags)
    n, da, db = a.action.shape[0], a.dim, b.dim
    act = np.zeros((n, da + db, da + db), dtype=np.int64)
    act[:, :da, :da] = a.action
    act[:, da:, da:] = b.action
    if isinstance(a, LModule):
        return LModule(a.alg, space, act, "direct_sum")
    return KModule(a.alg, space, act, a.twist_coeff, f"{a.name}+{b.name}")


def trivial_lmodule(alg: WittAlgebra, degree: int = 0, label: str = "1") -> LModule:
    space = GradedSpace.build([label], [0], [degree], alg.p)
    return LModule(alg, space, np.zeros((alg.dim, 1, 1), dtype=np.int64), "trivial")


def with_kind(mod: LModule, kind: str, **meta) -> LModule:
    return replace(mod, kind=kind, meta={**mod.meta, **meta})
