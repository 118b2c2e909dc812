"""Z x Z2-graded spaces with labeled bases, Koszul signs and supertraces."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import fp_linalg as fp

EVEN, ODD = 0, 1


@dataclass(frozen=True)
class Grading:
    parity: int
    degree: int

    def __post_init__(self):
        if self.parity not in (EVEN, ODD):
            raise ValueError(f"parity must be 0 or 1, got {self.parity}")


@dataclass(frozen=True)
class GradedSpace:
    """An ordered basis of labels, each carrying a parity and a Z-degree."""

    labels: tuple[str, ...]
    parity: tuple[int, ...]
    degree: tuple[int, ...]
    p: int

    def __post_init__(self):
        fp.check_modulus(self.p)
        if not (len(self.labels) == len(self.parity) == len(self.degree)):
            raise ValueError("labels, parity and degree lengths differ")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("basis labels must be unique")

    @classmethod
    def build(cls, labels: Sequence[str], parity: Sequence[int],
              degree: Sequence[int] | None = None, p: int = 3) -> "GradedSpace":
        degree = [0] * len(labels) if degree is None else degree
        return cls(tuple(labels), tuple(int(x) % 2 for x in parity),
                   tuple(int(x) for x in degree), p)

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def par(self) -> np.ndarray:
        return np.array(self.parity, dtype=np.int64)

    @property
    def deg(self) -> np.ndarray:
        return np.array(self.degree, dtype=np.int64)

    def grading(self, i: int) -> Grading:
        return Grading(self.parity[i], self.degree[i])

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def dual(self) -> "GradedSpace":
        # convention DUAL-DEG: dual labels sit in negated degree
        return GradedSpace(tuple(f"{lab}*" for lab in self.labels), self.parity,
                           tuple(-d for d in self.degree), self.p)

    def regraded(self, degree: Sequence[int]) -> "GradedSpace":
        return GradedSpace(self.labels, self.parity, tuple(int(d) for d in degree), self.p)

    def direct_sum(self, other: "GradedSpace", tags=("a", "b")) -> "GradedSpace":
        labels = tuple(f"{tags[0]}:{x}" for x in self.labels) + tuple(f"{tags[1]}:{x}" for x in other.labels)
        return GradedSpace(labels, self.parity + other.parity, self.degree + other.degree, self.p)


def koszul_sign(a: int, b: int, p: int) -> int:
    """(-1)^(a*b) in F_p."""
    return fp.sign(a * b, p)


def sign_vector(parities: np.ndarray, x_parity: int, p: int) -> np.ndarray:
    """Entrywise (-1)^(x_parity * parity_i) as F_p scalars."""
    return np.where((np.asarray(parities) * x_parity) % 2 == 1, p - 1, 1).astype(np.int64)


def parity_sign_matrix(space: GradedSpace) -> np.ndarray:
    """S[i, j] = (-1)^(d_i d_j)."""
    par = space.par
    return np.where(np.outer(par, par) % 2 == 1, space.p - 1, 1).astype(np.int64)


@dataclass(frozen=True)
class SuperMap:
    source: GradedSpace
    target: GradedSpace
    matrix: np.ndarray = field(repr=False)
    parity: int = 0
    degree_shift: int = 0

    def __post_init__(self):
        if self.matrix.shape != (self.target.dim, self.source.dim):
            raise ValueError(f"matrix shape {self.matrix.shape} does not match "
                             f"{self.target.dim}x{self.source.dim}")

    def homogeneity_violation(self) -> tuple[int, int] | None:
        """First (row, col) whose entry breaks parity/degree homogeneity."""
        sp, sd = self.source.par, self.source.deg
        tp, td = self.target.par, self.target.deg
        ok_par = (tp[:, None] % 2) == ((sp[None, :] + self.parity) % 2)
        ok_deg = td[:, None] == (sd[None, :] + self.degree_shift)
        bad = (self.matrix % self.source.p != 0) & ~(ok_par & ok_deg)
        return fp.first_nonzero(bad)

    def is_homogeneous(self) -> bool:
        return self.homogeneity_violation() is None

    def parity_violation(self) -> tuple[int, int] | None:
        sp, tp = self.source.par, self.target.par
        ok = (tp[:, None] % 2) == ((sp[None, :] + self.parity) % 2)
        return fp.first_nonzero((self.matrix % self.source.p != 0) & ~ok)


def supertrace(m: np.ndarray, space: GradedSpace) -> int:
    """Even diagonal minus odd diagonal, in F_p."""
    if m.shape != (space.dim, space.dim):
        raise ValueError("supertrace needs an endomorphism of the given space")
    diag = np.diag(m).astype(np.int64)
    par = space.par
    return int((diag[par == 0].sum() - diag[par == 1].sum()) % space.p)


def supertrace_map(f: SuperMap) -> int:
    if f.source != f.target:
        raise ValueError("supertrace of a map between different spaces")
    return supertrace(f.matrix, f.source)


def super_commutator(a: np.ndarray, pa: int, b: np.ndarray, pb: int, p: int) -> np.ndarray:
    return (fp.matmul(a, b, p) - koszul_sign(pa, pb, p) * fp.matmul(b, a, p)) % p


def dual_action(action: np.ndarray, gen_parity: np.ndarray, space: GradedSpace) -> np.ndarray:
    """Action tensor on V* from one on V: (x.f)(v) = -(-1)^(d(x)d(f)) f(x.v).

    With f_i the dual basis, x.f_i = sum_j -(-1)^(d(x)d(i)) M_x[i, j] f_j, so
    the dual matrix is N_x = -M_x^T with column i scaled by the Koszul sign.
    """
    p = space.p
    par = space.par
    out = np.empty_like(action)
    for a in range(action.shape[0]):
        s = sign_vector(par, int(gen_parity[a]), p)
        out[a] = (-action[a].T * s[None, :]) % p
    return out


def double_dual_identification(space: GradedSpace) -> np.ndarray:
    """Matrix of v -> (f -> (-1)^(d(f)d(v)) f(v)) from V to V** in dual-dual bases."""
    return np.diag(sign_vector(space.par, 1, space.p))
