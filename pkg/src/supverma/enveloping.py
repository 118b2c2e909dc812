"""PBW normal forms in U(L) modulo the central elements z_i = e_i^(p^m_i).

U(L)/(z) is free over U(K) on the monomials e^alpha xi^u (0 <= alpha <= pi).
Two normal forms are needed:

* ``left_mult`` rewrites x * e^alpha xi^u as sum c * e^beta xi^t * k with the
  K-letter k on the right.  This is the form used to act on
  U(L) (x)_theta V, where k then acts on V.
* ``right_mult`` rewrites e^alpha xi^u * y as sum c * k * e^beta xi^t with the
  K-letter on the left.  Coinduced modules are left theta-linear functions,
  so f(k * e^beta xi^t) = +-k . f(e^beta xi^t) is computable.

Both rely on L^- being abelian; the one moving letter is commuted through
the monomial one position at a time, so each result carries at most one
K-letter.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

from . import fp_linalg as fp
from .cartan_witt import WittAlgebra


@dataclass(frozen=True, order=True)
class PBWMonomial:
    """e^alpha xi^u; ``u`` holds 0-based odd indices in increasing order."""

    alpha: tuple[int, ...]
    u: tuple[int, ...] = ()

    @property
    def parity(self) -> int:
        return len(self.u) % 2

    @property
    def zdegree(self) -> int:
        return -(sum(self.alpha) + len(self.u))

    @property
    def length(self) -> int:
        return sum(self.alpha) + len(self.u)

    def letters(self, k: int) -> tuple[int, ...]:
        """The monomial as a word of Witt basis indices (D_i = i, d_j = k + j)."""
        word = []
        for i, a in enumerate(self.alpha):
            word.extend([i] * a)
        word.extend(k + j for j in self.u)
        return tuple(word)

    def label(self) -> str:
        parts = []
        if any(self.alpha):
            parts.append("e^(" + ",".join(map(str, self.alpha)) + ")")
        if self.u:
            parts.append("xi<" + ",".join(str(j + 1) for j in self.u) + ">")
        return "".join(parts) or "1"


def pbw_basis(alg: WittAlgebra) -> list[PBWMonomial]:
    alphas = itertools.product(*[range(z) for z in alg.z_exponents])
    subsets = [u for s in range(alg.l + 1) for u in itertools.combinations(range(alg.l), s)]
    monos = [PBWMonomial(tuple(a), u) for a in alphas for u in subsets]
    return sorted(monos, key=lambda mo: (mo.length, mo.alpha, mo.u))


def top_monomial(alg: WittAlgebra) -> PBWMonomial:
    return PBWMonomial(alg.pi, tuple(range(alg.l)))


@dataclass(frozen=True)
class StraightenedTerm:
    """coeff * mono * tail (``left_mult``) or coeff * tail * mono (``right_mult``)."""

    coeff: int
    mono: PBWMonomial
    tail: tuple[int, ...] = ()


def _acc(out: dict, key, c: int, p: int) -> None:
    v = (out.get(key, 0) + c) % p
    if v:
        out[key] = v
    else:
        out.pop(key, None)


class Straightener:
    """Memoized PBW rewriting for one Witt algebra."""

    def __init__(self, alg: WittAlgebra):
        if fp.first_nonzero(alg.table[: alg.nneg, : alg.nneg]) is not None:
            raise ValueError("straightening requires an abelian L^-")
        self.alg = alg
        self.p = alg.p
        self.k = alg.k
        self._left: dict = {}
        self._right: dict = {}

    # -- merging an L^- letter into a monomial --------------------------------

    def merge_left(self, a: int, mono: PBWMonomial) -> tuple[int, PBWMonomial] | None:
        """a * e^alpha xi^u for a in L^-; None when the product vanishes in U/(z)."""
        k = self.k
        if a < k:
            alpha = list(mono.alpha)
            alpha[a] += 1
            if alpha[a] >= self.alg.z_exponents[a]:
                return None
            return 1, PBWMonomial(tuple(alpha), mono.u)
        j = a - k
        if j in mono.u:
            return None
        passed = sum(1 for i in mono.u if i < j)
        return fp.sign(passed, self.p), PBWMonomial(mono.alpha, tuple(sorted(mono.u + (j,))))

    def merge_right(self, mono: PBWMonomial, a: int) -> tuple[int, PBWMonomial] | None:
        k = self.k
        if a < k:
            return self.merge_left(a, mono)
        j = a - k
        if j in mono.u:
            return None
        passed = sum(1 for i in mono.u if i > j)
        return fp.sign(passed, self.p), PBWMonomial(mono.alpha, tuple(sorted(mono.u + (j,))))

    def monomial_of(self, letters: tuple[int, ...]) -> PBWMonomial:
        """Normal monomial of an already sorted L^- word."""
        alpha = [0] * self.k
        u = []
        for a in letters:
            if a < self.k:
                alpha[a] += 1
            else:
                u.append(a - self.k)
        return PBWMonomial(tuple(alpha), tuple(u))

    # -- left multiplication ---------------------------------------------------

    def left_mult(self, x: int, mono: PBWMonomial) -> list[StraightenedTerm]:
        key = (x, mono)
        hit = self._left.get(key)
        if hit is None:
            if x < self.alg.nneg:
                r = self.merge_left(x, mono)
                hit = {} if r is None else {(r[1], ()): r[0]}
            else:
                hit = self._left_K(x, mono.letters(self.k))
            self._left[key] = hit
        return [StraightenedTerm(c, m, t) for (m, t), c in sorted(hit.items())]

    def _left_K(self, x: int, letters: tuple[int, ...]) -> dict:
        """x * n_1 ... n_r for x in K:  x n_1 = s n_1 x + [x, n_1]."""
        p = self.p
        if not letters:
            return {(PBWMonomial((0,) * self.k), (x,)): 1}
        n1, rest = letters[0], letters[1:]
        out: dict = {}
        s = fp.sign(int(self.alg.parity[x] * self.alg.parity[n1]), p)
        for (m, tail), c in self._left_K(x, rest).items():
            r = self.merge_left(n1, m)
            if r is not None:
                _acc(out, (r[1], tail), s * c * r[0], p)
        rest_mono = self.monomial_of(rest)
        for y, cy in self.alg.bracket(x, n1).items():
            if y < self.alg.nneg:
                r = self.merge_left(y, rest_mono)
                if r is not None:
                    _acc(out, (r[1], ()), cy * r[0], p)
            else:
                for (m, tail), c in self._left_K(y, rest).items():
                    _acc(out, (m, tail), cy * c, p)
        return out

    # -- right multiplication --------------------------------------------------

    def right_mult(self, mono: PBWMonomial, y: int) -> list[StraightenedTerm]:
        """mono * y as terms coeff * tail * mono' (K-letters on the left)."""
        key = (mono, y)
        hit = self._right.get(key)
        if hit is None:
            if y < self.alg.nneg:
                r = self.merge_right(mono, y)
                hit = {} if r is None else {(r[1], ()): r[0]}
            else:
                hit = self._right_K(mono.letters(self.k), y)
            self._right[key] = hit
        return [StraightenedTerm(c, m, t) for (m, t), c in sorted(hit.items())]

    def _right_K(self, letters: tuple[int, ...], y: int) -> dict:
        """n_1 ... n_r y for y in K:  n_r y = s y n_r + [n_r, y]."""
        p = self.p
        if not letters:
            return {(PBWMonomial((0,) * self.k), (y,)): 1}
        prefix, nr = letters[:-1], letters[-1]
        out: dict = {}
        s = fp.sign(int(self.alg.parity[y] * self.alg.parity[nr]), p)
        for (m, tail), c in self._right_K(prefix, y).items():
            r = self.merge_right(m, nr)
            if r is not None:
                _acc(out, (r[1], tail), s * c * r[0], p)
        prefix_mono = self.monomial_of(prefix)
        for z, cz in self.alg.bracket(nr, y).items():
            if z < self.alg.nneg:
                r = self.merge_right(prefix_mono, z)
                if r is not None:
                    _acc(out, (r[1], ()), cz * r[0], p)
            else:
                for (m, tail), c in self._right_K(prefix, z).items():
                    _acc(out, (m, tail), cz * c, p)
        return out

    # -- words -----------------------------------------------------------------

    def apply_word_left(self, word: Iterable[int], mono: PBWMonomial) -> dict:
        """w * mono as {(mono', K-word): coeff}, letters of w applied right to left."""
        p = self.p
        state = {(mono, ()): 1}
        for x in reversed(tuple(word)):
            new: dict = {}
            for (m, tail), c in state.items():
                for t in self.left_mult(x, m):
                    _acc(new, (t.mono, t.tail + tail), c * t.coeff, p)
            state = new
        return state


def anti_T(word: Iterable[int], parity, p: int) -> tuple[int, tuple[int, ...]]:
    """(x_1...x_n)^T = (-1)^(n + sum_{i<j} d_i d_j) x_n ... x_1."""
    word = tuple(word)
    d = [int(parity[a]) for a in word]
    odd = sum(d)
    pairs = odd * (odd - 1) // 2
    return fp.sign(len(word) + pairs, p), tuple(reversed(word))


def transpose_monomial(st: Straightener, mono: PBWMonomial) -> tuple[int, PBWMonomial]:
    """T(e^alpha xi^u) rewritten back into normal order: c * e^alpha xi^u."""
    c, rev = anti_T(mono.letters(st.k), st.alg.parity, st.p)
    m = PBWMonomial((0,) * st.k)
    # rebuild the reversed word from the right; L^- is supercommutative
    for a in reversed(rev):
        r = st.merge_left(a, m)
        if r is None:
            return 0, mono
        c = c * r[0] % st.p
        m = r[1]
    return c, m
