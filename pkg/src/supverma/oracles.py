"""Brute-force reference computations used to cross-check the fast paths.

The free-algebra normalizer rewrites words over the Witt basis one adjacent
inversion at a time (ab = s ba + [a,b], aa = [a,a]/2 for odd a) until every
word is nondecreasing, then discards words containing e_i^(p^m_i).  Because
the Witt basis lists L^- first, nondecreasing words are exactly PBW
monomials of U(L) with the L^- part on the left.
"""

from __future__ import annotations

import numpy as np

from . import fp_linalg as fp
from .cartan_witt import WittAlgebra
from .superspace import supertrace


class FreeAlgebraNormalizer:
    def __init__(self, alg: WittAlgebra):
        self.alg = alg
        self.p = alg.p
        self.half = fp.inv_mod(2, alg.p)
        self._memo: dict[tuple[int, ...], dict[tuple[int, ...], int]] = {}

    def _bracket(self, a: int, b: int) -> list[tuple[int, int]]:
        # recomputed from the defining formula, not read from the table
        return sorted(self.alg.witt_bracket(a, b).items())

    def normalize_word(self, word: tuple[int, ...]) -> dict[tuple[int, ...], int]:
        hit = self._memo.get(word)
        if hit is not None:
            return hit
        p = self.p
        par = self.alg.parity
        out: dict[tuple[int, ...], int] = {}
        for i in range(len(word) - 1):
            a, b = word[i], word[i + 1]
            if a > b or (a == b and par[a] == 1):
                break
        else:
            out = {word: 1} if not self._truncated(word) else {}
            self._memo[word] = out
            return out
        pre, post = word[:i], word[i + 2:]
        if a == b:
            for c, v in self._bracket(a, a):
                self._add_all(out, self.normalize_word(pre + (c,) + post), v * self.half)
        else:
            s = fp.sign(int(par[a] * par[b]), p)
            self._add_all(out, self.normalize_word(pre + (b, a) + post), s)
            for c, v in self._bracket(a, b):
                self._add_all(out, self.normalize_word(pre + (c,) + post), v)
        self._memo[word] = out
        return out

    def _truncated(self, word: tuple[int, ...]) -> bool:
        counts = [0] * self.alg.k
        for a in word:
            if a < self.alg.k:
                counts[a] += 1
        return any(c >= z for c, z in zip(counts, self.alg.z_exponents))

    def _add_all(self, out: dict, terms: dict, scale: int) -> None:
        p = self.p
        for w, c in terms.items():
            v = (out.get(w, 0) + scale * c) % p
            if v:
                out[w] = v
            else:
                out.pop(w, None)

    def normalize(self, element: dict[tuple[int, ...], int]) -> dict[tuple[int, ...], int]:
        out: dict[tuple[int, ...], int] = {}
        for w, c in element.items():
            self._add_all(out, self.normalize_word(tuple(w)), c)
        return out


def sigma_oracle(alg: WittAlgebra) -> dict[int, int]:
    """Supertrace of each K element on L/K, with brackets taken from the
    operator representation on O rather than the structure table."""
    from .cartan_witt import bracket_oracle

    nneg = alg.nneg
    out = {}
    for a in alg.k_indices:
        rho = np.zeros((nneg, nneg), dtype=np.int64)
        for j in range(nneg):
            col = bracket_oracle(alg, a, j)
            # reduce modulo K: keep only the L^- coordinates
            rho[:, j] = col[:nneg]
        out[a] = supertrace(rho, alg.neg_space)
    return out
