"""Scenario-driven verification runs.

A scenario names an algebra W(k,l,m) over F_p, a K-module V and a list of
checks.  ``run_scenario`` returns a deterministic report dict (no timings)
plus per-check wall-clock seconds, which only go into the text summary.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import forms as fm
from . import fp_linalg as fp
from . import isomorphisms as iso
from . import verma as vm
from .cartan_witt import AlgebraError, WittAlgebra, check_algebra, l0_is_gl
from .enveloping import PBWMonomial
from .modules import KModule, direct_sum, trivial_lmodule
from .oracles import FreeAlgebraNormalizer, sigma_oracle
from .rng import SplitMix64
from .superspace import GradedSpace

ALL_CHECKS = ("sigma", "oracle", "grading", "transitivity", "phi", "psi_dual", "thm36", "forms", "mixed")
MAX_IND_DIM = 5000
MAX_ALG_DIM = 200


class ConfigError(ValueError):
    """Invalid scenario; the CLI maps it to exit code 2."""


@dataclass
class Scenario:
    p: int = 3
    k: int = 1
    l: int = 1
    m: list[int] = field(default_factory=lambda: [1])
    module: str | dict = "trivial"
    checks: list[str] = field(default_factory=lambda: list(ALL_CHECKS))
    seed: int = 1
    output: str = "out"
    oracle_words: int = 500
    oracle_max_length: int = 4
    # test hook: [a, b, c, delta] adds delta to [e_a, e_b]_c (and the mirrored entry)
    corrupt: list[int] | None = None
    base_dir: str = field(default=".", repr=False)

    @classmethod
    def from_dict(cls, data: dict, base_dir: str = ".") -> "Scenario":
        known = {f for f in cls.__dataclass_fields__ if f != "base_dir"}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown scenario fields: {sorted(extra)}")
        sc = cls(**data, base_dir=base_dir)
        sc.validate()
        return sc

    @classmethod
    def load(cls, path: str | Path) -> "Scenario":
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read scenario {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("scenario must be a JSON object")
        return cls.from_dict(data, str(path.parent))

    def validate(self) -> None:
        for name in ("p", "k", "l", "seed", "oracle_words", "oracle_max_length"):
            if not isinstance(getattr(self, name), int) or isinstance(getattr(self, name), bool):
                raise ConfigError(f"{name} must be an integer")
        try:
            fp.check_modulus(self.p)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.k < 1 or self.l < 1:
            raise ConfigError("k and l must be at least 1")
        if not isinstance(self.m, list) or len(self.m) != self.k or \
                any(not isinstance(x, int) or x < 1 for x in self.m):
            raise ConfigError(f"m must be a list of {self.k} integers >= 1")
        bad = [c for c in self.checks if c not in ALL_CHECKS]
        if bad:
            raise ConfigError(f"unknown checks {bad}; choose from {list(ALL_CHECKS)}")
        if isinstance(self.module, str):
            if self.module not in vm.BUILTIN_MODULES:
                raise ConfigError(f"unknown module {self.module!r}")
        elif not (isinstance(self.module, dict) and set(self.module) == {"custom"}):
            raise ConfigError('module must be a builtin name or {"custom": "file.json"}')
        if self.corrupt is not None and len(self.corrupt) != 4:
            raise ConfigError("corrupt must be [a, b, c, delta]")
        n = self.p ** sum(self.m) * 2 ** self.l * (self.k + self.l)
        if n > MAX_ALG_DIM:
            raise ConfigError(f"dim W = {n} exceeds the limit {MAX_ALG_DIM}")
        est = self.estimated_ind_dim()
        if est > MAX_IND_DIM:
            raise ConfigError(f"estimated dim Ind = {est} exceeds the limit {MAX_IND_DIM}")

    def module_dim_estimate(self) -> int:
        if isinstance(self.module, dict):
            return len(self._custom_data()["basis"])
        n_neg = self.k + self.l
        gl = n_neg * n_neg
        return {"trivial": 1, "half_twist": 1, "natural": n_neg, "dual_natural": n_neg,
                "adjoint0": gl}[self.module]

    def estimated_ind_dim(self) -> int:
        return 2 ** self.l * self.p ** sum(self.m) * self.module_dim_estimate()

    def _custom_data(self) -> dict:
        path = Path(self.base_dir) / self.module["custom"]
        try:
            data = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read custom module {path}: {exc}") from exc
        if "basis" not in data:
            raise ConfigError("custom module needs a 'basis' list")
        return data

    def to_json(self) -> dict:
        d = asdict(self)
        d.pop("base_dir")
        return d


def build_algebra(sc: Scenario) -> tuple[WittAlgebra, dict]:
    alg = WittAlgebra(sc.p, sc.k, sc.l, sc.m)
    if sc.corrupt is not None:
        a, b, c, delta = sc.corrupt
        n = alg.dim
        if not all(0 <= i < n for i in (a, b, c)) or a == b:
            raise ConfigError(f"corrupt indices must be distinct basis indices below {n}")
        t = alg.table.copy()
        s = fp.sign(int(alg.parity[a] * alg.parity[b]), sc.p)
        t[a, b, c] = (t[a, b, c] + delta) % sc.p
        t[b, a, c] = (t[b, a, c] - s * delta) % sc.p
        alg = WittAlgebra(sc.p, sc.k, sc.l, sc.m, table=t)
    rep = check_algebra(alg)
    out = {"dimension": alg.dim, "expected_dimension": alg.expected_dim(), "pass": rep.ok,
           "witnesses": {k: list(v) if isinstance(v, tuple) else v for k, v in rep.witnesses().items()},
           "l0_is_gl": bool(l0_is_gl(alg)) if rep.ok else None}
    if rep.ok:
        return alg, out
    raise AlgebraError(rep)


def custom_module(alg: WittAlgebra, data: dict) -> KModule:
    basis = data["basis"]
    space = GradedSpace.build([b["label"] for b in basis], [b["parity"] for b in basis],
                              [b.get("degree", 0) for b in basis], alg.p)
    d = space.dim
    index = {lab: i for i, lab in enumerate(alg.labels)}
    if "action" in data:
        act = np.zeros((len(alg.k_indices), d, d), dtype=np.int64)
        for lab, mat in data["action"].items():
            a = index.get(lab)
            if a is None or a < alg.nneg:
                raise ConfigError(f"custom action names {lab!r}, which is not in K")
            act[a - alg.nneg] = np.array(mat, dtype=np.int64).reshape(d, d) % alg.p
        V = KModule(alg, space, act, 0, data.get("name", "custom"))
        return V.validate()
    l0 = {}
    for lab, mat in data.get("l0_action", {}).items():
        a = index.get(lab)
        if a is None or a not in alg.l0_indices:
            raise ConfigError(f"l0_action names {lab!r}, which is not in L_0")
        l0[a] = np.array(mat, dtype=np.int64).reshape(d, d)
    return vm.extend_to_K(alg, space, l0, data.get("name", "custom"))


def build_module(sc: Scenario, alg: WittAlgebra) -> KModule:
    if isinstance(sc.module, str):
        return vm.builtin_module(alg, sc.module)
    return custom_module(alg, sc._custom_data())


# ---------------------------------------------------------------------------
# individual checks


def check_sigma(alg: WittAlgebra, V: KModule, sc: Scenario) -> dict:
    sig = vm.compute_sigma(alg)
    oracle = sigma_oracle(alg)
    vanish = [alg.labels[a] for a in alg.k_indices
              if sig[a] and (alg.parity[a] == 1 or alg.degree[a] > 0)]
    return {"table": {alg.labels[a]: int(v) for a, v in sig.items() if v},
            "agrees_with_oracle": sig == oracle, "nonvanishing_odd_or_positive": vanish,
            "pass": sig == oracle and not vanish}


def random_words(alg: WittAlgebra, seed: int, count: int, max_len: int) -> list[tuple[int, ...]]:
    rng = SplitMix64(seed)
    words = []
    for _ in range(count):
        n = 1 + rng.below(max_len)
        words.append(tuple(rng.below(alg.dim) for _ in range(n)))
    return words


def check_oracle(alg: WittAlgebra, V: KModule, sc: Scenario) -> dict:
    st = vm.straightener(alg)
    naive = FreeAlgebraNormalizer(alg)
    one = PBWMonomial((0,) * alg.k)
    mismatches = []
    words = random_words(alg, sc.seed, sc.oracle_words, sc.oracle_max_length)
    for w in words:
        fast: dict = {}
        for (mono, tail), c in st.apply_word_left(w, one).items():
            fast[mono.letters(alg.k) + tail] = (fast.get(mono.letters(alg.k) + tail, 0) + c) % alg.p
        if naive.normalize(fast) != naive.normalize_word(w):
            mismatches.append([alg.labels[a] for a in w])
    return {"words": len(words), "mismatches": len(mismatches), "first_mismatch": mismatches[0] if mismatches else None,
            "pass": not mismatches}


def check_grading(alg: WittAlgebra, V: KModule, sc: Scenario, cache: dict) -> dict:
    P = cache.setdefault("coind", vm.coinduce(V))
    g = vm.grade_P(P)
    _, resid, bij = vm.mu_iso(P, V)
    dims = {"ind": cache.setdefault("ind", vm.induce(vm.twist(V, 1))).dim, "coind": P.dim,
            "formula": 2 ** alg.l * alg.p ** sum(alg.m) * V.dim}
    return {"dimensions": dims, "negative_degrees": len(g.negative),
            "degree_violation": None if g.violation is None else list(g.violation),
            "mu_residual_entries": resid, "mu_bijective": bij,
            "pass": g.ok and resid == 0 and bij and dims["ind"] == dims["coind"] == dims["formula"]}


def check_transitivity(alg: WittAlgebra, V: KModule, sc: Scenario, cache: dict) -> dict:
    P = cache.setdefault("coind", vm.coinduce(V))
    trans, wit = vm.is_transitive(P)
    emb = iso.psi_embed(P)
    planted = direct_sum(P, trivial_lmodule(alg, 1, "planted"), ("P", "t"))
    pe = iso.psi_embed(planted)
    flagged = not pe["transitive"] and not pe["injective"]
    keys = ("transitive", "equivariant", "degree_zero", "injective", "rank", "image_of_M0_is_P0",
            "residual_entries", "pass")
    return {"coind_transitive": trans,
            "psi_embedding": {k: emb[k] for k in keys},
            "planted_nontransitive_flagged": flagged,
            "pass": trans and emb["pass"] and emb["injective"] and flagged}


def check_phi(alg: WittAlgebra, V: KModule, sc: Scenario, cache: dict) -> dict:
    rep, ind, P = iso.build_phi(V, cache.get("ind"), cache.get("coind"), strict=False)
    cache.setdefault("ind", ind)
    cache.setdefault("coind", P)
    # naturality for the inclusion V -> V + V into the first summand
    W = direct_sum(V, V, ("1", "2"))
    incl = np.vstack([fp.identity(V.dim), fp.zeros(V.dim, V.dim)])
    nat = iso.naturality_square(V, W, incl)
    sigma_zero, plain = iso.identity_twist_report(V)
    untwisted_ok = plain.residual == 0
    return {"phi": rep.to_json(), "map_parity": rep.map.parity, "degree_shift": rep.map.degree_shift,
            "naturality": nat,
            "untwisted": {"sigma_zero": sigma_zero, "equivariant": untwisted_ok,
                          "residual_entries": plain.residual},
            "pass": rep.verdict and nat["pass"] and untwisted_ok == sigma_zero}


def check_psi_dual(alg: WittAlgebra, V: KModule, sc: Scenario, cache: dict) -> dict:
    rep, _, _ = iso.build_psi_dual(V, strict=False)
    return {"psi": rep.to_json(), "pass": rep.verdict}


def _thm36_summary(res: dict) -> dict:
    return {"V_side": res["V_side"], "Ind_side": res["Ind_side"], "agree": res["agree"],
            "V_to_dual_Vsigma": {str(k): v for k, v in res["V_to_dual_Vsigma"].items()},
            "Ind_to_dual_Ind": {str(k): v for k, v in res["Ind_to_dual_Ind"].items()}}


def check_thm36(alg: WittAlgebra, V: KModule, sc: Scenario, cache: dict) -> dict:
    rng = SplitMix64(sc.seed ^ 0x36)
    out = {"module": _thm36_summary(iso.check_thm_3_6(V, rng))}
    for name in ("trivial", "half_twist"):
        if name != V.name:
            out[name] = _thm36_summary(iso.check_thm_3_6(vm.builtin_module(alg, name), rng))
    answers = [v for v in out.values()]
    out["both_no_seen"] = any(not a["V_side"] and not a["Ind_side"] for a in answers)
    out["both_yes_seen"] = any(a["V_side"] and a["Ind_side"] for a in answers)
    out["pass"] = all(a["agree"] for a in answers) and out["both_no_seen"]
    cache["thm36"] = out["module"]
    return out


def form_report(V: KModule, zeta, rng) -> dict:
    ind = vm.induce(vm.twist(V, 1))
    lam = fm.form_from_zeta(zeta, V, ind)
    inv, wit = fm.is_invariant(lam, ind)
    rt = fm.zeta_from_form(lam, V, ind, check=False)
    literal = fm.form_from_zeta(zeta, V, ind, literal=True)
    lit_inv, lit_wit = fm.is_invariant(literal, ind)
    return {"zeta": zeta.matrix.astype(int).tolist(), "zeta_parity": zeta.parity,
            "zeta_symmetry": fm.zeta_symmetry(zeta, V),
            "invariant": inv, "invariance_witness": None if wit is None else list(wit),
            "radical_dim": fm.radical_dim(lam), "symmetry_type": fm.symmetry_type(lam),
            "form_parity": lam.parity(),
            "round_trip": bool(np.array_equal(rt.matrix % V.p, zeta.matrix % V.p) and rt.parity == zeta.parity),
            "radical_is_submodule": fm.radical_is_submodule(lam, ind),
            "simplified_sign_invariant": lit_inv,
            "simplified_sign_witness": None if lit_wit is None else list(lit_wit),
            "pass": inv and fm.radical_dim(lam) == 0 and fm.symmetry_type(lam) != "neither"}


def check_forms(alg: WittAlgebra, V: KModule, sc: Scenario, cache: dict) -> dict:
    rng = SplitMix64(sc.seed ^ 0x44)
    zeta = fm.find_zeta(V, rng)
    out: dict = {"zeta_found": zeta is not None}
    if zeta is not None:
        out["module"] = form_report(V, zeta, rng)
    else:
        # no zeta: the induced module must then carry no nondegenerate invariant form
        thm = cache.get("thm36") or _thm36_summary(iso.check_thm_3_6(V, rng))
        out["module"] = {"ind_has_self_duality": thm["Ind_side"], "pass": not thm["Ind_side"]}
    # identity zeta on the scenario module, recorded as is
    if V.dim == 1:
        ident = fm.zeta_map(V, [[1]], 0)
        ind = cache.setdefault("ind", vm.induce(vm.twist(V, 1)))
        lam = fm.form_from_zeta(ident, V, ind, check=False)
        inv, wit = fm.is_invariant(lam, ind)
        out["identity_zeta"] = {"is_L0_isomorphism": fm.zeta_violation(ident, V) is None,
                                "invariant": inv, "witness": None if wit is None else list(wit),
                                "radical_dim": fm.radical_dim(lam), "symmetry_type": fm.symmetry_type(lam)}
    if V.name != "half_twist":
        H = vm.builtin_module(alg, "half_twist")
        out["half_twist"] = form_report(H, fm.find_zeta(H, rng), rng)
    parts = [out["module"]] + ([out["half_twist"]] if "half_twist" in out else [])
    out["pass"] = all(x["pass"] for x in parts)
    return out


def check_mixed(alg: WittAlgebra, V: KModule, sc: Scenario, cache: dict) -> dict:
    res = iso.verify_mixed(V, cache.get("coind"))
    return {k: res[k] for k in ("pass", "sign_convention", "sign_family", "dimension", "expected_dimension",
                                "positively_graded", "transitive", "z_annihilated", "module", "tried")}


CHECKS = {
    "sigma": lambda a, V, sc, c: check_sigma(a, V, sc),
    "oracle": lambda a, V, sc, c: check_oracle(a, V, sc),
    "grading": check_grading,
    "transitivity": check_transitivity,
    "phi": check_phi,
    "psi_dual": check_psi_dual,
    "thm36": check_thm36,
    "forms": check_forms,
    "mixed": check_mixed,
}


def run_scenario(sc: Scenario) -> tuple[dict, dict[str, float]]:
    """Returns (report, timings).  Raises AlgebraError on a broken algebra."""
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    alg, alg_rep = build_algebra(sc)
    timings["algebra"] = time.perf_counter() - t0
    V = build_module(sc, alg)
    report = {"scenario": sc.to_json(), "algebra": alg_rep,
              "module": {"name": V.name, "dim": V.dim, "parities": list(V.space.parity)},
              "checks": {}}
    cache: dict = {}
    for name in ALL_CHECKS:
        if name not in sc.checks:
            continue
        t0 = time.perf_counter()
        try:
            res = CHECKS[name](alg, V, sc, cache)
        except (iso.VerificationError, fm.FormError, vm.PreconditionError) as exc:
            res = {"pass": False, "error": str(exc)}
        timings[name] = time.perf_counter() - t0
        report["checks"][name] = res
    report["pass"] = alg_rep["pass"] and all(r["pass"] for r in report["checks"].values())
    return report, timings


def summary_text(report: dict, timings: dict[str, float]) -> str:
    sc = report["scenario"]
    lines = [f"W({sc['k']},{sc['l']},{tuple(sc['m'])}) over F_{sc['p']}, dim {report['algebra']['dimension']}; "
             f"module {report['module']['name']} (dim {report['module']['dim']})",
             f"  algebra      {'PASS' if report['algebra']['pass'] else 'FAIL'}  {timings.get('algebra', 0):.2f}s"]
    for name, res in report["checks"].items():
        lines.append(f"  {name:<12} {'PASS' if res['pass'] else 'FAIL'}  {timings.get(name, 0):.2f}s")
    lines.append(f"overall: {'PASS' if report['pass'] else 'FAIL'}")
    return "\n".join(lines) + "\n"


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"
