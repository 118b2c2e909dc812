"""Run the core checks over a grid of (p,k,l,m) and builtin modules; print a table."""

import argparse
import time

from supverma import isomorphisms as iso
from supverma import verma as vm
from supverma.cartan_witt import build_W

GRID = [(3, 1, 1, (1,)), (5, 1, 1, (1,)), (3, 2, 1, (1, 1)), (3, 1, 2, (1,)), (3, 1, 1, (2,))]
MODULES = ("trivial", "natural", "dual_natural", "half_twist")


def row(alg, name):
    V = vm.builtin_module(alg, name)
    phi, ind, P = iso.build_phi(V, strict=False)
    psi, _, _ = iso.build_psi_dual(V, strict=False)
    thm = iso.check_thm_3_6(V)
    mixed = iso.verify_mixed(V, P)
    return {"dim_ind": ind.dim, "phi": phi.verdict, "psi": psi.verdict,
            "self_dual": f"{'yes' if thm['V_side'] else 'no'}/{'yes' if thm['Ind_side'] else 'no'}",
            "mixed": mixed["sign_family"] if mixed["pass"] else "fail"}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--modules", nargs="*", default=list(MODULES))
    args = ap.parse_args()
    print(f"{'config':18} {'module':13} {'dim':>5} {'phi':>5} {'psi':>5} {'V/Ind':>7} {'mixed':>7} {'s':>6}")
    for cfg in GRID:
        alg = build_W(*cfg)
        for name in args.modules:
            t0 = time.perf_counter()
            r = row(alg, name)
            print(f"{str(cfg):18} {name:13} {r['dim_ind']:5d} {str(r['phi']):>5} {str(r['psi']):>5} "
                  f"{r['self_dual']:>7} {r['mixed']:>7} {time.perf_counter() - t0:6.2f}")


if __name__ == "__main__":
    main()
