"""Compare the simplified pairing sign with the full evaluation sign.

For each config the half-twisted character admits zeta = id; the script
reports invariance of both variants and the measured symmetry type.
"""

from supverma import forms as fm
from supverma import verma as vm
from supverma.cartan_witt import build_W

GRID = [(3, 1, 1, (1,)), (5, 1, 1, (1,)), (3, 2, 1, (1, 1)), (3, 1, 2, (1,)), (3, 1, 3, (1,))]


def main():
    print(f"{'config':18} {'zeta':>8} {'simplified':>11} {'full':>6} {'radical':>8} {'type':>15}")
    for cfg in GRID:
        alg = build_W(*cfg)
        V = vm.builtin_module(alg, "half_twist")
        ind = vm.induce(vm.twist(V, 1))
        z = fm.zeta_map(V, [[1]])
        lit = fm.form_from_zeta(z, V, ind, literal=True)
        full = fm.form_from_zeta(z, V, ind)
        print(f"{str(cfg):18} {fm.zeta_symmetry(z, V):>8.8} {str(fm.is_invariant(lit, ind)[0]):>11} "
              f"{str(fm.is_invariant(full, ind)[0]):>6} {fm.radical_dim(full):8d} {fm.symmetry_type(full):>15}")
    alg = build_W(3, 1, 1, (1,))
    V = vm.builtin_module(alg, "trivial")
    ind = vm.induce(vm.twist(V, 1))
    lam = fm.form_from_zeta(fm.zeta_map(V, [[1]]), V, ind, check=False)
    print("trivial V, zeta = id:", "zeta violation", fm.zeta_violation(fm.zeta_map(V, [[1]]), V),
          "invariant", fm.is_invariant(lam, ind))


if __name__ == "__main__":
    main()
