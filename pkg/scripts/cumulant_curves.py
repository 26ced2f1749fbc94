"""Cumulant photon numbers against N for four loss configurations, plus exact checks.

Couplings are fixed at lam = 0.9 (collective normalisation), omega_c = omega_z = 1,
kappa = 1/2. Exact values use the permutation-symmetric solver (collective
solver when there are no single-atom channels).
"""
import argparse

from dickelab.cli import write_csv
from dickelab.cumulant import compare_with_exact, cumulant_steady_state
from dickelab.params import ModelParams

CURVES = {"black": (0.0, 0.0), "blue": (0.1, 0.0), "green": (0.1, 0.2), "red": (0.0, 0.02)}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", default="10,30,100,300,1000,3000,10000")
    ap.add_argument("--exact-n-max", type=int, default=6, help="largest N for permutation-symmetric solves")
    ap.add_argument("--out", default="cumulant_curves.csv")
    args = ap.parse_args()

    base = ModelParams(omega_c=1.0, omega_z=1.0, kappa=0.5, lam=0.9)
    ns = [int(v) for v in args.n.split(",")]
    rows = []
    for name, (gdn, gphi) in CURVES.items():
        p = base.with_(gamma_down=gdn, gamma_phi=gphi)
        curve = cumulant_steady_state(p, ns)
        rows += [{"curve": name, "N": int(n), "n_ph": x, "n_ph_per_N": x / n, "source": "cumulant"}
                 for n, x in zip(curve.n_atoms, curve.n_ph)]
        top = 10 if (gdn, gphi) == (0.0, 0.0) else args.exact_n_max
        cmp_ = compare_with_exact(p, range(2, top + 1))
        for n, c, e, d in zip(cmp_.n_atoms, cmp_.cumulant, cmp_.exact, cmp_.rel_diff):
            rows.append({"curve": name, "N": int(n), "n_ph": e, "n_ph_per_N": e / n, "source": "exact",
                         "cumulant": c, "rel_diff": d})
            print(f"{name:5s} N={int(n):2d} cumulant {c:.5f} exact {e:.5f} rel diff {d:.2%}")
    write_csv(rows, args.out)


if __name__ == "__main__":
    main()
