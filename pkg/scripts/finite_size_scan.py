"""Exact steady-state photon number at the collective threshold against N.

Default parameters: omega_z = 2, omega_c = kappa = 1, no atomic decay.
"""
import argparse

from dickelab.cli import write_csv
from dickelab.exact import finite_size_scan
from dickelab.params import ModelParams


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--omega-c", type=float, default=1.0)
    ap.add_argument("--omega-z", type=float, default=2.0)
    ap.add_argument("--kappa", type=float, default=1.0)
    ap.add_argument("--gamma", type=float, default=0.0)
    ap.add_argument("--n-min", type=int, default=4)
    ap.add_argument("--n-max", type=int, default=20)
    ap.add_argument("--out", default="finite_size_scan.csv")
    args = ap.parse_args()

    p = ModelParams(omega_c=args.omega_c, omega_z=args.omega_z, kappa=args.kappa, gamma=args.gamma)
    scan = finite_size_scan(p, range(args.n_min, args.n_max + 1))
    write_csv([{"N": int(n), "n_ph": x, "photon_cutoff": int(c)}
               for n, x, c in zip(scan.n_atoms, scan.n_ph, scan.cutoffs)], args.out)
    print(f"xi = {scan.fit.exponent:.4f} +- {scan.fit.stderr:.1e}")


if __name__ == "__main__":
    main()
