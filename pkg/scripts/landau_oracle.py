"""Landau-model checks: Langevin equipartition, classical and quantum finite-size exponents."""
import argparse

import numpy as np

from dickelab.landau import (
    LangevinConfig,
    boltzmann_x2,
    langevin_finite_size,
    langevin_susceptibility,
    quartic_ground_state,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--temperature", type=float, default=1.0)
    ap.add_argument("--t-total", type=float, default=2000.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cfg = LangevinConfig(temperature=args.temperature, t_total=args.t_total, seed=args.seed)
    ks = np.geomspace(0.01, 1.0, 5)
    susc = langevin_susceptibility(cfg, ks)
    for k, x2, e in zip(ks, susc.x2, susc.stderr):
        print(f"k={k:.3g}  <x^2>={x2:.4f} +- {e:.4f}  T/k={args.temperature / k:.4f}")
    print(f"susceptibility exponent {-susc.fit.exponent:.4f}")
    ns = [1, 4, 16, 64, 256]
    fss = langevin_finite_size(cfg, ns)
    for n, x2 in zip(ns, fss.x2):
        print(f"N={n:4d}  Langevin {x2:.4f}  Boltzmann {boltzmann_x2(0.0, n, args.temperature):.4f}")
    print(f"classical xi {fss.fit.exponent:.4f}")
    _, fit = quartic_ground_state([1, 10, 100, 1000])
    print(f"quantum xi {fit.exponent:.5f}")


if __name__ == "__main__":
    main()
