"""Phase diagrams of the generalized Dicke model with incoherent pumping.

``pumped``: lambda' against gamma_up at lam = 0.9, kappa = 0.5 and a fixed
total coherence decay of 0.5 (omega_c = 0.1 unless overridden).
``experiment``: lambda against lambda' at omega_c = 100, kappa = 107,
omega_z = 77 (kHz), sz = -0.25, gamma_T = 30.
"""
import argparse

from dickelab.cli import write_csv
from dickelab.params import ModelParams
from dickelab.phase import Axis, ScanSettings, phase_diagram, phases_present

SYMBOL = {"N": ".", "SR": "S", "CL": "C", "RL": "R"}


def render(grid):
    for row in grid[::-1]:
        print("".join(SYMBOL[pt.phase.value] for pt in row), f"  y={row[0].coordinates[1]:.3g}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("which", choices=("pumped", "experiment"))
    ap.add_argument("--omega-c", type=float, default=None)
    ap.add_argument("--steps", type=int, default=41)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    if args.which == "pumped":
        p = ModelParams(omega_c=0.1 if args.omega_c is None else args.omega_c, omega_z=1.0,
                        lam=0.9, kappa=0.5)
        grid = phase_diagram(p, Axis("lambda_prime", 0.0, 4.0, args.steps),
                             Axis("gamma_up", 0.0, 0.5, (args.steps + 1) // 2),
                             ScanSettings(hold_gamma_t=0.5), workers=args.workers)
    else:
        p = ModelParams(omega_c=100.0 if args.omega_c is None else args.omega_c, omega_z=77.0,
                        kappa=107.0)
        grid = phase_diagram(p, Axis("lambda", 0.0, 200.0, args.steps),
                             Axis("lambda_prime", 0.0, 200.0, args.steps),
                             ScanSettings(sz=-0.25, gamma_t=30.0), workers=args.workers)
    render(grid)
    print("phases:", sorted(ph.value for ph in phases_present(grid)))
    if args.out:
        write_csv([{"x": pt.coordinates[0], "y": pt.coordinates[1], "phase": pt.phase.value,
                    "sz": pt.sz} for row in grid for pt in row], args.out)


if __name__ == "__main__":
    main()
