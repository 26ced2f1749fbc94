"""Command-line interface: ``python -m dickelab <subcommand> [options]``.

Model parameters come from ``--config FILE`` (``key = value`` lines) and are
overridden by flags named after the fields (``--omega_c``, ``--lambda``,
``--lambda_prime``, ...). Every subcommand writes CSV to ``--out`` (default
stdout): comma separated, header row, LF line endings, 17 significant digits.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from pathlib import Path

import numpy as np

from . import cumulant, exact, landau, meanfield, phase, stability, thresholds
from .errors import DickeError
from .params import ModelParams, load_config, params_from_mapping, steady_sz, transverse_rate

PARAM_FLAGS = ("omega_c", "omega_z", "lambda", "lambda_prime", "kappa", "gamma", "gamma_down",
               "gamma_phi", "gamma_up", "n_atoms", "beta")


# --- CSV -----------------------------------------------------------------------


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return "" if value is None else str(value)


def write_csv(rows: list[dict], out: str | None) -> str:
    buf = io.StringIO()
    if rows:
        header = list(rows[0])
        for r in rows[1:]:
            header += [k for k in r if k not in header]
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(r.get(k)) for k in header])
    text = buf.getvalue()
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)
    return text


PLOT_TEMPLATE = '''"""Plot {csv_name} (written by the dickelab CLI)."""
import csv

import matplotlib.pyplot as plt

with open({csv_name!r}, encoding="utf-8") as fh:
    rows = list(csv.DictReader(fh))
{body}
plt.tight_layout()
plt.savefig({png_name!r}, dpi=150)
'''

LINE_BODY = '''x = [float(r[{x!r}]) for r in rows]
for col in {ys!r}:
    plt.plot(x, [float(r[col]) for r in rows], "o-", label=col)
plt.xlabel({x!r})
plt.legend()
{scale}'''

GRID_BODY = '''codes = {{"N": 0, "SR": 1, "CL": 2, "RL": 3}}
xs = sorted({{float(r["x"]) for r in rows}})
ys = sorted({{float(r["y"]) for r in rows}})
grid = [[0] * len(xs) for _ in ys]
for r in rows:
    grid[ys.index(float(r["y"]))][xs.index(float(r["x"]))] = codes[r["phase"]]
plt.imshow(grid, origin="lower", aspect="auto", extent=(xs[0], xs[-1], ys[0], ys[-1]), cmap="viridis")
plt.colorbar(ticks=range(4), label="N / SR / CL / RL")
plt.xlabel({xn!r})
plt.ylabel({yn!r})
'''


def write_plot_script(out: str | None, body: str):
    if not out:
        return
    path = Path(out)
    script = path.with_name(path.stem + "_plot.py")
    script.write_text(PLOT_TEMPLATE.format(csv_name=path.name, png_name=path.stem + ".png", body=body),
                      encoding="utf-8", newline="\n")


# --- parameters ---------------------------------------------------------------


def add_param_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("model parameters (override --config)")
    for name in PARAM_FLAGS:
        g.add_argument(f"--{name}", dest=f"param_{name}", default=None, metavar="VALUE")


def build_params(args) -> ModelParams:
    mapping: dict[str, object] = {}
    if args.config:
        mapping.update(load_config(args.config))
    for name in PARAM_FLAGS:
        v = getattr(args, f"param_{name}", None)
        if v is not None:
            mapping[name] = v
    return params_from_mapping(mapping, strict=False)


def parse_values(spec: str) -> np.ndarray:
    """``a,b,c`` or ``start:stop:steps`` (linear) or ``start:stop:steps:log``."""
    if ":" in spec:
        parts = spec.split(":")
        start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
        if len(parts) > 3 and parts[3] == "log":
            return np.geomspace(start, stop, steps)
        return np.linspace(start, stop, steps)
    return np.array([float(v) for v in spec.split(",")])


# --- subcommands ------------------------------------------------------------------


def cmd_threshold(args, params: ModelParams) -> list[dict]:
    rows = []
    wc, wz, k = params.omega_c, params.omega_z, params.kappa
    gt = transverse_rate(params)
    sz = steady_sz(params)
    cands = {
        "equilibrium": lambda: thresholds.lambda_c_equilibrium(wc, wz, params.beta),
        "collective": lambda: thresholds.lambda_c_collective(wc, wz, k, params.gamma),
        "single_atom": lambda: thresholds.lambda_c_single_atom(wc, wz, k, gt, sz),
        "generalized": lambda: thresholds.lambda_c_generalized(wc, wz, k, params.lam_p / params.lam
                                                               if params.lam else 1.0),
    }
    for name in (args.method,) if args.method != "all" else tuple(cands):
        try:
            r = cands[name]()
            rows.append({"method": name, "lambda_c": r.lambda_c, "exists": r.exists, "error": ""})
        except DickeError as exc:
            rows.append({"method": name, "lambda_c": math.nan, "exists": False,
                         "error": type(exc).__name__})
    return rows


def _drift(params: ModelParams, method: str):
    if method == "hp":
        return stability.build_drift_hp(params)
    return stability.build_drift_mb(params, steady_sz(params))


def cmd_greens(args, params: ModelParams) -> list[dict]:
    dm = stability.build_drift_hp(params)
    grid = parse_values(args.omega) if args.omega else None
    sample = stability.keldysh_green(dm, stability.keldysh_noise(params), grid)
    chi = stability.fluctuation_response_ratio(sample)
    rows = [{"omega": w, "gr11_re": sample.gr[i, 0, 0].real, "gr11_im": sample.gr[i, 0, 0].imag,
             "gk11_im": sample.gk[i, 0, 0].imag, "chi_x": chi[i]}
            for i, w in enumerate(sample.omega_grid)]
    write_plot_script(args.out, LINE_BODY.format(x="omega", ys=["gr11_im", "gk11_im"], scale=""))
    return rows


def cmd_stability(args, params: ModelParams) -> list[dict]:
    dm = _drift(params, args.model)
    eig = dm.eigenvalues
    ph, lead = phase.classify_point(params, steady_sz(params)) if args.model == "mb" else (None, None)
    rows = [{"index": i, "re": e.real, "im": e.imag} for i, e in enumerate(eig)]
    rows.append({"index": "summary", "re": float(eig.real.max()), "im": math.nan,
                 "stable": dm.is_stable(), "phase": ph.value if ph else ""})
    return rows


def cmd_dynamics(args, params: ModelParams) -> list[dict]:
    times = np.linspace(0.0, args.t_final, args.samples)
    if args.method == "mb":
        seed = meanfield.MeanFieldState(complex(args.seed_amplitude, 0), complex(args.seed_amplitude, 0),
                                        steady_sz(params))
        tr = meanfield.integrate_mb(seed, params, args.t_final, t_eval=times)
        return [{"t": t, "a_re": a.real, "a_im": a.imag, "sp_re": s.real, "sp_im": s.imag,
                 "sz": z, "n_ph": abs(a) ** 2} for t, a, s, z in zip(tr.t, tr.a, tr.sp, tr.sz)]
    if args.method == "cumulant":
        tr = cumulant.integrate_cumulant(cumulant.GROUND, params, args.t_final, t_eval=times)
        return [{"t": t, **_flatten_state(cumulant.MomentState.from_vector(y))} for t, y in zip(tr.t, tr.y)]
    liou = _exact_builder(params)(params, args.cutoff)
    obs = exact.evolve(liou, times)
    return [{"t": t, **o} for t, o in zip(times, obs)]


def _exact_builder(params: ModelParams):
    from functools import partial

    if params.has_single_atom_channels:
        return partial(exact.build_permsym_liouvillian, even_sector=True)
    return exact.build_collective_liouvillian


def _flatten_state(st) -> dict:
    row = st.as_row()
    out = {}
    for k, v in row.items():
        if isinstance(v, complex):
            out[f"{k}_re"], out[f"{k}_im"] = v.real, v.imag
        else:
            out[k] = v
    return out


def steady_row(method: str, params: ModelParams, cutoff: int) -> dict:
    if method == "exact":
        st = exact.solve_with_cutoff(_exact_builder(params), params, cutoff)
        return {**st.observables, "photon_cutoff": st.photon_cutoff, "top_fock": st.top_fock}
    if method == "cumulant":
        return _flatten_state(cumulant.cumulant_fixed_point(params))
    if method == "mb":
        st = meanfield.mb_steady_state(params)
        return {"a_re": st.a.real, "a_im": st.a.imag, "sp_re": st.sp.real, "sp_im": st.sp.imag,
                "sz": st.sz, "n_ph": abs(st.a) ** 2}
    if method == "keldysh":
        return {"n_ph": stability.photon_number(stability.build_drift_hp(params),
                                                stability.keldysh_noise(params))}
    raise ValueError(f"unknown method {method}")


def cmd_steadystate(args, params: ModelParams) -> list[dict]:
    return [steady_row(args.method, params, args.cutoff)]


def cmd_sweep(args, params: ModelParams) -> list[dict]:
    from .params import canonical_key

    field = canonical_key(args.over)
    rows = []
    if args.method == "cumulant" and field == "n_atoms":
        curve = cumulant.cumulant_steady_state(params, [int(v) for v in parse_values(args.values)])
        for n, st in zip(curve.n_atoms, curve.states):
            rows.append({"N": int(n), "n_ph": st.n_ph, "n_ph_per_N": st.n_ph / n, "xx": st.xx,
                         "yy": st.yy, "zz": st.zz, "xy": st.xy, "sz": st.sz})
    else:
        for v in parse_values(args.values):
            value = int(round(v)) if field == "n_atoms" else float(v)
            p = params.with_(**{field: value})
            try:
                rows.append({args.over: value, **steady_row(args.method, p, args.cutoff), "error": ""})
            except DickeError as exc:
                rows.append({args.over: value, "error": f"{type(exc).__name__}: {exc}"})
    ycols = [k for k in rows[0] if k in ("n_ph", "n_ph_per_N")] if rows else []
    write_plot_script(args.out, LINE_BODY.format(x=list(rows[0])[0] if rows else "x", ys=ycols,
                                                 scale='plt.xscale("log")\nplt.yscale("log")\n'
                                                 if args.log else ""))
    return rows


def _axis(spec: list[str]) -> phase.Axis:
    name, start, stop, steps = spec
    return phase.Axis(name, float(start), float(stop), int(steps))


def cmd_phasediagram(args, params: ModelParams) -> list[dict]:
    ax, ay = _axis(args.x), _axis(args.y)
    settings = phase.ScanSettings(args.sz, args.gamma_t, args.hold_gamma_t)
    grid = phase.phase_diagram(params, ax, ay, settings, workers=args.workers)
    rows = [{"x": pt.coordinates[0], "y": pt.coordinates[1], "phase": pt.phase.value,
             "lead_re": pt.lead_eigenvalue.real, "lead_im": pt.lead_eigenvalue.imag, "sz": pt.sz,
             "error": pt.error} for row in grid for pt in row]
    write_plot_script(args.out, GRID_BODY.format(xn=ax.name, yn=ay.name))
    return rows


def cmd_exponents(args, params: ModelParams) -> list[dict]:
    opts = {"seed": args.seed} if args.method == "landau" and not math.isinf(params.beta) else {}
    r = phase.exponent_report(args.method, params, args.which, **opts)
    return [{"method": r.method, "which": r.which, "exponent": r.exponent, "stderr": r.stderr,
             "window_lo": r.window[0], "window_hi": r.window[1], "n_points": r.n_points}]


def cmd_landau(args, params: ModelParams) -> list[dict]:
    rows = []
    cfg = landau.LangevinConfig(eta=args.eta, temperature=args.temperature, dt=args.dt,
                                t_total=args.t_total, seed=args.seed)
    if args.mode in ("cpt", "ness"):
        ks = parse_values(args.values or "0.01:1:5:log")
        if args.mode == "ness":
            cfg = landau.LangevinConfig(eta=args.eta, temperature=0.0, dt=args.dt, t_total=args.t_total,
                                        seed=args.seed, noise_f0=args.f0)
        scan = landau.langevin_susceptibility(cfg, ks)
        label, sign = "stiffness", -1.0
    elif args.mode == "qpt":
        scan = landau.qpt_susceptibility(parse_values(args.values or "0.001:1:7:log"))
        label, sign = "stiffness", -1.0
    else:
        ns = parse_values(args.values or ("1,10,100,1000" if args.temperature == 0 else "1,4,16,64,256"))
        if args.temperature == 0:
            x2, fit = landau.quartic_ground_state(ns)
            scan = landau.SusceptibilityScan(ns, x2, np.zeros_like(x2), fit)
        else:
            scan = landau.langevin_finite_size(cfg, ns)
        label, sign = "quartic_n", 1.0
    for c, x2, e in zip(scan.control, scan.x2, scan.stderr):
        rows.append({label: c, "x2": x2, "stderr": e})
    rows.append({label: "fit", "x2": math.nan, "stderr": scan.fit.stderr,
                 "exponent": sign * scan.fit.exponent})
    return rows


# --- parser -----------------------------------------------------------------------


def _global_flags(p: argparse.ArgumentParser, default):
    p.add_argument("--config", default=default, help="key = value parameter file")
    p.add_argument("--out", default=default, help="CSV output path (default stdout)")
    p.add_argument("--seed", type=int, default=default, help="PRNG seed for stochastic methods")
    p.add_argument("--workers", type=int, default=default, help="parallel workers for grid scans")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dickelab", description="Driven-dissipative Dicke model laboratory",
                                     formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    _global_flags(parser, argparse.SUPPRESS)
    parser.set_defaults(config=None, out=None, seed=0, workers=1)
    # the same flags are accepted after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_, parents=[common],
                           formatter_class=argparse.ArgumentDefaultsHelpFormatter)
        add_param_flags(p)
        p.set_defaults(func=func)
        return p

    p = add("threshold", cmd_threshold, "closed-form critical couplings")
    p.add_argument("--method", choices=("all", "equilibrium", "collective", "single_atom", "generalized"),
                   default="all")

    p = add("greens", cmd_greens, "retarded and Keldysh Green's functions of the HP model")
    p.add_argument("--omega", default=None, help="frequency grid a,b,c or start:stop:steps[:log]")

    p = add("stability", cmd_stability, "drift-matrix spectrum and phase at one point")
    p.add_argument("--model", choices=("mb", "hp"), default="mb")

    p = add("dynamics", cmd_dynamics, "time evolution")
    p.add_argument("--method", choices=("mb", "cumulant", "exact"), default="mb")
    p.add_argument("--t-final", type=float, default=50.0)
    p.add_argument("--samples", type=int, default=201)
    p.add_argument("--seed-amplitude", type=float, default=meanfield.DEFAULT_SEED)
    p.add_argument("--cutoff", type=int, default=10)

    p = add("steadystate", cmd_steadystate, "steady state at one point")
    p.add_argument("--method", choices=("exact", "cumulant", "mb", "keldysh"), default="exact")
    p.add_argument("--cutoff", type=int, default=10)

    p = add("sweep", cmd_sweep, "steady states along one parameter")
    p.add_argument("--method", choices=("exact", "cumulant", "mb", "keldysh"), default="cumulant")
    p.add_argument("--over", default="n_atoms")
    p.add_argument("--values", required=True, help="a,b,c or start:stop:steps[:log]")
    p.add_argument("--cutoff", type=int, default=10)
    p.add_argument("--log", action="store_true", help="log-log axes in the plot script")

    p = add("phasediagram", cmd_phasediagram, "phase classification on a 2-D grid")
    p.add_argument("--x", nargs=4, required=True, metavar=("NAME", "START", "STOP", "STEPS"))
    p.add_argument("--y", nargs=4, required=True, metavar=("NAME", "START", "STOP", "STEPS"))
    p.add_argument("--sz", type=float, default=None, help="fixed inversion")
    p.add_argument("--gamma-t", type=float, default=None, help="fixed coherence decay rate")
    p.add_argument("--hold-gamma-t", type=float, default=None,
                   help="keep gamma_down + gamma_up + gamma_phi at this total")

    p = add("exponents", cmd_exponents, "critical exponent from one method")
    p.add_argument("--method", choices=("keldysh", "meanfield", "exact", "cumulant", "landau"), required=True)
    p.add_argument("--which", choices=("beta", "susc", "xi"), required=True)

    p = add("landau", cmd_landau, "Landau-model oracle")
    p.add_argument("mode", choices=("cpt", "ness", "qpt", "fss"))
    p.add_argument("--values", default=None, help="stiffnesses or quartic N values")
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("--f0", type=float, default=2.0, help="flat noise spectrum for ness")
    p.add_argument("--dt", type=float, default=0.02)
    p.add_argument("--t-total", type=float, default=2000.0)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        params = build_params(args)
        rows = args.func(args, params)
    except (DickeError, ValueError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    write_csv(rows, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
