"""Phase-diagram classification and exponent reports.

Each grid point is classified from the linearised Maxwell-Bloch drift about
the normal state: a stable spectrum is Normal; otherwise the couplings are
scaled down to zero and the first eigenvalue crossing along that ray decides
between a pitchfork (Superradiant) and a Hopf bifurcation, which is
CounterLasing without inversion (``sz <= 0``) and RegularLasing with it.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import BothStable, DickeError, InvalidAxisName
from .params import ModelParams, canonical_key, steady_sz, validate
from .stability import (
    Instability,
    build_drift_mb,
    classify_eigenvalues,
    classify_instability,
)


class Phase(enum.Enum):
    Normal = "N"
    Superradiant = "SR"
    CounterLasing = "CL"
    RegularLasing = "RL"


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    steps: int

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)


@dataclass(frozen=True)
class PhasePoint:
    coordinates: tuple[float, float]
    phase: Phase
    lead_eigenvalue: complex
    sz: float
    error: str = ""


@dataclass(frozen=True)
class ScanSettings:
    """Per-scan overrides of the atomic inversion and coherence decay.

    ``sz`` fixes the inversion (otherwise the pump/decay balance is used);
    ``gamma_t`` fixes the coherence decay rate of ``<sigma_->``;
    ``hold_gamma_t`` keeps ``gamma_down + gamma_up + gamma_phi`` at the given
    total by adjusting ``gamma_down``, so a pump axis trades decay for pump.
    """

    sz: float | None = None
    gamma_t: float | None = None
    hold_gamma_t: float | None = None


def resolve_axis(name: str) -> str:
    try:
        return canonical_key(name)
    except KeyError:
        raise InvalidAxisName(f"{name!r} is not a ModelParams field") from None


def _apply(params: ModelParams, settings: ScanSettings, **coords) -> tuple[ModelParams, float, float | None]:
    if "lam" in coords and "lam_prime" not in coords and params.lam_prime is None:
        coords["lam_prime"] = None
    if "n_atoms" in coords:
        coords["n_atoms"] = int(round(coords["n_atoms"]))
    p = params.with_(**coords)
    gamma_t = settings.gamma_t
    if settings.hold_gamma_t is not None:
        gdn = settings.hold_gamma_t - p.gamma_up - p.gamma_phi
        p = p.with_(gamma_down=max(gdn, 0.0))
        gamma_t = settings.hold_gamma_t if gamma_t is None else gamma_t
    validate(p)
    sz = steady_sz(p) if settings.sz is None else settings.sz
    return p, sz, gamma_t


def classify_point(params: ModelParams, sz: float, gamma_t: float | None = None) -> tuple[Phase, complex]:
    dm = build_drift_mb(params, sz, gamma_t)
    eig = dm.eigenvalues
    lead = complex(eig[np.argmax(eig.real)])
    # marginal modes (lossless atoms) count as stable
    if lead.real <= 1e-12 * max(1.0, float(np.abs(eig).max())):
        return Phase.Normal, lead
    origin = build_drift_mb(params.with_(lam=0.0, lam_prime=0.0), sz, gamma_t)
    try:
        kind = classify_instability(origin, dm).classification
    except DickeError:
        # no stable reference on the coupling ray: fall back to the point itself
        kind = classify_eigenvalues(eig, float(np.linalg.norm(dm.m, 2)))
    if kind is Instability.Pitchfork:
        return Phase.Superradiant, lead
    return (Phase.RegularLasing if sz > 0 else Phase.CounterLasing), lead


def _evaluate(task) -> PhasePoint:
    params, settings, names, coords = task
    try:
        p, sz, gamma_t = _apply(params, settings, **dict(zip(names, coords)))
        phase, lead = classify_point(p, sz, gamma_t)
        return PhasePoint(coords, phase, lead, sz)
    except (DickeError, ValueError, BothStable) as exc:
        return PhasePoint(coords, Phase.Normal, complex("nan"), math.nan, f"{type(exc).__name__}: {exc}")


def phase_diagram(params: ModelParams, axis_x: Axis, axis_y: Axis,
                  settings: ScanSettings = ScanSettings(), workers: int = 1) -> list[list[PhasePoint]]:
    """Row-major grid ``[iy][ix]`` of classified points.

    Failed points are kept with ``phase=Normal`` and a non-empty ``error``.
    Output order does not depend on ``workers``.
    """
    names = (resolve_axis(axis_x.name), resolve_axis(axis_y.name))
    xs, ys = axis_x.values(), axis_y.values()
    tasks = [(params, settings, names, (float(x), float(y))) for y in ys for x in xs]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            flat = list(pool.map(_evaluate, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        flat = [_evaluate(t) for t in tasks]
    nx = len(xs)
    return [flat[i * nx:(i + 1) * nx] for i in range(len(ys))]


def phase_cut(params: ModelParams, axis: Axis, settings: ScanSettings = ScanSettings()) -> list[PhasePoint]:
    """One-dimensional scan along a single parameter."""
    name = resolve_axis(axis.name)
    return [_evaluate((params, settings, (name,), (float(v),))) for v in axis.values()]


def first_transition(cut: list[PhasePoint], target: Phase = Phase.Superradiant) -> float | None:
    """Coordinate of the first grid point in phase ``target`` (``None`` if absent)."""
    for pt in cut:
        if pt.phase is target:
            return pt.coordinates[0]
    return None


def phases_present(grid) -> set[Phase]:
    return {pt.phase for row in grid for pt in row}


# --- exponent reports ----------------------------------------------------------


@dataclass(frozen=True)
class ExponentReport:
    method: str
    which: str
    exponent: float
    stderr: float
    window: tuple[float, float]
    n_points: int


def _report(method, which, fit, sign=1.0) -> ExponentReport:
    return ExponentReport(method, which, sign * fit.exponent, fit.stderr, fit.window, fit.n_points)


def exponent_report(method: str, params: ModelParams, which: str, **options) -> ExponentReport:
    """Run the sweep behind one entry of the critical-exponent table and fit it.

    Supported ``(method, which)`` pairs:

    ``keldysh/susc``
        HP photon number below the collective threshold.
    ``meanfield/beta``
        free-energy minimiser without dissipation, otherwise MB fixed points.
    ``exact/xi``
        steady state at ``lam_c`` for ``N = 4..20`` (closed-system ground
        state when ``kappa = 0``).
    ``cumulant/xi``
        cumulant photon number against ``N`` at the given couplings.
    ``landau/{susc,xi,beta}``
        Landau oracle, classical when ``params.beta`` is finite, quantum otherwise.
    """
    from . import cumulant, exact, landau, meanfield, stability, thresholds

    key = (method, which)
    if key == ("keldysh", "susc"):
        sweep = stability.keldysh_susceptibility(params, **options)
        return _report(method, which, sweep.fit, -1.0)
    if key == ("meanfield", "beta"):
        dissipative = params.kappa > 0 or params.gamma > 0 or params.has_single_atom_channels
        if not dissipative:
            _, fit = meanfield.minimize_free_energy(params, **options)
            return _report(method, which, fit)
        sz = steady_sz(params)
        if params.has_single_atom_channels:
            from .params import transverse_rate
            lc = thresholds.lambda_c_single_atom(params.omega_c, params.omega_z, params.kappa,
                                                 transverse_rate(params), sz).lambda_c
        else:
            lc = thresholds.lambda_c_collective(params.omega_c, params.omega_z, params.kappa,
                                                params.gamma).lambda_c
        return _report(method, which, meanfield.mb_order_exponent(params, lc, **options))
    if key == ("exact", "xi"):
        n_list = options.pop("n_list", range(4, 21))
        if params.kappa == 0 and params.gamma == 0:
            return _report(method, which, exact.ground_state_scan(params, n_list, **options).fit)
        return _report(method, which, exact.finite_size_scan(params, n_list, **options).fit)
    if key == ("cumulant", "xi"):
        n_list = np.asarray(options.pop("n_list", [10, 30, 100, 300, 1000]), dtype=float)
        curve = cumulant.cumulant_steady_state(params, n_list, **options)
        from .fitting import fit_power_law
        return _report(method, which, fit_power_law(curve.n_atoms, curve.n_ph))
    if method == "landau":
        classical = not math.isinf(params.beta)
        temperature = 1.0 / params.beta if classical else 0.0
        if which == "susc":
            ks = options.pop("stiffnesses", np.geomspace(0.01, 1.0, 5))
            if classical:
                cfg = landau.LangevinConfig(temperature=temperature, seed=options.pop("seed", 0), **options)
                return _report(method, which, landau.langevin_susceptibility(cfg, ks).fit, -1.0)
            return _report(method, which, landau.qpt_susceptibility(ks).fit, -1.0)
        if which == "xi":
            ns = options.pop("quartic_ns", [1, 10, 100, 1000] if not classical else [1, 4, 16, 64, 256])
            if classical:
                cfg = landau.LangevinConfig(temperature=temperature, seed=options.pop("seed", 0), **options)
                return _report(method, which, landau.langevin_finite_size(cfg, ns).fit)
            return _report(method, which, landau.quartic_ground_state(ns)[1])
        if which == "beta":
            return _report(method, which, landau.landau_order_exponent(**options))
    raise ValueError(f"unsupported exponent report {method}/{which}")
