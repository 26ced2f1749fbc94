"""Landau-model oracles for the critical-exponent table.

The model is ``H = p^2/2 + k x^2/2 + x^4/(4N)`` with stiffness
``k = lam_c - lam``. Three independent routes probe its exponents:

* an underdamped Langevin integrator (classical bath, or flat NESS noise),
* Boltzmann quadrature of the classical equilibrium ``<x^2>``,
* a sinc-DVR diagonalisation of the quantum ground state.

The Langevin equation is ``x'' = -eta x' - k x - x^3/N + f`` with white noise
``<f(t) f(t')> = F0 delta(t - t')``. Equipartition ``<x^2> = T/k`` fixes the
fluctuation-dissipation value ``F0 = 2 eta T``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate, linalg, special

from .errors import GridTooNarrow, InsufficientPoints, UnderResolved
from .fitting import PowerLawFit, fit_power_law

# --- Langevin ----------------------------------------------------------------


@dataclass(frozen=True)
class LangevinConfig:
    eta: float = 1.0
    temperature: float = 1.0
    stiffness: float = 0.1
    quartic_n: float = math.inf  # inf switches the quartic term off
    dt: float = 0.02
    t_total: float = 2000.0
    seed: int = 0
    walkers: int = 256
    burn_in: float | None = None  # default: 10 relaxation times
    noise_f0: float | None = None  # flat NESS spectrum; None means 2 eta T

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        if not self.dt > 0 or not self.t_total > 0:
            raise ValueError("dt and t_total must be positive")
        if self.stiffness < 0:
            raise ValueError("stiffness must be non-negative (normal side)")
        if self.stiffness == 0 and math.isinf(self.quartic_n):
            raise ValueError("stiffness = 0 needs the quartic term")

    @property
    def f0(self) -> float:
        return 2.0 * self.eta * self.temperature if self.noise_f0 is None else self.noise_f0

    def effective_stiffness(self) -> float:
        """Curvature scale: ``k`` plus the quartic curvature at the thermal width."""
        k = self.stiffness
        if not math.isinf(self.quartic_n):
            x2 = math.sqrt(self.quartic_n * max(self.f0 / (2 * self.eta), 1e-300))
            k += 3.0 * x2 / self.quartic_n
        return k

    def relaxation_time(self) -> float:
        k = self.effective_stiffness()
        return (1.0 / self.eta) * max(1.0, self.eta**2 / k)

    def fastest_timescale(self) -> float:
        return min(1.0 / self.eta, 1.0 / math.sqrt(self.effective_stiffness()))


@dataclass(frozen=True)
class LangevinResult:
    mean_x2: float
    stderr: float
    dt: float


def _run_langevin(cfg: LangevinConfig) -> tuple[float, float]:
    rng = np.random.Generator(np.random.Philox(cfg.seed))
    m = cfg.walkers
    x = np.zeros(m)
    v = np.zeros(m)
    dt, eta, k = cfg.dt, cfg.eta, cfg.stiffness
    inv_n = 0.0 if math.isinf(cfg.quartic_n) else 1.0 / cfg.quartic_n
    kick = math.sqrt(cfg.f0 * dt)
    damp = 1.0 / (1.0 + eta * dt)
    burn = 10.0 * cfg.relaxation_time() if cfg.burn_in is None else cfg.burn_in
    n_burn = int(math.ceil(burn / dt))
    n_run = int(math.ceil(cfg.t_total / dt))
    acc = np.zeros(m)
    for step in range(n_burn + n_run):
        # semi-implicit Euler: friction implicit, force from the current position
        v = (v - dt * (k * x + inv_n * x**3) + kick * rng.standard_normal(m)) * damp
        x = x + dt * v
        if step >= n_burn:
            acc += x * x
    per_walker = acc / n_run
    mean = float(per_walker.mean())
    # walkers are independent blocks
    err = float(per_walker.std(ddof=1) / math.sqrt(m)) if m > 1 else math.nan
    return mean, err


def langevin_x2(cfg: LangevinConfig, shift_tol: float = 0.01, max_halvings: int = 4) -> LangevinResult:
    """Time- and ensemble-averaged ``<x^2>`` with automatic step refinement.

    The step is halved until ``<x^2>`` moves by less than ``shift_tol``
    (relative) or by less than two standard errors.

    Raises
    ------
    UnderResolved
        If ``dt`` exceeds 5% of the fastest dynamical timescale.
    """
    if cfg.dt > 0.05 * cfg.fastest_timescale():
        raise UnderResolved(f"dt={cfg.dt:g} exceeds 0.05 x fastest timescale "
                            f"{cfg.fastest_timescale():.3g}")
    if cfg.temperature == 0 and cfg.noise_f0 in (None, 0.0):
        mean, err = _run_langevin(cfg)
        return LangevinResult(mean, err, cfg.dt)
    mean, err = _run_langevin(cfg)
    dt = cfg.dt
    for _ in range(max_halvings):
        dt /= 2
        m2, e2 = _run_langevin(replace(cfg, dt=dt))
        shift = abs(m2 - mean)
        mean, err = m2, e2
        if shift < shift_tol * abs(mean) or shift < 2 * math.hypot(err, e2):
            break
    return LangevinResult(mean, err, dt)


def langevin_trajectory(cfg: LangevinConfig, x0: float, v0: float = 0.0, n_samples: int = 101):
    """Single noisy (or, at ``T = 0``, deterministic) trajectory ``(t, x)``."""
    rng = np.random.Generator(np.random.Philox(cfg.seed))
    n = int(math.ceil(cfg.t_total / cfg.dt))
    stride = max(1, n // (n_samples - 1))
    inv_n = 0.0 if math.isinf(cfg.quartic_n) else 1.0 / cfg.quartic_n
    kick = math.sqrt(cfg.f0 * cfg.dt)
    damp = 1.0 / (1.0 + cfg.eta * cfg.dt)
    x, v = x0, v0
    ts, xs = [0.0], [x0]
    for step in range(1, n + 1):
        noise = kick * rng.standard_normal() if kick else 0.0
        v = (v - cfg.dt * (cfg.stiffness * x + inv_n * x**3) + noise) * damp
        x = x + cfg.dt * v
        if step % stride == 0:
            ts.append(step * cfg.dt)
            xs.append(x)
    return np.array(ts), np.array(xs)


def boltzmann_x2(stiffness: float, quartic_n: float, temperature: float) -> float:
    """Classical ``<x^2>`` by quadrature of ``exp(-(k x^2/2 + x^4/(4N))/T)``."""
    inv_n = 0.0 if math.isinf(quartic_n) else 1.0 / quartic_n
    if stiffness == 0 and inv_n == 0:
        raise ValueError("unbounded potential")
    w = lambda x: math.exp(-(0.5 * stiffness * x * x + 0.25 * inv_n * x**4) / temperature)
    num = integrate.quad(lambda x: x * x * w(x), 0, math.inf, epsabs=0, epsrel=1e-12)[0]
    den = integrate.quad(w, 0, math.inf, epsabs=0, epsrel=1e-12)[0]
    return num / den


def quartic_classical_x2(quartic_n: float, temperature: float) -> float:
    """Closed form at ``k = 0``: ``sqrt(4 N T) Gamma(3/4) / Gamma(1/4)``."""
    return math.sqrt(4 * quartic_n * temperature) * special.gamma(0.75) / special.gamma(0.25)


@dataclass(frozen=True)
class SusceptibilityScan:
    control: np.ndarray
    x2: np.ndarray
    stderr: np.ndarray
    fit: PowerLawFit


def langevin_susceptibility(cfg: LangevinConfig, stiffnesses) -> SusceptibilityScan:
    """``<x^2>`` against ``k = lam_c - lam``; the fitted exponent is ``-gamma``."""
    ks = np.asarray(stiffnesses, dtype=float)
    res = [langevin_x2(replace(cfg, stiffness=float(k), seed=cfg.seed + i)) for i, k in enumerate(ks)]
    x2 = np.array([r.mean_x2 for r in res])
    return SusceptibilityScan(ks, x2, np.array([r.stderr for r in res]), fit_power_law(ks, x2))


def langevin_finite_size(cfg: LangevinConfig, quartic_ns) -> SusceptibilityScan:
    """``<x^2>`` at ``k = 0`` against ``N``; the fitted exponent is ``xi``."""
    ns = np.asarray(quartic_ns, dtype=float)
    if len(ns) < 3 or math.log10(ns.max() / ns.min()) < 1.5:
        raise InsufficientPoints("finite-size fits need >= 3 values of N over >= 1.5 decades")
    res = [langevin_x2(replace(cfg, stiffness=0.0, quartic_n=float(n), seed=cfg.seed + i))
           for i, n in enumerate(ns)]
    x2 = np.array([r.mean_x2 for r in res])
    return SusceptibilityScan(ns, x2, np.array([r.stderr for r in res]), fit_power_law(ns, x2))


# --- quantum ground state -------------------------------------------------------


def sinc_dvr_hamiltonian(grid: np.ndarray, potential) -> np.ndarray:
    """Colbert-Miller sinc-DVR matrix of ``p^2/2 + V(x)`` on a uniform grid."""
    dx = grid[1] - grid[0]
    n = len(grid)
    i = np.arange(n)
    d = i[:, None] - i[None, :]
    with np.errstate(divide="ignore"):
        t = np.where(d == 0, math.pi**2 / 3.0, 2.0 * (-1.0) ** d / np.where(d == 0, 1, d) ** 2)
    t = t / (2.0 * dx * dx)
    return t + np.diag(potential(grid))


@dataclass(frozen=True)
class GroundState:
    energy: float
    x2: float
    tail: float


def ground_state_x2(potential, half_width: float, points: int = 301,
                    tail_tol: float = 1e-12) -> GroundState:
    """Lowest eigenstate of ``p^2/2 + V`` on ``[-L, L]``; ``<x^2>`` and edge weight.

    Raises
    ------
    GridTooNarrow
        If the probability in the outer 5% of the box exceeds ``tail_tol``.
    """
    grid = np.linspace(-half_width, half_width, points)
    h = sinc_dvr_hamiltonian(grid, potential)
    e, vec = linalg.eigh(h, subset_by_index=[0, 0])
    p = vec[:, 0] ** 2
    p /= p.sum()
    edge = np.abs(grid) > 0.95 * half_width
    tail = float(p[edge].sum())
    if tail > tail_tol:
        raise GridTooNarrow(f"ground-state weight {tail:.2e} near the box edge")
    return GroundState(float(e[0]), float(p @ grid**2), tail)


def harmonic_x2(omega: float, points: int = 201) -> float:
    """Ground-state ``<x^2>`` of ``p^2/2 + omega^2 x^2/2`` (exact: ``1/(2 omega)``)."""
    width = 12.0 / math.sqrt(omega)
    return ground_state_x2(lambda x: 0.5 * omega**2 * x**2, width, points).x2


def quartic_ground_state(quartic_n, points: int = 301) -> tuple[np.ndarray, PowerLawFit | None]:
    """Ground-state ``<x^2>`` of ``p^2/2 + x^4/(4N)`` for each ``N`` and the ``xi`` fit.

    The box scales with the natural length ``N^{1/6}``. The fit is ``None``
    for fewer than three values of ``N``.
    """
    ns = np.atleast_1d(np.asarray(quartic_n, dtype=float))
    x2 = np.array([ground_state_x2(lambda x, n=n: x**4 / (4.0 * n), 9.0 * n ** (1 / 6), points).x2
                   for n in ns])
    fit = fit_power_law(ns, x2) if len(ns) >= 3 else None
    return x2, fit


def qpt_susceptibility(stiffnesses, points: int = 201) -> SusceptibilityScan:
    """Zero-point ``<x^2> = 1/(2 sqrt(k))`` from the DVR solver and its exponent."""
    ks = np.asarray(stiffnesses, dtype=float)
    x2 = np.array([harmonic_x2(math.sqrt(k), points) for k in ks])
    return SusceptibilityScan(ks, x2, np.zeros_like(x2), fit_power_law(ks, x2))


# --- equilibrium quadrature variances ------------------------------------------


def quadrature_x2_modes(lam: float, beta: float = math.inf) -> tuple[float, float]:
    """Mode variances ``<x_+^2>, <x_-^2>`` at ``w_c = w_z = 1``.

    The normal modes have ``w_pm = sqrt(1 pm 2 lam)`` and
    ``<x_pm^2> = coth(beta w_pm / 2) / (2 w_pm)``.
    """
    out = []
    for s in (1.0, -1.0):
        w2 = 1.0 + 2.0 * s * lam
        if w2 <= 0:
            raise ValueError("quadrature variances exist only for |lam| < 1/2")
        w = math.sqrt(w2)
        occ = 1.0 if math.isinf(beta) else 1.0 / math.tanh(0.5 * beta * w)
        out.append(occ / (2.0 * w))
    return out[0], out[1]


def quadrature_x2_eq(lam: float, beta: float = math.inf) -> float:
    """``<x_a^2> = (<x_+^2> + <x_-^2>) / 2``.

    At ``T = 0`` with ``lam_c = 1/2`` this is
    ``[(lam_c + lam)^{-1/2} + (lam_c - lam)^{-1/2}] / (4 sqrt 2)``.
    """
    xp, xm = quadrature_x2_modes(lam, beta)
    return 0.5 * (xp + xm)


def quadrature_x2_closed_form(lam: float) -> float:
    lc = 0.5
    return ((lc + lam) ** -0.5 + (lc - lam) ** -0.5) / (4.0 * math.sqrt(2.0))


def quadrature_susceptibility(distances, beta: float = math.inf) -> SusceptibilityScan:
    """``<x_a^2>`` against ``lam_c - lam``; the slope is ``-gamma``."""
    d = np.asarray(distances, dtype=float)
    x2 = np.array([quadrature_x2_eq(0.5 - di, beta) for di in d])
    return SusceptibilityScan(d, x2, np.zeros_like(x2), fit_power_law(d, x2))


def landau_minimum(distance: float, quartic_n: float = 1.0) -> float:
    """Positive minimiser of ``-d x^2/2 + x^4/(4N)`` found numerically (``d = lam - lam_c``)."""
    from scipy.optimize import minimize_scalar

    hi = 4.0 * math.sqrt(quartic_n * max(distance, 1e-300))
    res = minimize_scalar(lambda x: -0.5 * distance * x * x + x**4 / (4.0 * quartic_n),
                          bounds=(0.0, hi), method="bounded", options={"xatol": 1e-14 * hi})
    return float(res.x)


def landau_order_exponent(distances=None, quartic_n: float = 1.0) -> PowerLawFit:
    """Order-parameter exponent from ``x_min`` against ``lam - lam_c``."""
    d = np.geomspace(1e-4, 1e-2, 8) if distances is None else np.asarray(distances, dtype=float)
    return fit_power_law(d, [landau_minimum(di, quartic_n) for di in d])
