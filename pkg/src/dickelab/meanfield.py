"""Equilibrium mean-field free energy and Maxwell-Bloch dynamics.

The Maxwell-Bloch (MB) equations evolve ``a = <a>``, ``sp = <sigma_+>`` and
``sz = <sigma_z>`` of a single representative atom after factorising
``<a sigma> = <a><sigma>``. With ``s- = conj(sp)``::

    da/dt  = -(i w_c + kappa) a - i sqrt(N) (lam s- + lam' sp)
    dsp/dt = (i w_z - G) sp - (2i/sqrt(N)) sz (lam a* + lam' a) + 2 gamma sz sp
    dsz/dt = (2/sqrt(N)) (lam Im(a sp) + lam' Im(a* sp))
             - g_dn (1 + 2 sz) + g_up (1 - 2 sz) - 2 gamma |sp|^2

where ``G = gamma_phi + gamma_down + gamma_up`` and ``gamma`` is the
collective decay. Linearised about ``a = sp = 0`` these reproduce
``stability.build_drift_mb``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize
from scipy.integrate import solve_ivp

from .errors import FlatLandscape, StepSizeUnderflow
from .fitting import PowerLawFit, fit_power_law
from .params import ModelParams, steady_sz, transverse_rate
from .thresholds import lambda_c_equilibrium

# --- equilibrium free energy ----------------------------------------------


def _log2cosh(x):
    x = np.abs(x)
    return x + np.log1p(np.exp(-2.0 * x))


def free_energy(alpha, params: ModelParams, beta: float | None = None):
    """``F = w_c alpha^2 - (N/beta) ln(2 cosh(beta E))`` with ``E = sqrt(w_z^2/4 + 4 lam^2 alpha^2 / N)``."""
    beta = params.beta if beta is None else beta
    alpha = np.asarray(alpha, dtype=float)
    n = params.n_atoms
    e = np.sqrt(0.25 * params.omega_z**2 + 4.0 * params.lam**2 * alpha**2 / n)
    if math.isinf(beta):
        f = params.omega_c * alpha**2 - n * e
    else:
        f = params.omega_c * alpha**2 - n / beta * _log2cosh(beta * e)
    return f if f.ndim else float(f)


@dataclass(frozen=True)
class FreeEnergyCurve:
    alpha_grid: np.ndarray
    f_values: np.ndarray
    minimizer: float


def free_energy_curve(params: ModelParams, alpha_max: float, points: int = 401,
                      beta: float | None = None) -> FreeEnergyCurve:
    grid = np.linspace(-alpha_max, alpha_max, points)
    return FreeEnergyCurve(grid, free_energy(grid, params, beta), order_parameter(params, beta))


def order_parameter(params: ModelParams, beta: float | None = None) -> float:
    """Non-negative minimiser ``alpha*`` of the free energy.

    Stationarity for ``alpha != 0`` reads ``w_c E = 2 lam^2 tanh(beta E)``;
    it is solved for ``E`` (monotone, bracketed) and converted back to
    ``alpha``, which keeps full precision arbitrarily close to threshold.
    """
    beta = params.beta if beta is None else beta
    lc = lambda_c_equilibrium(params.omega_c, params.omega_z, beta).lambda_c
    if params.lam <= lc:
        return 0.0
    lam2 = params.lam**2
    th = (lambda e: 1.0) if math.isinf(beta) else (lambda e: math.tanh(beta * e))
    e0 = 0.5 * params.omega_z
    g = lambda e: params.omega_c * e - 2.0 * lam2 * th(e)
    # g(e0) < 0 above threshold and g(2 lam^2 / w_c) >= 0
    e_star = optimize.brentq(g, e0, max(2.0 * lam2 / params.omega_c, e0) * (1 + 1e-12) + 1e-300,
                             xtol=1e-15, rtol=4 * np.finfo(float).eps)
    a2 = params.n_atoms * (e_star**2 - e0**2) / (4.0 * lam2)
    return math.sqrt(max(a2, 0.0))


def minimize_free_energy(params: ModelParams, beta: float | None = None,
                         window: tuple[float, float] = (1.001, 1.05),
                         points: int = 12) -> tuple[float, PowerLawFit]:
    """Order parameter at ``params`` and the exponent fit of ``alpha*`` vs ``lam - lam_c``.

    The fit samples ``lam / lam_c`` geometrically inside ``window``.
    """
    beta = params.beta if beta is None else beta
    lc = lambda_c_equilibrium(params.omega_c, params.omega_z, beta).lambda_c
    ratios = np.geomspace(window[0], window[1], points)
    alphas = np.array([order_parameter(params.with_(lam=r * lc), beta) for r in ratios])
    if np.any(alphas <= 0):
        raise FlatLandscape("alpha* vanishes inside the fit window: window must lie above lambda_c")
    fit = fit_power_law((ratios - 1.0) * lc, alphas)
    return order_parameter(params, beta), fit


# --- Maxwell-Bloch ---------------------------------------------------------


@dataclass(frozen=True)
class MeanFieldState:
    a: complex
    sp: complex
    sz: float

    def to_vector(self) -> np.ndarray:
        return np.array([self.a.real, self.a.imag, self.sp.real, self.sp.imag, self.sz])

    @classmethod
    def from_vector(cls, v) -> "MeanFieldState":
        return cls(complex(v[0], v[1]), complex(v[2], v[3]), float(v[4]))

    def bloch_norm2(self) -> float:
        return abs(self.sp) ** 2 + self.sz**2


def mb_rhs_vector(t, v, params: ModelParams):
    a = v[0] + 1j * v[1]
    sp = v[2] + 1j * v[3]
    sz = v[4]
    sq = math.sqrt(params.n_atoms)
    lam, lamp = params.lam, params.lam_p
    g = params.gamma
    da = -(1j * params.omega_c + params.kappa) * a - 1j * sq * (lam * np.conj(sp) + lamp * sp)
    dsp = ((1j * params.omega_z - transverse_rate(params)) * sp
           - (2j / sq) * sz * (lam * np.conj(a) + lamp * a) + 2.0 * g * sz * sp)
    dsz = ((2.0 / sq) * (lam * (a * sp).imag + lamp * (np.conj(a) * sp).imag)
           - params.gamma_down * (1 + 2 * sz) + params.gamma_up * (1 - 2 * sz)
           - 2.0 * g * abs(sp) ** 2)
    return np.array([da.real, da.imag, dsp.real, dsp.imag, dsz])


def mb_rhs(state: MeanFieldState, params: ModelParams) -> MeanFieldState:
    return MeanFieldState.from_vector(mb_rhs_vector(0.0, state.to_vector(), params))


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    a: np.ndarray
    sp: np.ndarray
    sz: np.ndarray

    def final(self) -> MeanFieldState:
        return MeanFieldState(complex(self.a[-1]), complex(self.sp[-1]), float(self.sz[-1]))


def integrate_mb(state0: MeanFieldState, params: ModelParams, t_final: float,
                 n_samples: int = 201, rtol: float = 1e-9, atol: float = 1e-12,
                 t_eval=None) -> Trajectory:
    """Adaptive explicit (DOP853) integration of the MB equations."""
    if not t_final > 0:
        raise ValueError("t_final must be positive")
    t_eval = np.linspace(0.0, t_final, n_samples) if t_eval is None else np.asarray(t_eval)
    sol = solve_ivp(mb_rhs_vector, (0.0, t_final), state0.to_vector(), method="DOP853",
                    t_eval=t_eval, rtol=rtol, atol=atol, args=(params,))
    if sol.status != 0:
        raise StepSizeUnderflow(sol.message)
    y = sol.y
    return Trajectory(sol.t, y[0] + 1j * y[1], y[2] + 1j * y[3], y[4])


def normal_state(params: ModelParams) -> MeanFieldState:
    return MeanFieldState(0j, 0j, steady_sz(params))


DEFAULT_SEED = 1e-3


def mb_steady_state(params: ModelParams, seed: MeanFieldState | None = None,
                    t_relax: float = 400.0, tol: float = 1e-10) -> MeanFieldState:
    """Late-time MB fixed point reached from a symmetry-breaking seed.

    The trajectory is integrated for ``t_relax`` and then polished by a
    Newton-type root solve; the polished point is rejected (and the integrator
    continued) if it leaves the Bloch ball or the residual stays above ``tol``.
    """
    if seed is None:
        sp0 = complex(DEFAULT_SEED, DEFAULT_SEED)
        # stay inside the Bloch ball: collective decay conserves its radius
        sz0 = steady_sz(params)
        sz0 = math.copysign(min(abs(sz0), math.sqrt(0.25 - abs(sp0) ** 2)), sz0)
        seed = MeanFieldState(sp0, sp0, sz0)
    state = seed
    # without single-atom channels the Bloch radius is a constant of motion
    # and fixed points come in a family; pin the radius in the polish
    conserved = not params.has_single_atom_channels
    radius2 = seed.bloch_norm2()

    def residual(v):
        r = mb_rhs_vector(0.0, v, params)
        if conserved:
            r[4] = v[2] ** 2 + v[3] ** 2 + v[4] ** 2 - radius2
        return r

    for _ in range(8):
        state = integrate_mb(state, params, t_relax, n_samples=2).final()
        sol = optimize.root(residual, state.to_vector(), method="hybr", options={"xtol": 1e-14})
        cand = MeanFieldState.from_vector(sol.x)
        res = np.linalg.norm(mb_rhs_vector(0.0, sol.x, params))
        if sol.success and res < tol and cand.bloch_norm2() <= max(0.25, radius2) + 1e-9:
            # reject a jump back to the normal point when the flow had left it
            if abs(cand.a) > 0.1 * abs(state.a) or abs(state.a) < 1e-6:
                return cand
    raise StepSizeUnderflow("no MB fixed point found (the attractor may be a limit cycle)")


def mb_order_exponent(params: ModelParams, lam_c: float, window: tuple[float, float] = (1.001, 1.05),
                      points: int = 8) -> PowerLawFit:
    """Exponent of ``|a|/sqrt(N)`` at the MB fixed point vs ``lam - lam_c``."""
    ratios = np.geomspace(window[0], window[1], points)
    amps = []
    seed = None
    # sweep downward so each fixed point seeds the next, closer to threshold
    for r in ratios[::-1]:
        st = mb_steady_state(params.with_(lam=r * lam_c), seed)
        amps.append(abs(st.a) / math.sqrt(params.n_atoms))
        seed = st
    amps = np.array(amps[::-1])
    if np.any(amps < 1e-8):
        raise FlatLandscape("MB steady state is normal inside the fit window")
    return fit_power_law((ratios - 1.0) * lam_c, amps)
