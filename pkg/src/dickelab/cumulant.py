"""Second-order cumulant equations in the Z2-symmetric sector.

Moments are ``n = <a^+ a>``, ``A = <aa>``, ``X = <a sigma_x>``,
``Y = <a sigma_y>``, the cross-site correlators
``xx, yy, zz, xy = <sigma_i^a sigma_j^b>`` (``i != j``) and ``sz``.
Writing the coupling as ``g_x (a + a^+) S_x + i g_y (a - a^+) S_y`` with
``g_x = (lam + lam')/sqrt(N)`` and ``g_y = (lam - lam')/sqrt(N)``, and
dropping third-order cumulants, the Heisenberg-Lindblad equations are::

    n'  = -2 kappa n - 2N g_x Im X - 2N g_y Re Y
    A'  = -2 (i w_c + kappa) A - 2i N g_x X - 2N g_y Y
    X'  = -(i w_c + kappa + G) X - w_z Y - i g_x [(N-1) xx + 1/4]
          - g_y [(N-1) xy - (i/2) sz] + i g_y sz (A - n - 1)
    Y'  = -(i w_c + kappa + G) Y + w_z X - i g_x [(N-1) xy + (i/2) sz]
          - g_y [(N-1) yy + 1/4] - g_x sz (A + n + 1)
    xx' = -2 w_z xy - 4 g_y sz Im X - 2 G xx
    yy' =  2 w_z xy - 4 g_x sz Re Y - 2 G yy
    zz' =  4 g_x sz Re Y + 4 g_y sz Im X + 2 (g_up - g_dn) sz - 4 (g_up + g_dn) zz
    xy' =  w_z (xx - yy) - 2 g_x sz Re X - 2 g_y sz Im Y - 2 G xy
    sz' =  2 g_x Re Y + 2 g_y Im X - g_dn (1 + 2 sz) + g_up (1 - 2 sz)

with ``G = gamma_phi + gamma_down + gamma_up``. ``N`` appears only through
the ``(N-1)`` pair counts and the ``N g`` factors of the photon equations.
Collective atomic decay is not part of this closure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np
from scipy import optimize
from scipy.integrate import solve_ivp

from .errors import CollectiveDecayNotSupported, NonStationary
from .params import ModelParams, transverse_rate


@dataclass(frozen=True)
class MomentState:
    n_ph: float = 0.0
    aa: complex = 0j
    ax: complex = 0j
    ay: complex = 0j
    xx: float = 0.0
    yy: float = 0.0
    zz: float = 0.25
    xy: float = 0.0
    sz: float = -0.5

    def to_vector(self) -> np.ndarray:
        return np.array([self.n_ph, self.aa.real, self.aa.imag, self.ax.real, self.ax.imag,
                         self.ay.real, self.ay.imag, self.xx, self.yy, self.zz, self.xy, self.sz])

    @classmethod
    def from_vector(cls, v) -> "MomentState":
        v = np.asarray(v, dtype=float)
        return cls(float(v[0]), complex(v[1], v[2]), complex(v[3], v[4]), complex(v[5], v[6]),
                   float(v[7]), float(v[8]), float(v[9]), float(v[10]), float(v[11]))

    def as_row(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


GROUND = MomentState()


def _check(params: ModelParams):
    if params.gamma > 0:
        raise CollectiveDecayNotSupported("the cumulant closure handles single-atom channels only")


def cumulant_rhs_vector(t, v, params: ModelParams, freeze_sz: bool = False) -> np.ndarray:
    n, A, X, Y = v[0], v[1] + 1j * v[2], v[3] + 1j * v[4], v[5] + 1j * v[6]
    xx, yy, zz, xy, sz = v[7], v[8], v[9], v[10], v[11]
    N = params.n_atoms
    rt = math.sqrt(N)
    gx = (params.lam + params.lam_p) / rt
    gy = (params.lam - params.lam_p) / rt
    wc, wz, k = params.omega_c, params.omega_z, params.kappa
    G = transverse_rate(params)
    gdn, gup = params.gamma_down, params.gamma_up
    m = N - 1

    dn = -2 * k * n - 2 * N * gx * X.imag - 2 * N * gy * Y.real
    dA = -2 * (1j * wc + k) * A - 2j * N * gx * X - 2 * N * gy * Y
    dX = (-(1j * wc + k + G) * X - wz * Y - 1j * gx * (m * xx + 0.25)
          - gy * (m * xy - 0.5j * sz) + 1j * gy * sz * (A - n - 1))
    dY = (-(1j * wc + k + G) * Y + wz * X - 1j * gx * (m * xy + 0.5j * sz)
          - gy * (m * yy + 0.25) - gx * sz * (A + n + 1))
    dxx = -2 * wz * xy - 4 * gy * sz * X.imag - 2 * G * xx
    dyy = 2 * wz * xy - 4 * gx * sz * Y.real - 2 * G * yy
    dzz = (4 * gx * sz * Y.real + 4 * gy * sz * X.imag + 2 * (gup - gdn) * sz
           - 4 * (gup + gdn) * zz)
    dxy = wz * (xx - yy) - 2 * gx * sz * X.real - 2 * gy * sz * Y.imag - 2 * G * xy
    dsz = 0.0 if freeze_sz else (2 * gx * Y.real + 2 * gy * X.imag
                                 - gdn * (1 + 2 * sz) + gup * (1 - 2 * sz))
    if freeze_sz:
        dzz = 0.0
    return np.array([dn, dA.real, dA.imag, dX.real, dX.imag, dY.real, dY.imag,
                     dxx, dyy, dzz, dxy, dsz])


def cumulant_rhs(state: MomentState, params: ModelParams, freeze_sz: bool = False) -> MomentState:
    """Time derivative of every moment under the closed second-order equations."""
    _check(params)
    return MomentState.from_vector(cumulant_rhs_vector(0.0, state.to_vector(), params, freeze_sz))


@dataclass(frozen=True)
class MomentTrajectory:
    t: np.ndarray
    y: np.ndarray  # (len(t), 12) real vectors

    def states(self) -> list[MomentState]:
        return [MomentState.from_vector(r) for r in self.y]

    @property
    def n_ph(self) -> np.ndarray:
        return self.y[:, 0]


def integrate_cumulant(state0: MomentState, params: ModelParams, t_final: float,
                       t_eval=None, rtol: float = 1e-9, atol: float = 1e-12,
                       freeze_sz: bool = False) -> MomentTrajectory:
    _check(params)
    t_eval = np.linspace(0, t_final, 201) if t_eval is None else np.asarray(t_eval)
    sol = solve_ivp(cumulant_rhs_vector, (0.0, t_final), state0.to_vector(), method="LSODA",
                    t_eval=t_eval, rtol=rtol, atol=atol, args=(params, freeze_sz))
    if sol.status != 0:
        raise NonStationary(sol.message)
    return MomentTrajectory(sol.t, sol.y.T)


def cumulant_fixed_point(params: ModelParams, state0: MomentState = GROUND,
                          t_chunk: float = 200.0, t_max: float = 2e5, tol: float = 1e-10,
                          freeze_sz: bool = False) -> MomentState:
    """Stationary moments: pseudo-time integration followed by a Newton polish.

    Without ``gamma_down`` and ``gamma_up`` the combination ``zz - sz^2`` is a
    constant of motion; its conservation replaces the ``zz`` equation in the
    polish so the Jacobian stays regular.
    """
    _check(params)
    conserved = params.gamma_down == 0 and params.gamma_up == 0 and not freeze_sz
    c0 = state0.zz - state0.sz**2
    v = state0.to_vector()
    t = 0.0
    f = lambda x: cumulant_rhs_vector(0.0, x, params, freeze_sz)

    def residual(x):
        r = f(x)
        if conserved:
            r[9] = x[9] - x[11] ** 2 - c0
        return r

    while t < t_max:
        sol = solve_ivp(cumulant_rhs_vector, (0.0, t_chunk), v, method="LSODA",
                        rtol=1e-9, atol=1e-12, args=(params, freeze_sz))
        if sol.status != 0:
            raise NonStationary(sol.message)
        v = sol.y[:, -1]
        t += t_chunk
        scale = max(1.0, abs(v[0]))
        if np.linalg.norm(f(v)) < 1e-5 * scale:
            root = optimize.root(residual, v, method="hybr", options={"xtol": 1e-15})
            cand = root.x
            near = np.linalg.norm(cand - v) <= 1e-2 * max(1.0, np.linalg.norm(v))
            physical = cand[0] >= -1e-12 and abs(cand[11]) <= 0.5 + 1e-12
            if np.linalg.norm(f(cand)) < tol * scale and near and physical:
                return MomentState.from_vector(cand)
            if np.linalg.norm(f(v)) < tol * scale:
                return MomentState.from_vector(v)
    raise NonStationary(f"no stationary point reached within t_max={t_max}")


@dataclass(frozen=True)
class CumulantCurve:
    n_atoms: np.ndarray
    n_ph: np.ndarray
    states: tuple[MomentState, ...]

    @property
    def n_ph_per_atom(self) -> np.ndarray:
        return self.n_ph / self.n_atoms


def cumulant_steady_state(params: ModelParams, n_atoms_list, **kwargs) -> CumulantCurve:
    """Steady photon number for each ``N`` at fixed (collective) couplings.

    Couplings carry the ``1/sqrt(N)`` of the Hamiltonian, so keeping ``lam``
    fixed keeps ``lam sqrt(N)`` in the per-atom normalisation fixed.
    """
    states = []
    for n in n_atoms_list:
        states.append(cumulant_fixed_point(params.with_(n_atoms=int(n)), **kwargs))
    ns = np.asarray(n_atoms_list, dtype=float)
    return CumulantCurve(ns, np.array([s.n_ph for s in states]), tuple(states))


@dataclass(frozen=True)
class ExactComparison:
    n_atoms: np.ndarray
    cumulant: np.ndarray
    exact: np.ndarray

    @property
    def rel_diff(self) -> np.ndarray:
        return np.abs(self.cumulant - self.exact) / np.abs(self.exact)


def compare_with_exact(params: ModelParams, n_atoms_list, cutoff: int = 10,
                       cutoff_tol: float = 1e-5) -> ExactComparison:
    """Cumulant vs numerically exact steady-state photon numbers.

    Without single-atom channels the exact state lives on the Dicke
    manifold; otherwise the permutation-symmetric generator restricted to
    the even Z2 sector is used.
    """
    from functools import partial

    from .exact import build_collective_liouvillian, build_permsym_liouvillian, solve_with_cutoff

    builder = (partial(build_permsym_liouvillian, even_sector=True)
               if params.has_single_atom_channels else build_collective_liouvillian)
    curve = cumulant_steady_state(params, n_atoms_list)
    exact = []
    for n in n_atoms_list:
        st = solve_with_cutoff(builder, params.with_(n_atoms=int(n)), cutoff, cutoff_tol=cutoff_tol)
        exact.append(st.observables["n_ph"])
        cutoff = st.photon_cutoff
    return ExactComparison(curve.n_atoms, curve.n_ph, np.array(exact))
