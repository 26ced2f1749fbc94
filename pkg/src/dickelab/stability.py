"""Linear equations of motion: drift matrices, Green's functions, instabilities.

A ``DriftMatrix`` holds ``M`` of ``dv/dt = M v`` for a vector of operators
``v = (a, a^+, b, b^+)`` (or mean-field amplitudes) together with the matrix
``S_ij = <[v_i, v_j^+]>`` of equal-time commutators. From these

    G^R(omega) = [omega - i M]^{-1} S,
    G^K(omega) = -G^R(omega) D^K G^A(omega),   D^K = 2i diag(noise rates),

with ``G^R_ij(t) = -i <[v_i(t), v_j^+(0)]> theta(t)`` and
``G^K_ij(t) = -i <{v_i(t), v_j^+(0)}>``. In this convention ``i G^K`` is
Hermitian positive semi-definite and ``<a^+ a> = (int domega/2pi iG^K_aa - 1)/2``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg as sla
from scipy.integrate import quad, simpson

from .errors import (
    BothStable,
    BothUnstable,
    GridTooNarrow,
    NonAnalyticWindow,
    NoSignChange,
    SingleAtomChannelPresent,
    SingularAtFrequency,
    UnstableDrift,
)
from .fitting import PowerLawFit, fit_power_law
from .params import ModelParams, transverse_rate
from .thresholds import DisorderSpec, Method, ThresholdResult, lambda_c_collective

HP_LABELS = ("a", "a+", "b", "b+")
MB_LABELS = ("<a>", "<a+>", "sqrtN<s->", "sqrtN<s+>")


@dataclass(frozen=True)
class DriftMatrix:
    m: np.ndarray
    signature: np.ndarray
    basis_labels: tuple[str, ...]

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(self.m)

    def max_real_eig(self) -> float:
        return float(np.max(self.eigenvalues.real))

    def is_stable(self) -> bool:
        return self.max_real_eig() < 0


def _coupled_block(omega_c, omega_z, kappa, gamma, lam, lam_p, row_scale=1.0, gamma_shift=0.0):
    """Generalized two-mode drift; atomic rows multiplied by ``row_scale``."""
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = -(kappa + 1j * omega_c)
    m[1, 1] = -(kappa - 1j * omega_c)
    m[0, 2], m[0, 3] = -1j * lam, -1j * lam_p
    m[1, 2], m[1, 3] = 1j * lam_p, 1j * lam
    g = gamma + gamma_shift
    m[2, 2] = -(g + 1j * omega_z)
    m[3, 3] = -(g - 1j * omega_z)
    m[2, 0], m[2, 1] = -1j * lam * row_scale, -1j * lam_p * row_scale
    m[3, 0], m[3, 1] = 1j * lam_p * row_scale, 1j * lam * row_scale
    return m


def build_drift_hp(params: ModelParams) -> DriftMatrix:
    """Holstein-Primakoff drift matrix; collective channels only."""
    if params.has_single_atom_channels:
        raise SingleAtomChannelPresent(
            "the Holstein-Primakoff boson only supports kappa and collective gamma")
    m = _coupled_block(params.omega_c, params.omega_z, params.kappa, params.gamma,
                       params.lam, params.lam_p)
    return DriftMatrix(m, np.diag([1.0, -1.0, 1.0, -1.0]).astype(complex), HP_LABELS)


def build_drift_mb(params: ModelParams, sz: float, gamma_t: float | None = None) -> DriftMatrix:
    """Maxwell-Bloch drift linearised about the normal state with inversion ``sz``.

    Atomic rows are those of the Holstein-Primakoff matrix times ``-2 sz``.
    The coherence decays at ``gamma_t`` (default: ``gamma_phi + gamma_down +
    gamma_up``) plus ``-2 gamma sz`` from collective decay.
    """
    if not -0.5 <= sz <= 0.5:
        raise ValueError(f"sz must lie in [-1/2, 1/2], got {sz}")
    gt = transverse_rate(params) if gamma_t is None else gamma_t
    m = _coupled_block(params.omega_c, params.omega_z, params.kappa, gt, params.lam,
                       params.lam_p, row_scale=-2.0 * sz, gamma_shift=-2.0 * params.gamma * sz)
    # the atomic amplitudes are c-numbers: the signature mirrors the
    # Holstein-Primakoff one at sz = -1/2 and scales with -2 sz
    sig = np.diag([1.0, -1.0, -2.0 * sz, 2.0 * sz]).astype(complex)
    return DriftMatrix(m, sig, MB_LABELS)


def build_drift_disordered(params: ModelParams, disorder: DisorderSpec, sz: float,
                           gamma_t: float | None = None, scale: float = 1.0) -> DriftMatrix:
    """Mean-field drift for several atomic species sharing one cavity mode.

    Species ``j`` carries weight ``w_j``, coupling ``scale * lambda_j`` and
    splitting ``omega_z_j``; its amplitude is ``sqrt(N w_j) <s_->``. Reduces to
    ``build_drift_mb`` for one species.
    """
    gt = transverse_rate(params) if gamma_t is None else gamma_t
    w = disorder.normalized_weights()
    k = len(w)
    m = np.zeros((2 + 2 * k, 2 + 2 * k), dtype=complex)
    m[0, 0] = -(params.kappa + 1j * params.omega_c)
    m[1, 1] = -(params.kappa - 1j * params.omega_c)
    for j in range(k):
        lam = scale * disorder.lambdas[j] * math.sqrt(w[j])
        wz = disorder.omega_zs[j]
        p, q = 2 + 2 * j, 3 + 2 * j
        m[0, p] = m[0, q] = -1j * lam
        m[1, p] = m[1, q] = 1j * lam
        m[p, 0] = m[p, 1] = 2j * lam * sz
        m[q, 0] = m[q, 1] = -2j * lam * sz
        m[p, p] = -(gt + 1j * wz)
        m[q, q] = -(gt - 1j * wz)
    sig = np.diag([1.0, -1.0] + [-2.0 * sz, 2.0 * sz] * k).astype(complex)
    labels = ("<a>", "<a+>") + tuple(f"c{j}{s}" for j in range(k) for s in ("-", "+"))
    return DriftMatrix(m, sig, labels)


def keldysh_noise(params: ModelParams) -> np.ndarray:
    """``D^K = 2i diag(kappa, kappa, gamma, gamma)`` for vacuum Markovian baths."""
    return 2j * np.diag([params.kappa, params.kappa, params.gamma, params.gamma]).astype(complex)


# --- Green's functions -----------------------------------------------------


def retarded_green(dm: DriftMatrix, omega):
    """``[omega - i M]^{-1} S`` for a scalar or an array of frequencies."""
    omega = np.asarray(omega, dtype=float)
    n = dm.m.shape[0]
    eye = np.eye(n)
    ws = np.atleast_1d(omega)
    a = ws[:, None, None] * eye - 1j * dm.m[None]
    # purely oscillating modes make a exactly singular on resonance
    conds = np.linalg.cond(a)
    if np.any(~np.isfinite(conds)) or np.any(conds > 1e14):
        bad = ws[~np.isfinite(conds) | (conds > 1e14)][0]
        raise SingularAtFrequency(f"omega - iM is singular at omega={bad}")
    g = np.linalg.solve(a, np.broadcast_to(dm.signature, a.shape))
    return g[0] if omega.ndim == 0 else g


@dataclass(frozen=True)
class GreenFunctionSample:
    omega_grid: np.ndarray
    gr: np.ndarray
    gk: np.ndarray
    dk: np.ndarray
    # reference frequency for default low-frequency windows: min(kappa, |omega_c|)
    scale: float = 1.0
    eigenvalues: np.ndarray = field(default_factory=lambda: np.zeros(0), compare=False)

    @property
    def ga(self) -> np.ndarray:
        return np.conj(np.swapaxes(self.gr, -1, -2))


def frequency_grid(dm: DriftMatrix, points_per_resonance: int = 800, n_log: int = 2000,
                   reach: float = 1e7) -> np.ndarray:
    """Grid resolving every Lorentzian of ``G^R`` plus logarithmic wings.

    Each eigenvalue ``mu`` of ``M`` gives a resonance at ``omega = -Im mu`` of
    half-width ``|Re mu|``; nodes are ``center + width * tan(theta)`` on a
    uniform ``theta`` grid, which makes a Lorentzian uniformly sampled.
    """
    eig = np.linalg.eigvals(dm.m)
    scale = max(np.max(np.abs(eig)), 1e-12)
    theta = np.linspace(-0.5 * np.pi, 0.5 * np.pi, points_per_resonance + 2)[1:-1]
    parts = [np.zeros(1)]
    for mu in eig:
        width = max(abs(mu.real), 1e-9 * scale)
        parts.append(-mu.imag + width * np.tan(theta))
    tiny = min(max(abs(mu.real), 1e-9 * scale) for mu in eig)
    logs = np.geomspace(1e-3 * tiny, reach * scale, n_log)
    parts.extend([logs, -logs])
    grid = np.unique(np.concatenate(parts))
    return grid[np.abs(grid) <= reach * scale]


def keldysh_green(dm: DriftMatrix, dk: np.ndarray, omega_grid=None) -> GreenFunctionSample:
    """Tabulate ``G^R`` and ``G^K = -G^R D^K G^A``; requires a strictly stable ``M``."""
    eig = np.linalg.eigvals(dm.m)
    if np.max(eig.real) >= 0:
        raise UnstableDrift(f"drift has max Re eig = {np.max(eig.real):.3e} >= 0")
    grid = frequency_grid(dm) if omega_grid is None else np.asarray(omega_grid, dtype=float)
    gr = retarded_green(dm, grid)
    ga = np.conj(np.swapaxes(gr, -1, -2))
    gk = -gr @ dk @ ga
    kappa, wc = -dm.m[0, 0].real, abs(dm.m[0, 0].imag)
    positive = [v for v in (kappa, wc) if v > 0]
    scale = min(positive) if positive else 1.0
    return GreenFunctionSample(grid, gr, gk, np.asarray(dk), scale, eig)


def photon_number_keldysh(sample: GreenFunctionSample, index: int = 0,
                          tail_tol: float = 1e-6) -> float:
    """``<v^+ v>`` for basis entry ``index`` from ``2n + 1 = int domega/2pi iG^K``.

    The integrand decays as ``C/omega^2``; the neglected wings are estimated
    from the outermost grid points and must be below ``tail_tol`` relative to
    the integral, else ``GridTooNarrow``. The estimated wings are added.
    """
    w = sample.omega_grid
    f = (1j * sample.gk[:, index, index]).real / (2.0 * math.pi)
    core = float(simpson(f, x=w))
    tail = f[0] * abs(w[0]) + f[-1] * abs(w[-1])
    if abs(tail) > tail_tol * abs(core):
        raise GridTooNarrow(f"tail estimate {tail:.3e} exceeds {tail_tol:g} of {core:.3e}")
    total = core + tail
    return 0.5 * (total - 1.0)


def coupled_block(dm: DriftMatrix, dk: np.ndarray, index: int) -> tuple[DriftMatrix, np.ndarray, int]:
    """Restrict to the modes dynamically connected to ``index``.

    Decoupled lossless modes (atoms at ``lambda = 0`` without decay) would
    otherwise make the full drift marginal although the mode of interest is
    perfectly damped.
    """
    link = (np.abs(dm.m) > 0) | (np.abs(dm.m.T) > 0)
    keep, frontier = {index}, [index]
    while frontier:
        i = frontier.pop()
        for j in np.flatnonzero(link[i]):
            if j not in keep:
                keep.add(int(j))
                frontier.append(int(j))
    idx = np.array(sorted(keep))
    sub = DriftMatrix(dm.m[np.ix_(idx, idx)], dm.signature[np.ix_(idx, idx)],
                      tuple(dm.basis_labels[i] for i in idx))
    return sub, np.asarray(dk)[np.ix_(idx, idx)], int(np.searchsorted(idx, index))


def photon_number(dm: DriftMatrix, dk: np.ndarray, index: int = 0, rtol: float = 1e-11) -> float:
    """Photon number by adaptive frequency integration of ``iG^K``.

    The real axis is split at every resonance centre ``-Im mu`` and at one
    half-width on either side, and each piece (the outer two are infinite) is
    integrated with ``scipy.integrate.quad``. Sharp resonances near threshold
    are therefore resolved without a tabulated grid.
    """
    dm, dk, index = coupled_block(dm, dk, index)
    eig = np.linalg.eigvals(dm.m)
    if np.max(eig.real) >= 0:
        raise UnstableDrift(f"drift has max Re eig = {np.max(eig.real):.3e} >= 0")
    n = dm.m.shape[0]
    eye = np.eye(n)

    def integrand(w: float) -> float:
        gr = np.linalg.solve(w * eye - 1j * dm.m, dm.signature)
        return float((1j * (-gr[index] @ dk @ gr[index].conj())).real) / (2.0 * math.pi)

    cuts = sorted({float(-mu.imag + k * abs(mu.real)) for mu in eig for k in (-1.0, 0.0, 1.0)})
    edges = [-math.inf, *cuts, math.inf]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, _ = quad(integrand, lo, hi, epsabs=0.0, epsrel=rtol, limit=400)
        total += val
    return 0.5 * (total - 1.0)


def lyapunov_covariance(dm: DriftMatrix, dk: np.ndarray) -> np.ndarray:
    """Equal-time ``<{v_i, v_j^+}>`` from ``M C + C M^+ + S^{-1}(-i D^K)S^{-1} = 0``.

    Independent of the frequency integral: used as its oracle.
    """
    sinv = np.linalg.inv(dm.signature)
    noise = sinv @ (-1j * dk) @ sinv.conj().T
    return sla.solve_continuous_lyapunov(dm.m, -noise)


# --- low-frequency effective temperature -------------------------------------


def quadrature_projection(n: int, quadrature_index: int) -> np.ndarray:
    """Vector picking ``x_k = (v_2k + v_2k+1)/sqrt(2)`` out of a paired basis."""
    u = np.zeros(n)
    u[2 * quadrature_index] = u[2 * quadrature_index + 1] = 1.0 / math.sqrt(2.0)
    return u


def fluctuation_response_ratio(sample: GreenFunctionSample, quadrature_index: int = 0):
    """``chi(omega) = iG^K_xx / (-2 Im G^R_xx)``, equal to ``coth(omega/2T)`` in equilibrium."""
    u = quadrature_projection(sample.gr.shape[-1], quadrature_index)
    grx = np.einsum("i,wij,j->w", u, sample.gr, u)
    gkx = np.einsum("i,wij,j->w", u, sample.gk, u)
    with np.errstate(divide="ignore", invalid="ignore"):
        return (1j * gkx).real / (-2.0 * grx.imag)


def effective_temperature(sample: GreenFunctionSample, quadrature_index: int = 0,
                          window: tuple[float, float] | None = None,
                          residual_tol: float = 1e-3, min_points: int = 8) -> float:
    """Low-energy effective temperature ``T*`` of one quadrature.

    Fits ``omega chi(omega) = 2 T* + c omega^2`` by least squares on the
    positive frequencies inside ``window`` (default
    ``[1e-3, 1e-1] * min(kappa, |omega_c|)``).
    """
    lo, hi = window if window is not None else (1e-3 * sample.scale, 1e-1 * sample.scale)
    w = sample.omega_grid
    sel = (w >= lo) & (w <= hi)
    if sel.sum() < min_points:
        raise NonAnalyticWindow(f"only {sel.sum()} grid points inside window [{lo}, {hi}]")
    chi = fluctuation_response_ratio(sample, quadrature_index)[sel]
    x = w[sel]
    y = x * chi
    design = np.column_stack([np.ones_like(x), x * x])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    rel = float(np.sqrt(np.mean(resid**2)) / abs(coef[0]))
    if not np.all(np.isfinite(y)) or rel > residual_tol:
        raise NonAnalyticWindow(f"omega*chi is not analytic on the window (residual {rel:.2e})")
    return 0.5 * float(coef[0])


# --- thresholds by root finding ---------------------------------------------


def _params_at(params: ModelParams, lam: float, ratio: float | None) -> ModelParams:
    if ratio is None:
        return params.with_(lam=lam)
    return params.with_(lam=lam, lam_prime=ratio * lam)


def _indicator(builder, params, ratio, criterion):
    def f(lam):
        m = builder(_params_at(params, lam, ratio)).m
        if criterion == "eig":
            return float(np.max(np.linalg.eigvals(m).real))
        # conjugation pairing makes det M real
        return float(np.linalg.det(m).real)
    return f


def scan_bracket(builder: Callable[[ModelParams], DriftMatrix], params: ModelParams,
                 lam_max: float, steps: int = 400, criterion: str = "det",
                 ratio: float | None = None, lam_min: float | None = None) -> tuple[float, float]:
    """First sign change of the criterion on a uniform grid in ``lambda``."""
    f = _indicator(builder, params, ratio, criterion)
    lams = np.linspace(lam_min if lam_min is not None else lam_max / steps, lam_max, steps)
    prev = f(lams[0])
    for lo, hi in zip(lams[:-1], lams[1:]):
        cur = f(hi)
        if np.sign(cur) != np.sign(prev) and prev != 0:
            return float(lo), float(hi)
        prev = cur
    raise NoSignChange(f"no sign change of the {criterion} criterion for lambda <= {lam_max}")


def find_threshold_det(builder: Callable[[ModelParams], DriftMatrix], params: ModelParams,
                       bracket: tuple[float, float], criterion: str = "eig",
                       ratio: float | None = None, rtol: float = 1e-10,
                       method: Method = Method.CollectiveHP) -> ThresholdResult:
    """Bisect on ``max Re eig M(lambda)`` (or on ``det M``) inside ``bracket``.

    ``ratio`` fixes ``lambda' = ratio * lambda``; without it ``lam_prime`` of
    ``params`` is kept (``None`` follows ``lambda``).
    """
    if criterion not in ("eig", "det"):
        raise ValueError("criterion must be 'eig' or 'det'")
    f = _indicator(builder, params, ratio, criterion)
    lo, hi = map(float, bracket)
    flo, fhi = f(lo), f(hi)
    if criterion == "eig":
        ok = flo < 0 <= fhi
    else:
        ok = np.sign(flo) != np.sign(fhi)
    if not ok:
        raise NoSignChange(f"criterion does not change sign on [{lo}, {hi}]: {flo:.3e}, {fhi:.3e}")
    while hi - lo > rtol * abs(hi):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm < 0) if criterion == "eig" else (np.sign(fm) == np.sign(flo)):
            lo = mid
        else:
            hi = mid
    return ThresholdResult(0.5 * (lo + hi), method, True, {"criterion": criterion})


# --- classification ----------------------------------------------------------


class Instability(enum.Enum):
    Stable = "stable"
    Pitchfork = "pitchfork"
    Hopf = "hopf"


@dataclass(frozen=True)
class InstabilityReport:
    classification: Instability
    crossing_eigenvalues: tuple[complex, ...]
    crossing_frequency: float
    crossing_fraction: float = float("nan")


def classify_eigenvalues(eig: np.ndarray, norm: float, rel_tol: float = 1e-8) -> Instability:
    """Classify an unstable spectrum by its leading eigenvalue."""
    lead = eig[np.argmax(eig.real)]
    if lead.real < 0:
        return Instability.Stable
    return Instability.Pitchfork if abs(lead.imag) < rel_tol * norm else Instability.Hopf


def classify_instability(dm_below: DriftMatrix, dm_above: DriftMatrix,
                         rel_tol: float = 1e-8, steps: int = 60) -> InstabilityReport:
    """Locate where the spectrum crosses into the right half-plane and classify it.

    Drift matrices are affine in the couplings, so the straight line
    ``(1-t) M_below + t M_above`` is a straight path in parameter space; the
    crossing ``t`` is bisected and the eigenvalues there decide Pitchfork (a
    real eigenvalue through zero) versus Hopf (a complex pair through the
    imaginary axis).
    """
    mb, ma = dm_below.m, dm_above.m
    g = lambda t: np.linalg.eigvals((1 - t) * mb + t * ma)
    e0, e1 = g(0.0), g(1.0)
    if e0.real.max() >= 0 and e1.real.max() >= 0:
        raise BothUnstable("dm_below is not stable")
    if e0.real.max() < 0 and e1.real.max() < 0:
        raise BothStable("dm_above has no unstable eigenvalue")
    if e0.real.max() >= 0:
        mb, ma = ma, mb
    lo, hi = 0.0, 1.0
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if g(mid).real.max() < 0:
            lo = mid
        else:
            hi = mid
    m_star = (1 - hi) * mb + hi * ma
    eig = np.linalg.eigvals(m_star)
    norm = np.linalg.norm(m_star, 2)
    lead_re = eig.real.max()
    crossing = eig[np.abs(eig.real - lead_re) <= max(1e-7 * norm, 1e-12)]
    lead = crossing[np.argmax(np.abs(crossing.imag))] if len(crossing) else eig[np.argmax(eig.real)]
    if abs(lead.imag) < rel_tol * norm:
        cls, freq = Instability.Pitchfork, 0.0
    else:
        cls, freq = Instability.Hopf, float(abs(lead.imag))
    return InstabilityReport(cls, tuple(complex(c) for c in crossing), freq, hi)


# --- susceptibility sweep ---------------------------------------------------


@dataclass(frozen=True)
class SusceptibilitySweep:
    distance: np.ndarray  # lam_c - lam
    n_ph: np.ndarray
    fit: PowerLawFit


def keldysh_susceptibility(params: ModelParams, window: tuple[float, float] = (0.9, 0.999),
                           points: int = 12) -> SusceptibilitySweep:
    """Keldysh photon number below the collective threshold against ``lam_c - lam``.

    ``lam / lam_c`` is sampled so that the distances are log-spaced inside
    ``window``; the fitted slope is ``-gamma``.
    """
    lc = lambda_c_collective(params.omega_c, params.omega_z, params.kappa, params.gamma).lambda_c
    dist = lc * np.geomspace(1.0 - window[1], 1.0 - window[0], points)
    nph = np.array([photon_number(build_drift_hp(params.with_(lam=lc - d)), keldysh_noise(params))
                    for d in dist])
    return SusceptibilitySweep(dist, nph, fit_power_law(dist, nph))
