"""Closed-form critical couplings of the Dicke model and its variants."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import EmptyDisorder, InvalidParams, InvertedAtoms, NonPositiveFrequency


class Method(enum.Enum):
    EquilibriumMF = "mf"
    CollectiveHP = "hp"
    SingleAtomMB = "mb"
    GeneralizedDet = "gen"
    SelfEnergy = "selfenergy"


@dataclass(frozen=True)
class ThresholdResult:
    lambda_c: float | None
    method: Method
    exists: bool
    # every positive root for the generalized quartic, the scale factor for
    # disorder, ... ; never needed for the headline number
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.exists != (self.lambda_c is not None):
            raise ValueError("exists must be False exactly when lambda_c is None")


def _positive(**values):
    for name, v in values.items():
        if not v > 0:
            raise NonPositiveFrequency(f"{name} must be positive, got {v}")


def coth_half(beta: float, omega: float) -> float:
    """``coth(beta * omega / 2)``, safe for large or infinite ``beta``."""
    x = 0.5 * beta * omega
    if x > 20.0:
        # coth x = 1 + 2 e^{-2x} + O(e^{-4x})
        return 1.0 + 2.0 * math.exp(-2.0 * x)
    return 1.0 / math.tanh(x)


def equilibrium_sz(omega_z: float, beta: float) -> float:
    """Thermal ``<sigma_z>`` of a free spin-1/2: ``-tanh(beta omega_z / 2) / 2``."""
    if math.isinf(beta):
        return -0.5
    return -0.5 * math.tanh(0.5 * beta * omega_z)


def lambda_c_equilibrium(omega_c: float, omega_z: float, beta: float = math.inf) -> ThresholdResult:
    _positive(omega_c=omega_c, omega_z=omega_z, beta=beta)
    lc = 0.5 * math.sqrt(omega_c * omega_z * coth_half(beta, omega_z))
    return ThresholdResult(lc, Method.EquilibriumMF, True)


def lambda_c_collective(omega_c: float, omega_z: float, kappa: float = 0.0,
                        gamma: float = 0.0) -> ThresholdResult:
    _positive(omega_c=omega_c, omega_z=omega_z)
    lc = 0.5 * math.sqrt((omega_z**2 + gamma**2) * (omega_c**2 + kappa**2) / (omega_z * omega_c))
    return ThresholdResult(lc, Method.CollectiveHP, True)


def lambda_c_single_atom(omega_c: float, omega_z: float, kappa: float, gamma_t: float,
                         sz: float) -> ThresholdResult:
    """Threshold for atoms with inversion ``sz`` and coherence decay ``gamma_t``.

    Raises ``InvertedAtoms`` for ``sz >= 0``. A non-positive ``omega_c *
    omega_z`` leaves the radicand negative: no pitchfork, ``exists=False``.
    """
    if sz >= 0:
        raise InvertedAtoms(f"threshold requires sz < 0, got {sz}")
    prod = omega_c * omega_z
    if prod <= 0:
        return ThresholdResult(None, Method.SingleAtomMB, False, {"reason": "NonPositiveProduct"})
    lc = 0.5 * math.sqrt((omega_z**2 + gamma_t**2) * (omega_c**2 + kappa**2) / (-2.0 * sz * prod))
    return ThresholdResult(lc, Method.SingleAtomMB, True)


def generalized_roots(omega_c: float, omega_z: float, kappa: float, ratio: float) -> list[float]:
    """All positive ``lambda`` solving the generalized determinant condition.

    With ``lambda' = ratio * lambda`` and ``u = lambda^2`` the condition is the
    quadratic ``(1-r^2)^2 u^2 - 2 (1+r^2) w_c w_z u + (kappa^2+w_c^2) w_z^2 = 0``.
    """
    r2 = ratio * ratio
    a = (1.0 - r2) ** 2
    b = -2.0 * (1.0 + r2) * omega_c * omega_z
    c = (kappa**2 + omega_c**2) * omega_z**2
    if a == 0.0:
        us = [-c / b] if b != 0 else []
    else:
        disc = b * b - 4.0 * a * c
        # a double root (kappa = 0 Tavis-Cummings) sits exactly on disc = 0
        if disc < -1e-12 * b * b:
            return []
        sq = math.sqrt(max(disc, 0.0))
        # numerically stable pair
        q = -0.5 * (b + math.copysign(sq, b))
        us = [q / a, c / q] if q != 0 else [0.0]
    lams = sorted({math.sqrt(u) for u in us if u > 0})
    return lams


def lambda_c_generalized(omega_c: float, omega_z: float, kappa: float,
                         lambda_ratio: float) -> ThresholdResult:
    """Smallest positive root of the generalized Dicke determinant condition."""
    _positive(omega_c=omega_c, omega_z=omega_z)
    if lambda_ratio < 0:
        raise InvalidParams(f"lambda_ratio must be non-negative, got {lambda_ratio}")
    roots = generalized_roots(omega_c, omega_z, kappa, lambda_ratio)
    if not roots:
        return ThresholdResult(None, Method.GeneralizedDet, False, {"roots": []})
    return ThresholdResult(roots[0], Method.GeneralizedDet, True, {"roots": roots})


@dataclass(frozen=True)
class DisorderSpec:
    """Inhomogeneous couplings and splittings with optional weights.

    Couplings define the *shape* of the distribution; thresholds are reported
    for the root-mean-square coupling.
    """

    lambdas: tuple[float, ...]
    omega_zs: tuple[float, ...]
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if len(self.lambdas) == 0:
            raise EmptyDisorder("at least one sample is required")
        if len(self.lambdas) != len(self.omega_zs):
            raise InvalidParams("lambdas and omega_zs must have equal length")
        if self.weights is not None and len(self.weights) != len(self.lambdas):
            raise InvalidParams("weights must match the number of samples")
        if any(w <= 0 for w in self.omega_zs):
            raise NonPositiveFrequency("all omega_z samples must be positive")

    @classmethod
    def from_samples(cls, samples: Sequence[tuple[float, float]]) -> "DisorderSpec":
        if len(samples) == 0:
            raise EmptyDisorder("at least one sample is required")
        lams, wzs = zip(*samples)
        return cls(tuple(map(float, lams)), tuple(map(float, wzs)))

    @classmethod
    def homogeneous(cls, lam: float, omega_z: float) -> "DisorderSpec":
        return cls((float(lam),), (float(omega_z),))

    @classmethod
    def from_weight(cls, weight: Callable[[np.ndarray], np.ndarray], omega_min: float,
                    omega_max: float, lam: float = 1.0, order: int = 64) -> "DisorderSpec":
        """Gauss-Legendre discretisation of an analytic weight over ``omega_z``."""
        x, w = np.polynomial.legendre.leggauss(order)
        om = 0.5 * (omega_max - omega_min) * x + 0.5 * (omega_max + omega_min)
        wt = 0.5 * (omega_max - omega_min) * w * np.asarray(weight(om), dtype=float)
        keep = wt > 0
        return cls(tuple([float(lam)] * int(keep.sum())), tuple(om[keep]), tuple(wt[keep]))

    def normalized_weights(self) -> np.ndarray:
        w = np.ones(len(self.lambdas)) if self.weights is None else np.asarray(self.weights, float)
        return w / w.sum()

    def mean_lambda_sq(self) -> float:
        return float(np.dot(self.normalized_weights(), np.square(self.lambdas)))


def self_energy_zero(disorder: DisorderSpec, gamma_t: float, sz: float, scale: float = 1.0) -> float:
    """Static cavity self-energy ``Sigma(0) = < 4 lambda_j^2 sz w_j / (w_j^2 + gamma_t^2) >``."""
    lam = scale * np.asarray(disorder.lambdas)
    wz = np.asarray(disorder.omega_zs)
    terms = 4.0 * lam**2 * sz * wz / (wz**2 + gamma_t**2)
    return float(np.dot(disorder.normalized_weights(), terms))


def lambda_c_self_energy(disorder: DisorderSpec, omega_c: float, kappa: float, gamma_t: float,
                         sz: float) -> ThresholdResult:
    """Critical rms coupling from ``omega_c^2 + kappa^2 + 2 omega_c Sigma(0) = 0``.

    ``Sigma(0)`` is quadratic in an overall coupling scale ``s``, so the
    condition is solved in closed form for ``s``; the result is reported as
    the rms coupling ``s * sqrt(<lambda_j^2>)``.
    """
    if not isinstance(disorder, DisorderSpec):
        raise EmptyDisorder("a DisorderSpec is required")
    sigma1 = self_energy_zero(disorder, gamma_t, sz)
    s2 = -(omega_c**2 + kappa**2) / (2.0 * omega_c * sigma1) if sigma1 * omega_c != 0 else -1.0
    if s2 <= 0:
        return ThresholdResult(None, Method.SelfEnergy, False, {"sigma_per_scale2": sigma1})
    scale = math.sqrt(s2)
    lc = scale * math.sqrt(disorder.mean_lambda_sq())
    return ThresholdResult(lc, Method.SelfEnergy, True, {"scale": scale, "sigma_per_scale2": sigma1})


@dataclass(frozen=True)
class RabiFrequency:
    value: float
    exists: bool  # False once the normal-phase mode has gone soft (imaginary)


def rabi_effective_frequency(omega_c: float, omega_z: float, lam: float) -> RabiFrequency:
    """Soft photon mode after eliminating a single, very detuned spin."""
    _positive(omega_c=omega_c, omega_z=omega_z)
    sq = omega_c * (omega_c - 4.0 * lam**2 / omega_z)
    if sq < 0:
        return RabiFrequency(math.sqrt(-sq), False)
    return RabiFrequency(math.sqrt(sq), True)
