"""Model parameters, dissipator catalog and configuration-file parsing.

Conventions used everywhere in the package:

* spin operators are spin-1/2, ``sigma = tau / 2`` with ``tau`` the Pauli
  matrices, so ``<sigma_z>`` lies in ``[-1/2, 1/2]``;
* ``sigma_+ = sigma_x + i sigma_y = |up><down|``;
* every Lindblad term is ``rate * (2 L rho L^+ - {L^+ L, rho})`` so that
  ``<a>`` decays at exactly ``kappa``;
* collective atomic decay uses the jump operator ``S_- / sqrt(N)``, which maps
  onto ``gamma * D[b]`` for the Holstein-Primakoff boson;
* ``omega_c`` is the cavity frequency in the frame rotating at the pump
  frequency (i.e. the detuning ``omega_c - omega_p``); it may be negative.

All energies are dimensionless: pick a unit and express every field in it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Mapping

from .errors import (
    InvalidCoupling,
    InvalidTemperature,
    NegativeRate,
    NonPositiveAtomNumber,
    NonPositiveOmegaZ,
)

RATE_FIELDS = ("kappa", "gamma", "gamma_down", "gamma_phi", "gamma_up")

# external key -> dataclass attribute; ``lambda`` is a Python keyword
KEY_ALIASES = {"lambda": "lam", "lambda_prime": "lam_prime"}


@dataclass(frozen=True)
class ModelParams:
    """Couplings, frequencies and rates of the (generalized) Dicke model.

    ``lam`` multiplies the rotating terms ``a sigma_+ + a^+ sigma_-`` and
    ``lam_prime`` the counter-rotating ones, both with a ``1/sqrt(N)``
    prefactor. ``lam_prime=None`` means the plain Dicke model
    (``lam_prime == lam``); ``lam_prime=0`` is Tavis-Cummings.
    """

    omega_c: float = 1.0
    omega_z: float = 1.0
    lam: float = 0.0
    lam_prime: float | None = None
    kappa: float = 0.0
    gamma: float = 0.0
    gamma_down: float = 0.0
    gamma_phi: float = 0.0
    gamma_up: float = 0.0
    n_atoms: int = 10
    beta: float = math.inf

    @property
    def lam_p(self) -> float:
        """Counter-rotating coupling with the Dicke default resolved."""
        return self.lam if self.lam_prime is None else self.lam_prime

    @property
    def has_single_atom_channels(self) -> bool:
        return self.gamma_down > 0 or self.gamma_phi > 0 or self.gamma_up > 0

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)


class DissipatorKind(enum.Enum):
    CavityDecay = "a"
    CollectiveAtomDecay = "S-/sqrt(N)"
    SingleAtomDecay = "sigma-_j"
    SingleAtomDephasing = "sigmaz_j"
    SingleAtomPump = "sigma+_j"


@dataclass(frozen=True)
class DissipatorSpec:
    kind: DissipatorKind
    rate: float


_RATE_OF_KIND = {
    DissipatorKind.CavityDecay: "kappa",
    DissipatorKind.CollectiveAtomDecay: "gamma",
    DissipatorKind.SingleAtomDecay: "gamma_down",
    DissipatorKind.SingleAtomDephasing: "gamma_phi",
    DissipatorKind.SingleAtomPump: "gamma_up",
}


def dissipators(params: ModelParams) -> list[DissipatorSpec]:
    """The non-zero dissipation channels of ``params``."""
    out = []
    for kind, name in _RATE_OF_KIND.items():
        rate = getattr(params, name)
        if rate > 0:
            out.append(DissipatorSpec(kind, rate))
    return out


def validate(params: ModelParams) -> ModelParams:
    """Return ``params`` unchanged, or raise if an invariant is violated."""
    for name in RATE_FIELDS:
        if getattr(params, name) < 0:
            raise NegativeRate(f"{name} must be non-negative, got {getattr(params, name)}")
    if int(params.n_atoms) != params.n_atoms or params.n_atoms <= 0:
        raise NonPositiveAtomNumber(f"n_atoms must be a positive integer, got {params.n_atoms}")
    if not params.omega_z > 0:
        raise NonPositiveOmegaZ(f"omega_z must be positive, got {params.omega_z}")
    if params.lam < 0 or params.lam_p < 0:
        raise InvalidCoupling(f"couplings must be non-negative, got {params.lam}, {params.lam_p}")
    if not params.beta > 0:
        raise InvalidTemperature(f"beta must be positive (inf allowed), got {params.beta}")
    return params


def gamma_total(params: ModelParams) -> float:
    """Single-atom coherence loss ``gamma_phi + gamma_down``."""
    return params.gamma_phi + params.gamma_down


def transverse_rate(params: ModelParams) -> float:
    """Decay rate of ``<sigma_+>`` including the incoherent pump."""
    return params.gamma_phi + params.gamma_down + params.gamma_up


def steady_sz(params: ModelParams, default: float = -0.5) -> float:
    """Atomic inversion balancing pump and decay with the cavity empty.

    Without either channel the inversion is not relaxed; ``default``
    (the fully polarised state) is returned.
    """
    total = params.gamma_up + params.gamma_down
    if total == 0:
        return default
    return (params.gamma_up - params.gamma_down) / (2.0 * total)


# --- configuration files ---------------------------------------------------

_FIELD_TYPES = {f.name: f.type for f in fields(ModelParams)}


def _coerce(attr: str, raw: str | float | int | None):
    if raw is None:
        return None
    if attr == "n_atoms":
        value = float(raw)
        if value != int(value):
            raise NonPositiveAtomNumber(f"n_atoms must be an integer, got {raw}")
        return int(value)
    if attr == "lam_prime" and isinstance(raw, str) and raw.strip().lower() in ("", "none"):
        return None
    return float(raw)


def canonical_key(key: str) -> str:
    key = key.strip().replace("-", "_")
    key = KEY_ALIASES.get(key, key)
    if key not in _FIELD_TYPES:
        raise KeyError(f"unknown parameter {key!r}")
    return key


def parse_config(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def load_config(path: str | Path) -> dict[str, str]:
    return parse_config(Path(path).read_text(encoding="utf-8"))


def params_from_mapping(mapping: Mapping[str, object], base: ModelParams | None = None,
                        strict: bool = True) -> ModelParams:
    """Overlay ``mapping`` (external key names) onto ``base``.

    Keys that are not model fields raise ``KeyError`` when ``strict``,
    otherwise they are ignored (configuration files may carry run options).
    """
    base = base or ModelParams()
    changes = {}
    for key, raw in mapping.items():
        try:
            attr = canonical_key(key)
        except KeyError:
            if strict:
                raise
            continue
        changes[attr] = _coerce(attr, raw)
    return validate(replace(base, **changes))
