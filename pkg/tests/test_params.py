import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dickelab.errors import (
    InvalidCoupling,
    InvalidTemperature,
    NegativeRate,
    NonPositiveAtomNumber,
    NonPositiveOmegaZ,
)
from dickelab.params import (
    DissipatorKind,
    ModelParams,
    canonical_key,
    dissipators,
    gamma_total,
    params_from_mapping,
    parse_config,
    steady_sz,
    transverse_rate,
    validate,
)

rates = st.floats(0.0, 5.0, allow_nan=False)


def test_lam_prime_defaults_to_lam():
    p = ModelParams(lam=0.7)
    assert p.lam_p == 0.7
    assert p.with_(lam_prime=0.0).lam_p == 0.0


@pytest.mark.parametrize("changes, exc", [
    ({"kappa": -0.1}, NegativeRate),
    ({"gamma_up": -1.0}, NegativeRate),
    ({"n_atoms": 0}, NonPositiveAtomNumber),
    ({"n_atoms": 2.5}, NonPositiveAtomNumber),
    ({"omega_z": 0.0}, NonPositiveOmegaZ),
    ({"lam": -0.2}, InvalidCoupling),
    ({"lam_prime": -0.2}, InvalidCoupling),
    ({"beta": 0.0}, InvalidTemperature),
])
def test_validate_rejects(changes, exc):
    with pytest.raises(exc):
        validate(ModelParams(**changes))


def test_negative_cavity_detuning_is_allowed():
    assert validate(ModelParams(omega_c=-1.0)).omega_c == -1.0


def test_dissipators_lists_nonzero_channels():
    kinds = [d.kind for d in dissipators(ModelParams(kappa=1.0, gamma_phi=0.2))]
    assert kinds == [DissipatorKind.CavityDecay, DissipatorKind.SingleAtomDephasing]


@given(rates, rates, rates)
def test_steady_sz_in_bloch_range(gdn, gup, gphi):
    p = ModelParams(gamma_down=gdn, gamma_up=gup, gamma_phi=gphi)
    s = steady_sz(p)
    assert -0.5 <= s <= 0.5
    if gdn + gup > 0:
        # pump and decay balance: g_up (1 - 2 s) = g_dn (1 + 2 s)
        assert math.isclose(gup * (1 - 2 * s), gdn * (1 + 2 * s), abs_tol=1e-12)


@given(rates, rates, rates)
def test_rate_sums(gdn, gup, gphi):
    p = ModelParams(gamma_down=gdn, gamma_up=gup, gamma_phi=gphi)
    assert gamma_total(p) == gphi + gdn
    assert transverse_rate(p) == pytest.approx(gphi + gdn + gup)


def test_aliases():
    assert canonical_key("lambda") == "lam"
    assert canonical_key("lambda-prime") == "lam_prime"
    with pytest.raises(KeyError):
        canonical_key("omega")


def test_parse_config_and_mapping():
    text = "# comment\nomega_c = 2\nlambda = 0.4  # rotating\nlambda_prime = none\nn_atoms = 8\n"
    p = params_from_mapping(parse_config(text))
    assert p == ModelParams(omega_c=2.0, lam=0.4, lam_prime=None, n_atoms=8)


def test_parse_config_rejects_bad_line():
    with pytest.raises(ValueError):
        parse_config("omega_c 2")


def test_mapping_strictness():
    with pytest.raises(KeyError):
        params_from_mapping({"foo": 1})
    assert params_from_mapping({"foo": 1, "kappa": 0.5}, strict=False).kappa == 0.5
