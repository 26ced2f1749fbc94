import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from dickelab import thresholds as th
from dickelab.errors import EmptyDisorder, InvalidParams, InvertedAtoms, NonPositiveFrequency

freq = st.floats(0.1, 5.0)
rate = st.floats(0.0, 3.0)


def test_equilibrium_zero_temperature():
    # lam_c = sqrt(w_c w_z) / 2
    assert th.lambda_c_equilibrium(1.0, 1.0).lambda_c == 0.5
    assert th.lambda_c_equilibrium(2.0, 0.5).lambda_c == 0.5


@given(freq, freq, st.floats(0.05, 50.0))
def test_equilibrium_grows_with_temperature(wc, wz, beta):
    hot = th.lambda_c_equilibrium(wc, wz, beta).lambda_c
    cold = th.lambda_c_equilibrium(wc, wz).lambda_c
    assert hot >= cold * (1 - 1e-12)


@given(freq, freq)
def test_collective_reduces_to_equilibrium(wc, wz):
    assert math.isclose(th.lambda_c_collective(wc, wz, 0.0, 0.0).lambda_c,
                        th.lambda_c_equilibrium(wc, wz).lambda_c, rel_tol=1e-14)


@given(freq, freq, rate, rate)
def test_single_atom_matches_collective_at_full_polarisation(wc, wz, kappa, g):
    a = th.lambda_c_single_atom(wc, wz, kappa, g, -0.5).lambda_c
    b = th.lambda_c_collective(wc, wz, kappa, g).lambda_c
    assert math.isclose(a, b, rel_tol=1e-13)


def test_single_atom_errors():
    with pytest.raises(InvertedAtoms):
        th.lambda_c_single_atom(1.0, 1.0, 0.5, 0.5, 0.1)
    res = th.lambda_c_single_atom(-1.0, 1.0, 0.5, 0.5, -0.3)
    assert not res.exists and res.lambda_c is None


@given(freq, freq, rate)
def test_generalized_dicke_limit(wc, wz, kappa):
    # ratio 1 is the plain Dicke model
    res = th.lambda_c_generalized(wc, wz, kappa, 1.0)
    assert math.isclose(res.lambda_c, th.lambda_c_collective(wc, wz, kappa).lambda_c, rel_tol=1e-12)


@given(freq, freq, st.floats(0.01, 3.0), st.floats(0.0, 3.0))
def test_generalized_roots_solve_the_quadratic(wc, wz, kappa, r):
    for lam in th.generalized_roots(wc, wz, kappa, r):
        u = lam * lam
        val = (1 - r * r) ** 2 * u * u - 2 * (1 + r * r) * wc * wz * u + (kappa**2 + wc**2) * wz**2
        scale = (1 + r * r) * wc * wz * u + (kappa**2 + wc**2) * wz**2
        assert abs(val) <= 1e-9 * scale


@given(freq, freq, st.floats(0.01, 3.0))
def test_tavis_cummings_has_no_threshold_with_loss(wc, wz, kappa):
    assert not th.lambda_c_generalized(wc, wz, kappa, 0.0).exists


def test_tavis_cummings_lossless_double_root():
    # kappa = 0: the quadratic has a double root at lam = sqrt(w_c w_z)
    res = th.lambda_c_generalized(1.0, 1.0, 0.0, 0.0)
    assert res.exists and math.isclose(res.lambda_c, 1.0, rel_tol=1e-12)


def test_generalized_rejects_negative_ratio():
    with pytest.raises(InvalidParams):
        th.lambda_c_generalized(1.0, 1.0, 0.5, -1.0)


@given(freq, freq, rate, rate, st.floats(-0.5, -0.01), st.floats(0.1, 2.0))
def test_self_energy_homogeneous_matches_single_atom(wc, wz, kappa, gt, sz, lam):
    dis = th.DisorderSpec.homogeneous(lam, wz)
    a = th.lambda_c_self_energy(dis, wc, kappa, gt, sz).lambda_c
    b = th.lambda_c_single_atom(wc, wz, kappa, gt, sz).lambda_c
    assert math.isclose(a, b, rel_tol=1e-12)


def test_self_energy_scale_invariance():
    base = th.DisorderSpec((0.3, 0.9, 1.4), (0.5, 1.0, 2.0), (1.0, 2.0, 0.5))
    scaled = th.DisorderSpec(tuple(3 * x for x in base.lambdas), base.omega_zs, base.weights)
    a = th.lambda_c_self_energy(base, 1.0, 0.5, 0.3, -0.4).lambda_c
    b = th.lambda_c_self_energy(scaled, 1.0, 0.5, 0.3, -0.4).lambda_c
    assert math.isclose(a, b, rel_tol=1e-13)


def test_self_energy_no_threshold_for_inverted_atoms():
    dis = th.DisorderSpec.homogeneous(1.0, 1.0)
    assert not th.lambda_c_self_energy(dis, 1.0, 0.5, 0.3, 0.2).exists


def test_from_weight_flat_distribution():
    # flat weight on [0.5, 1.5]: the static self-energy is an elementary integral
    dis = th.DisorderSpec.from_weight(lambda w: np.ones_like(w), 0.5, 1.5, lam=1.0)
    gt, sz = 0.4, -0.5
    exact = 4 * sz * 0.5 * math.log((1.5**2 + gt**2) / (0.5**2 + gt**2))
    assert math.isclose(th.self_energy_zero(dis, gt, sz), exact, rel_tol=1e-12)


def test_disorder_validation():
    with pytest.raises(EmptyDisorder):
        th.DisorderSpec.from_samples([])
    with pytest.raises(InvalidParams):
        th.DisorderSpec((1.0,), (1.0, 2.0))
    with pytest.raises(NonPositiveFrequency):
        th.DisorderSpec((1.0,), (0.0,))


@given(freq, freq, st.floats(0.0, 2.0))
def test_rabi_frequency_goes_soft_at_equilibrium_threshold(wc, wz, lam):
    res = th.rabi_effective_frequency(wc, wz, lam)
    lc = th.lambda_c_equilibrium(wc, wz).lambda_c
    assume(abs(lam - lc) > 1e-9)
    assert res.exists == (lam < lc)


def test_coth_half_large_argument():
    assert th.coth_half(math.inf, 1.0) == 1.0
    assert math.isclose(th.coth_half(30.0, 1.0), 1 / math.tanh(15.0), rel_tol=1e-15)
