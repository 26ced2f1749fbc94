import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dickelab import landau as ld
from dickelab.errors import GridTooNarrow, InsufficientPoints, UnderResolved


def test_equipartition_short_run():
    cfg = ld.LangevinConfig(stiffness=1.0, t_total=200.0, walkers=128, seed=3)
    res = ld.langevin_x2(cfg)
    assert res.mean_x2 == pytest.approx(1.0, abs=4 * res.stderr + 0.02)


def test_langevin_is_reproducible():
    cfg = ld.LangevinConfig(stiffness=0.5, t_total=20.0, walkers=8, seed=7)
    assert ld._run_langevin(cfg) == ld._run_langevin(cfg)
    assert ld._run_langevin(cfg) != ld._run_langevin(ld.LangevinConfig(stiffness=0.5, t_total=20.0,
                                                                        walkers=8, seed=8))


def test_noise_strength_is_fdt_value():
    assert ld.LangevinConfig(eta=0.7, temperature=2.0).f0 == pytest.approx(2.8)
    assert ld.LangevinConfig(noise_f0=5.0).f0 == 5.0


def test_underresolved_step():
    with pytest.raises(UnderResolved):
        ld.langevin_x2(ld.LangevinConfig(stiffness=100.0, dt=0.02))


@pytest.mark.parametrize("kwargs", [{"eta": 0.0}, {"dt": 0.0}, {"stiffness": -1.0}, {"stiffness": 0.0}])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        ld.LangevinConfig(**kwargs)


def test_zero_temperature_trajectory_decays():
    cfg = ld.LangevinConfig(temperature=0.0, stiffness=1.0, t_total=40.0)
    t, x = ld.langevin_trajectory(cfg, x0=1.0)
    assert abs(x[-1]) < 1e-6 and t[0] == 0.0


@given(st.floats(0.05, 5.0), st.floats(0.2, 5.0))
def test_boltzmann_harmonic_limit(k, temp):
    assert ld.boltzmann_x2(k, math.inf, temp) == pytest.approx(temp / k, rel=1e-9)


@given(st.floats(0.5, 1000.0), st.floats(0.2, 5.0))
def test_boltzmann_quartic_closed_form(n, temp):
    assert ld.boltzmann_x2(0.0, n, temp) == pytest.approx(ld.quartic_classical_x2(n, temp), rel=1e-9)


def test_boltzmann_rejects_flat_potential():
    with pytest.raises(ValueError):
        ld.boltzmann_x2(0.0, math.inf, 1.0)


def test_finite_size_needs_range():
    with pytest.raises(InsufficientPoints):
        ld.langevin_finite_size(ld.LangevinConfig(), [1, 2, 4])


@settings(max_examples=10)
@given(st.floats(0.05, 20.0))
def test_dvr_harmonic_is_exact(omega):
    assert ld.harmonic_x2(omega) == pytest.approx(1 / (2 * omega), rel=1e-10)


def test_dvr_box_too_narrow():
    with pytest.raises(GridTooNarrow):
        ld.ground_state_x2(lambda x: 0.5 * x * x, 2.0, 101)


def test_quartic_scaling():
    # p^2/2 + x^4/(4N): x -> N^{1/6} x maps every N onto N = 1
    x2, fit = ld.quartic_ground_state([1, 64])
    assert fit is None
    assert x2[1] / x2[0] == pytest.approx(64 ** (1 / 3), rel=1e-8)


def test_qpt_susceptibility_exponent():
    scan = ld.qpt_susceptibility(np.geomspace(1e-3, 1.0, 5))
    assert scan.fit.exponent == pytest.approx(-0.5, abs=1e-8)


@given(st.floats(0.0, 0.499))
def test_quadrature_closed_form(lam):
    assert ld.quadrature_x2_eq(lam) == pytest.approx(ld.quadrature_x2_closed_form(lam), rel=1e-12)


def test_quadrature_thermal_exceeds_zero_point():
    assert ld.quadrature_x2_eq(0.3, beta=2.0) > ld.quadrature_x2_eq(0.3)
    with pytest.raises(ValueError):
        ld.quadrature_x2_modes(0.6)


@given(st.floats(1e-4, 1.0), st.floats(0.1, 100.0))
def test_landau_minimum_closed_form(d, n):
    # -d x^2/2 + x^4/(4N) is minimised at x = sqrt(N d)
    assert ld.landau_minimum(d, n) == pytest.approx(math.sqrt(n * d), rel=1e-7)


def test_landau_order_exponent():
    assert ld.landau_order_exponent().exponent == pytest.approx(0.5, abs=1e-6)
