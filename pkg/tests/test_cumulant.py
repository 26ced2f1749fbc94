import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dickelab import cumulant as cu
from dickelab.errors import CollectiveDecayNotSupported
from dickelab.params import ModelParams
from dickelab.stability import build_drift_hp, keldysh_noise, lyapunov_covariance

vectors = st.lists(st.floats(-1.0, 1.0), min_size=12, max_size=12).map(np.array)


def test_state_vector_round_trip():
    s = cu.MomentState(1.5, 0.1 - 0.2j, 0.3j, -0.1 + 0.4j, 0.01, 0.02, 0.2, -0.03, -0.4)
    assert cu.MomentState.from_vector(s.to_vector()) == s
    assert set(s.as_row()) == {"n_ph", "aa", "ax", "ay", "xx", "yy", "zz", "xy", "sz"}


def test_rejects_collective_decay():
    with pytest.raises(CollectiveDecayNotSupported):
        cu.cumulant_rhs(cu.GROUND, ModelParams(gamma=0.1))


def test_free_cavity_decay():
    # lam = 0: n(t) = n(0) exp(-2 kappa t)
    p = ModelParams(kappa=0.4, n_atoms=5)
    s0 = cu.MomentState(n_ph=2.0)
    traj = cu.integrate_cumulant(s0, p, 5.0, t_eval=np.linspace(0, 5, 11))
    assert np.allclose(traj.n_ph, 2.0 * np.exp(-0.8 * traj.t), rtol=1e-7)


def test_ground_state_is_stationary_without_coupling():
    p = ModelParams(kappa=0.5, gamma_down=0.2, gamma_phi=0.1)
    assert np.allclose(cu.cumulant_rhs(cu.GROUND, p).to_vector(), 0.0)


@given(vectors, st.floats(0.0, 2.0), st.floats(0.0, 2.0), st.floats(0.0, 1.0), st.integers(2, 1000))
def test_zz_minus_sz_squared_conserved_without_population_channels(v, lam, lam_p, gphi, n):
    p = ModelParams(lam=lam, lam_prime=lam_p, kappa=0.3, gamma_phi=gphi, n_atoms=n)
    d = cu.cumulant_rhs_vector(0.0, v, p)
    assert d[9] - 2 * v[11] * d[11] == pytest.approx(0.0, abs=1e-12)


@given(vectors, st.floats(0.0, 2.0), st.integers(2, 50))
def test_photon_equation_is_real_part_consistent(v, lam, n):
    # n' computed from A, X, Y must be real; the Dicke point has g_y = 0
    p = ModelParams(lam=lam, kappa=0.3, n_atoms=n)
    d = cu.cumulant_rhs_vector(0.0, v, p)
    gx = 2 * lam / np.sqrt(n)
    assert d[0] == pytest.approx(-0.6 * v[0] - 2 * n * gx * v[4], abs=1e-12)


@settings(max_examples=6)
@given(st.floats(0.3, 2.0), st.floats(0.3, 2.0), st.floats(0.2, 1.0), st.floats(0.05, 0.8))
def test_large_n_frozen_inversion_is_holstein_primakoff(wc, wz, kappa, frac):
    # with sz pinned at -1/2 and N -> infinity the closure is the quadratic HP theory
    lc = 0.5 * np.sqrt(wz * (wc**2 + kappa**2) / wc)
    p = ModelParams(omega_c=wc, omega_z=wz, kappa=kappa, lam=frac * lc, n_atoms=10**7)
    cov = lyapunov_covariance(build_drift_hp(p), keldysh_noise(p))
    ref = (cov[0, 0].real - 1) / 2
    got = cu.cumulant_fixed_point(p, freeze_sz=True).n_ph
    assert got == pytest.approx(ref, rel=1e-5, abs=1e-10)


@pytest.mark.parametrize("rates", [(0.0, 0.0), (0.1, 0.0), (0.1, 0.2), (0.0, 0.02)])
def test_fixed_point_is_physical(rates):
    p = ModelParams(omega_c=1.0, omega_z=1.0, kappa=0.5, lam=0.9, n_atoms=20,
                    gamma_down=rates[0], gamma_phi=rates[1])
    s = cu.cumulant_fixed_point(p)
    assert s.n_ph >= 0
    assert abs(s.sz) <= 0.5
    assert np.linalg.norm(cu.cumulant_rhs(s, p).to_vector()) < 1e-8 * max(1, s.n_ph)


def test_steady_state_curve_shapes():
    p = ModelParams(omega_c=1.0, omega_z=1.0, kappa=0.5, lam=0.9, gamma_down=0.1)
    curve = cu.cumulant_steady_state(p, [10, 100])
    assert curve.n_ph.shape == (2,) and len(curve.states) == 2
    assert np.allclose(curve.n_ph_per_atom, curve.n_ph / np.array([10, 100]))


def test_exact_comparison_small_system():
    p = ModelParams(omega_c=1.0, omega_z=1.0, kappa=0.5, lam=0.9, gamma_down=0.1)
    cmp_ = cu.compare_with_exact(p, [2, 3])
    assert cmp_.exact.shape == (2,)
    assert np.all(cmp_.rel_diff < 0.2)
