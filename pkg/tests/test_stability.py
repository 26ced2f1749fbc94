import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dickelab import stability as s
from dickelab.errors import (
    BothStable,
    NonAnalyticWindow,
    SingleAtomChannelPresent,
    SingularAtFrequency,
    UnstableDrift,
)
from dickelab.params import ModelParams
from dickelab.thresholds import DisorderSpec, lambda_c_collective

# [DERIVED] Lyapunov covariance, cross-checked by the frequency integral
N_PH_REF = 0.06320224719101124  # omega_c = omega_z = 1, lam = 0.3, kappa = 0.5


def below_threshold(draw_frac, wc, wz, kappa, gamma):
    lc = lambda_c_collective(wc, wz, kappa, gamma).lambda_c
    return ModelParams(omega_c=wc, omega_z=wz, kappa=kappa, gamma=gamma, lam=draw_frac * lc)


stable_params = st.builds(below_threshold, st.floats(0.05, 0.95), st.floats(0.3, 3.0),
                          st.floats(0.3, 3.0), st.floats(0.1, 2.0), st.floats(0.0, 1.0))


def test_photon_number_reference():
    p = ModelParams(omega_c=1.0, omega_z=1.0, lam=0.3, kappa=0.5)
    dm, dk = s.build_drift_hp(p), s.keldysh_noise(p)
    cov = s.lyapunov_covariance(dm, dk)
    assert (cov[0, 0].real - 1) / 2 == pytest.approx(N_PH_REF, rel=1e-12)
    assert s.photon_number(dm, dk) == pytest.approx(N_PH_REF, rel=1e-7)


@settings(max_examples=10)
@given(stable_params)
def test_keldysh_integral_matches_lyapunov(p):
    dm, dk = s.build_drift_hp(p), s.keldysh_noise(p)
    cov = s.lyapunov_covariance(dm, dk)
    for idx in (0, 2):
        ref = (cov[idx, idx].real - 1) / 2
        # n = (I - 1)/2 with I ~ 1 near the vacuum, so compare the integral itself
        got = 2 * s.photon_number(dm, dk, idx) + 1
        assert got == pytest.approx(2 * ref + 1, rel=1e-8)


@settings(max_examples=10)
@given(stable_params)
def test_keldysh_is_antihermitian_and_positive(p):
    dm, dk = s.build_drift_hp(p), s.keldysh_noise(p)
    smp = s.keldysh_green(dm, dk, np.linspace(-5, 5, 41))
    igk = 1j * smp.gk
    assert np.allclose(igk, np.conj(np.swapaxes(igk, -1, -2)), atol=1e-12)
    assert np.all(np.linalg.eigvalsh(igk) > -1e-10)


def test_vacuum_cavity_is_empty():
    p = ModelParams(kappa=0.5)
    assert s.photon_number(s.build_drift_hp(p), s.keldysh_noise(p)) == pytest.approx(0.0, abs=1e-7)


def test_retarded_green_singular_on_lossless_resonance():
    dm = s.build_drift_hp(ModelParams(omega_c=1.0, omega_z=2.0))
    with pytest.raises(SingularAtFrequency):
        s.retarded_green(dm, [0.3, -1.0])


def test_keldysh_green_rejects_unstable_drift():
    p = ModelParams(kappa=0.5, lam=2.0)
    with pytest.raises(UnstableDrift):
        s.keldysh_green(s.build_drift_hp(p), s.keldysh_noise(p))


def test_hp_rejects_single_atom_channels():
    with pytest.raises(SingleAtomChannelPresent):
        s.build_drift_hp(ModelParams(gamma_phi=0.1))


@given(st.floats(0.1, 3.0), st.floats(0.1, 3.0), st.floats(0.0, 2.0), st.floats(0.0, 2.0),
       st.floats(0.0, 2.0), st.floats(0.0, 2.0))
def test_mb_at_full_polarisation_equals_hp(wc, wz, kappa, gamma, lam, lam_p):
    p = ModelParams(omega_c=wc, omega_z=wz, kappa=kappa, gamma=gamma, lam=lam, lam_prime=lam_p)
    assert np.allclose(s.build_drift_mb(p, -0.5).m, s.build_drift_hp(p).m, atol=1e-14)


@given(st.floats(0.1, 3.0), st.floats(0.1, 3.0), st.floats(0.0, 2.0), st.floats(0.0, 2.0),
       st.floats(-0.5, 0.5), st.floats(0.0, 2.0))
def test_single_species_disorder_equals_mb_for_dicke(wc, wz, kappa, gt, sz, lam):
    p = ModelParams(omega_c=wc, omega_z=wz, kappa=kappa, lam=lam)
    a = s.build_drift_disordered(p, DisorderSpec.homogeneous(lam, wz), sz, gt)
    b = s.build_drift_mb(p, sz, gt)
    assert np.allclose(a.m, b.m, atol=1e-14)


def test_mb_rejects_unphysical_inversion():
    with pytest.raises(ValueError):
        s.build_drift_mb(ModelParams(), 0.7)


def test_eig_and_det_thresholds_agree():
    p = ModelParams(omega_c=1.3, omega_z=0.7, kappa=0.4, gamma=0.2)
    lc = lambda_c_collective(1.3, 0.7, 0.4, 0.2).lambda_c
    br = s.scan_bracket(s.build_drift_hp, p, 3.0)
    a = s.find_threshold_det(s.build_drift_hp, p, br, criterion="eig").lambda_c
    b = s.find_threshold_det(s.build_drift_hp, p, br, criterion="det").lambda_c
    assert a == pytest.approx(lc, rel=1e-9)
    assert b == pytest.approx(lc, rel=1e-9)


def test_dicke_instability_is_pitchfork():
    p = ModelParams(omega_c=1.0, omega_z=1.0, kappa=0.5)
    lc = lambda_c_collective(1.0, 1.0, 0.5).lambda_c
    rep = s.classify_instability(s.build_drift_hp(p.with_(lam=0.5 * lc)),
                                 s.build_drift_hp(p.with_(lam=1.5 * lc)))
    assert rep.classification is s.Instability.Pitchfork
    assert rep.crossing_fraction * lc + 0.5 * lc == pytest.approx(lc, rel=1e-8)


def test_inverted_tavis_cummings_is_hopf():
    p = ModelParams(omega_c=1.0, omega_z=1.0, kappa=0.5, lam_prime=0.0)
    rep = s.classify_instability(s.build_drift_mb(p, 0.3, 0.2), s.build_drift_mb(p.with_(lam=2.0), 0.3, 0.2))
    assert rep.classification is s.Instability.Hopf
    assert rep.crossing_frequency > 0


def test_classify_needs_an_unstable_side():
    dm = s.build_drift_hp(ModelParams(kappa=0.5, lam=0.1))
    with pytest.raises(BothStable):
        s.classify_instability(dm, dm)


def test_coupled_block_drops_lossless_atoms():
    p = ModelParams(kappa=0.5)
    sub, dk, idx = s.coupled_block(s.build_drift_hp(p), s.keldysh_noise(p), 0)
    assert sub.m.shape == (1, 1) and idx == 0


@settings(max_examples=8)
@given(st.floats(0.3, 3.0), st.floats(0.3, 3.0), st.floats(0.1, 2.0), st.floats(0.05, 0.9))
def test_effective_temperature_closed_form(wc, wz, kappa, frac):
    # [DERIVED] T* = (w_c^2 + kappa^2) / (4 w_c), independent of lam below threshold
    lc = lambda_c_collective(wc, wz, kappa).lambda_c
    p = ModelParams(omega_c=wc, omega_z=wz, kappa=kappa, lam=frac * lc)
    smp = s.keldysh_green(s.build_drift_hp(p), s.keldysh_noise(p))
    assert s.effective_temperature(smp) == pytest.approx((wc**2 + kappa**2) / (4 * wc), rel=1e-6)


def test_effective_temperature_needs_grid_points():
    p = ModelParams(kappa=0.5, lam=0.2)
    smp = s.keldysh_green(s.build_drift_hp(p), s.keldysh_noise(p), np.linspace(-1, 1, 11))
    with pytest.raises(NonAnalyticWindow):
        s.effective_temperature(smp)


def test_fdt_ratio_is_coth_in_equilibrium():
    t = 0.8
    dm = s.build_drift_hp(ModelParams(kappa=0.5, lam=0.2))
    w = np.geomspace(1e-2, 3, 30)
    gr = s.retarded_green(dm, w)
    gk = (1 / np.tanh(w / (2 * t)))[:, None, None] * (gr - np.conj(np.swapaxes(gr, -1, -2)))
    smp = s.GreenFunctionSample(w, gr, gk, np.zeros((4, 4)))
    assert np.allclose(s.fluctuation_response_ratio(smp), 1 / np.tanh(w / (2 * t)), rtol=1e-10)


def test_quadrature_projection():
    u = s.quadrature_projection(4, 1)
    assert np.allclose(u, [0, 0, 1 / math.sqrt(2), 1 / math.sqrt(2)])
