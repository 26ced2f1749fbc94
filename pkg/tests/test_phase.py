import math

import numpy as np
import pytest

from dickelab.errors import InvalidAxisName
from dickelab.params import ModelParams
from dickelab.phase import (
    Axis,
    Phase,
    ScanSettings,
    classify_point,
    exponent_report,
    first_transition,
    phase_cut,
    phase_diagram,
    phases_present,
    resolve_axis,
)
from dickelab.thresholds import lambda_c_collective

BASE = ModelParams(omega_c=0.1, omega_z=1.0, lam=0.9, kappa=0.5)
HOLD = ScanSettings(hold_gamma_t=0.5)


def test_axis_values_and_names():
    assert np.allclose(Axis("lambda", 0, 1, 3).values(), [0, 0.5, 1])
    assert resolve_axis("lambda_prime") == "lam_prime"
    with pytest.raises(InvalidAxisName):
        resolve_axis("temperature")


def test_dicke_cut_crosses_at_collective_threshold():
    p = ModelParams(omega_c=1.0, omega_z=1.0, kappa=0.5)
    lc = lambda_c_collective(1.0, 1.0, 0.5).lambda_c
    cut = phase_cut(p, Axis("lambda", 0.0, 1.0, 101))
    onset = first_transition(cut)
    assert 0 <= onset - lc <= 0.01
    assert all(pt.phase is Phase.Normal for pt in cut if pt.coordinates[0] < lc)


def test_inversion_gives_regular_lasing():
    p = ModelParams(omega_c=1.0, omega_z=1.0, lam=1.0, lam_prime=0.0, kappa=0.5)
    phase, lead = classify_point(p, 0.4, 0.3)
    assert phase is Phase.RegularLasing and lead.real > 0


def test_counter_rotating_dominance_gives_counter_lasing():
    grid = phase_diagram(BASE, Axis("lambda_prime", 2.0, 4.0, 5), Axis("gamma_up", 0.0, 0.0, 1), HOLD)
    assert Phase.CounterLasing in phases_present(grid)
    assert all(pt.sz < 0 for pt in grid[0])


def test_grid_layout_and_worker_independence():
    ax, ay = Axis("lambda_prime", 0.0, 4.0, 5), Axis("gamma_up", 0.0, 0.5, 3)
    serial = phase_diagram(BASE, ax, ay, HOLD)
    parallel = phase_diagram(BASE, ax, ay, HOLD, workers=2)
    assert len(serial) == 3 and len(serial[0]) == 5
    assert serial[2][4].coordinates == (4.0, 0.5)
    assert [[p.phase for p in r] for r in serial] == [[p.phase for p in r] for r in parallel]


def test_hold_gamma_t_trades_decay_for_pump():
    grid = phase_diagram(BASE, Axis("lambda_prime", 0.0, 0.0, 1), Axis("gamma_up", 0.0, 0.5, 3), HOLD)
    szs = [row[0].sz for row in grid]
    assert szs == pytest.approx([-0.5, 0.0, 0.5])


def test_failed_points_are_recorded():
    grid = phase_diagram(BASE, Axis("kappa", -1.0, -1.0, 1), Axis("lambda", 0.5, 0.5, 1))
    pt = grid[0][0]
    assert pt.phase is Phase.Normal and "NegativeRate" in pt.error and math.isnan(pt.sz)


def test_tavis_cummings_never_superradiant():
    p = ModelParams(lam_prime=0.0, gamma_down=0.3)
    grid = phase_diagram(p, Axis("lambda", 0.0, 4.0, 21), Axis("kappa", 0.1, 2.0, 5))
    assert Phase.Superradiant not in phases_present(grid)


def test_exponent_reports():
    r = exponent_report("meanfield", ModelParams(), "beta")
    assert r.exponent == pytest.approx(0.5, abs=0.03) and r.n_points == 12
    r = exponent_report("landau", ModelParams(), "xi")
    assert r.exponent == pytest.approx(1 / 3, abs=0.01)
    r = exponent_report("keldysh", ModelParams(kappa=0.5), "susc", points=6)
    assert r.exponent == pytest.approx(1.0, abs=0.05)
    with pytest.raises(ValueError):
        exponent_report("keldysh", ModelParams(), "beta")
