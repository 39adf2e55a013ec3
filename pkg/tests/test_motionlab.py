import cmath
import math

import numpy as np
import pytest

from kneadlab.errors import GeometryFailed, HypothesisViolated
from kneadlab.families import PowerLaw, make_family
from kneadlab.motionlab import (
    MotionGrid,
    SectorParams,
    admissible_check,
    identity_motion,
    iterate_lifts,
    lift_derivative,
    lift_motion,
    make_motion,
    motion_from_json,
    motion_to_json,
    odd_constants,
    odd_motion,
    odd_orbit_data,
    R_residual,
    separation_check,
    theta_regular_check,
)
from kneadlab.transfer import build_A

ODD_C1 = -1.409283590176923


def test_zero_sigma_is_identity(basilica):
    m = make_motion(basilica, 0.0)
    assert np.all(m.values == m.base[:, None, None])


def test_motion_is_linear_in_lambda(basilica):
    m = make_motion(basilica, 0.01, seed=1)
    v = lift_derivative(m)
    lam = m.lambdas()
    assert np.allclose(m.values, m.base[:, None, None] + v[:, None, None] * lam[None])


def test_identity_lifts_to_identity(airplane):
    m = identity_motion(airplane)
    out = lift_motion(m, airplane)
    assert np.abs(out.values - out.base[:, None, None]).max() <= 1e-12


def test_lift_derivative_is_the_operator(airplane):
    m = make_motion(airplane, 0.01, seed=4)
    lhs = lift_derivative(lift_motion(m, airplane))
    rhs = build_A(airplane).matrix @ lift_derivative(m)
    assert np.abs(lhs - rhs).max() <= 1e-6


def test_decay_rate_on_basilica(basilica):
    d, rate = iterate_lifts(make_motion(basilica, 0.01, seed=2), basilica, 30)
    assert rate == pytest.approx(0.5, abs=0.05)


def test_grid_is_read_only(basilica):
    m = make_motion(basilica, 0.01)
    with pytest.raises(ValueError):
        m.values[0, 0, 0] = 1.0


def test_json_round_trip(basilica):
    m = make_motion(basilica, 0.01, seed=5, mode="complex")
    m2 = motion_from_json(motion_to_json(m))
    assert np.array_equal(m.values, m2.values)


def _rotated(m: MotionGrid, n: int, angle: float) -> MotionGrid:
    vals = m.values.copy()
    vals[n] = vals[n] * cmath.exp(1j * angle)
    return MotionGrid(m.points, m.base.copy(), m.radii.copy(), m.n_rays, vals)


def test_sector_offender_is_reported():
    from kneadlab.families import SidedPoint

    sec = SectorParams(0.05, 60.0)
    pts = [SidedPoint(0.0), SidedPoint(0.4), SidedPoint(0.9)]
    m = identity_motion(pts, r_max=0.1)
    assert theta_regular_check(m, sec)[0]
    bad = _rotated(m, 2, 5 * sec.theta / sec.ell)
    ok, marg = theta_regular_check(bad, sec)
    assert not ok and marg["A1"] < 0 and marg["A1_offender"] == 0.9


def test_odd_constants_ell_three():
    theta, R, margin = odd_constants(3)
    assert theta == pytest.approx(9 * math.pi / 52)
    assert abs(R_residual(R, 3)) <= 1e-13
    assert 2 * R * math.cos(theta / 9) > 2.61 and margin > 0


def test_odd_fixture_is_admissible():
    fam = PowerLaw(3, 3)
    data = odd_orbit_data(fam, [ODD_C1])
    assert data.q == 5
    ok, marg = admissible_check(identity_motion(data.point_set(), r_max=0.1), data)
    assert ok, marg
    ok, marg = admissible_check(odd_motion(data, 1e-3, seed=3), data)
    assert ok, marg


def test_a7_violation_is_flagged():
    fam = PowerLaw(3, 3)
    data = odd_orbit_data(fam, [ODD_C1])
    m = identity_motion(data.point_set(), r_max=0.1)
    vals = m.values.copy()
    n = max(range(len(m.points)), key=lambda i: abs(m.points[i].value))
    vals[n] = vals[n] * 2.0
    ok, marg = admissible_check(MotionGrid(m.points, m.base.copy(), m.radii.copy(), m.n_rays, vals), data)
    assert not ok and marg["A7"] < 0


def test_odd_hypotheses():
    with pytest.raises(HypothesisViolated):
        odd_orbit_data(PowerLaw(4, 4), [-1.0])


def test_flat_separation():
    ok, rep = separation_check(make_family("flat"))
    assert ok and 2 * rep["x0"] < rep["R"] < rep["b"]
    ok, _ = separation_check(make_family("lorenzflat"))
    assert ok


def test_separation_without_recipe():
    with pytest.raises(GeometryFailed):
        separation_check(make_family("sin"))
