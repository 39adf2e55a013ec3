import numpy as np
import pytest

from kneadlab.errors import WrongShape
from kneadlab.families import make_family
from kneadlab.solver import marked_orbit, solve_superstable_1d
from kneadlab.transversality import (
    D_rho,
    R_map,
    exceptional_values,
    fd_jacobian_R,
    fd_trans_identity,
    jacobian_R,
    positively_oriented,
    report,
    trans_sum,
)


def test_R_vanishes_at_the_base(basilica):
    defo = basilica.family.deformation(basilica.params)
    assert abs(R_map(basilica, defo, defo.base_w)[0]) == 0.0


def test_R_against_direct_iteration(basilica):
    defo = basilica.family.deformation(basilica.params)
    w = -1.0 + 0.01
    assert R_map(basilica, defo, np.array([w]))[0] == pytest.approx(w * w + w, abs=1e-15)


def test_trivial_period():
    o = marked_orbit(make_family("quad"), [0.0])
    assert trans_sum(o) == 1.0


def test_basilica_quotient(basilica):
    assert trans_sum(basilica) == 0.5
    ok, q = positively_oriented(basilica)
    assert ok and q == pytest.approx(0.5)
    assert jacobian_R(basilica, basilica.family.deformation(basilica.params))[0, 0] == pytest.approx(-1.0)


@pytest.mark.parametrize("q", [3, 4, 5])
def test_trans_sum_matches_finite_differences(quad, q):
    c = solve_superstable_1d(quad, q, (-2.0, 0.25))
    o = marked_orbit(quad, [c])
    assert fd_trans_identity(quad, c, q) == pytest.approx(trans_sum(o), rel=1e-6)


def test_chain_rule_jacobian_matches_fd(lorenz_pair):
    defo = lorenz_pair.family.deformation(lorenz_pair.params)
    J = jacobian_R(lorenz_pair, defo)
    assert np.abs(J - fd_jacobian_R(lorenz_pair, defo)).max() <= 1e-6


def test_D_at_zero_is_the_identity(lorenz_pair):
    defo = lorenz_pair.family.deformation(lorenz_pair.params)
    assert np.allclose(D_rho(lorenz_pair, defo, 0.0), np.eye(2))


def test_trans_sum_needs_one_first_kind_relation(chebyshev, lorenz_pair):
    with pytest.raises(WrongShape):
        trans_sum(chebyshev)
    with pytest.raises(WrongShape):
        trans_sum(lorenz_pair)


def test_exceptional_values_empty_cases(basilica, lorenz_pair):
    assert exceptional_values(basilica) == []
    assert exceptional_values(lorenz_pair) == []


def test_exceptional_values_shared_cycle():
    # two turning points land on the fixed point 0, whose slope is 1.5 s = 4
    fam = make_family("PiecewiseLinear", {"eps": 1, "nu": 4, "kappa": [1, 1, 1.5, 1, 1]})
    o = marked_orbit(fam, [0.0, -1.0, 1.0, 0.0])
    ex = exceptional_values(o)
    assert len(ex) == 1 and abs(ex[0] - 4.0) <= 1e-9


def test_sin_period_two():
    fam = make_family("sin")
    a = solve_superstable_1d(fam, 2, (1.6, 3.1))
    o = marked_orbit(fam, [a])
    assert trans_sum(o) > 0
    assert positively_oriented(o)[0]


def test_report_fields(airplane):
    rep = report(airplane)
    assert rep["verdict"] is True
    assert rep["quotient"] == pytest.approx(rep["trans_sum"])
