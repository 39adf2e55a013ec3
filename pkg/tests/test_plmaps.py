import math

import pytest

from kneadlab.errors import InvalidValueVector, ZeroDeterminant
from kneadlab.plmaps import (
    PLSpec,
    lorenz_orbit_identity,
    lorenz_R,
    partition,
    pl_ergodic,
    pl_from_values,
    pl_markov_matrix,
    tent_lorenz_entropy_bridge,
    tent_spec,
)
from kneadlab.solver import marked_orbit
from kneadlab.transversality import positively_oriented

PHI = (1 + 5 ** 0.5) / 2


def test_tent_reconstruction():
    sp = tent_spec(1.7)
    assert sp.s == pytest.approx(1.7) and sp.c[1] == pytest.approx(0.0)
    assert sp.slopes == pytest.approx((1.7, -1.7))
    for x in (-0.9, -0.2, 0.3, 0.8):
        assert sp(x) == pytest.approx(-1.7 * abs(x) + 0.7)


def test_degenerate_values():
    with pytest.raises(InvalidValueVector):
        pl_from_values(1, 2, (1, 1, 1), (0.5, 0.5))


def test_json_round_trip():
    sp = pl_from_values(1, 2, (1, 2, 1), (0.5, -0.5))
    assert PLSpec.from_json(sp.to_json()) == sp


def test_tent_phi_markov():
    sp = tent_spec(PHI)
    assert len(partition(sp)) == 4
    mk = pl_markov_matrix(sp)
    assert mk["residual"] <= 1e-12 and abs(mk["det"]) <= 1e-9
    assert pl_ergodic(sp)
    assert positively_oriented(marked_orbit(sp.family(), list(sp.v)))[0]


def test_full_tent():
    sp = tent_spec(2.0)
    assert partition(sp) == [(-1.0, 0.0), (0.0, 1.0)]
    assert pl_ergodic(sp)


def test_split_map_is_not_ergodic():
    sp = pl_from_values(1, 4, (1, 1, 1, 1, 1), (0, -1, 1, 0))
    assert not pl_ergodic(sp)
    with pytest.raises(ZeroDeterminant):
        positively_oriented(marked_orbit(sp.family(), list(sp.v)))


def test_bimodal_example():
    sp = pl_from_values(1, 2, (1, 1, 1), (0.5, -0.5))
    assert sp.s == pytest.approx(2.0)
    assert pl_ergodic(sp)
    assert abs(pl_markov_matrix(sp)["det"]) <= 1e-9


def test_lorenz_R(lorenz_pair):
    fam = lorenz_pair.family
    r = lorenz_R(fam, fam.deformation(lorenz_pair.params).base_w, lorenz_pair.params)
    assert abs(r["R"]).max() <= 1e-12
    assert r["positive"] and r["quotient"] == pytest.approx(positively_oriented(lorenz_pair)[1], rel=1e-6)


def test_entropy_bridge():
    assert tent_lorenz_entropy_bridge(2.0) == (math.log(2), math.log(2))
    assert tent_lorenz_entropy_bridge(PHI)[1] == pytest.approx(math.log(PHI))


@pytest.mark.parametrize("t", [1.3, 1.7, 2.0])
def test_lorenz_tent_orbits(t):
    for x in (0.1, -0.37, 0.77):
        a, b = lorenz_orbit_identity(t, x, 20)
        assert a == pytest.approx(b, abs=1e-9)
