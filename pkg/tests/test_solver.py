import math

import numpy as np
import pytest

from kneadlab.errors import NoRoot, NotRealized
from kneadlab.families import make_family
from kneadlab.solver import (
    Relation,
    relation_residual,
    solve_2d_from_scan,
    solve_superstable_1d,
    solve_word,
    superstable_roots,
)
from scipy.optimize import brentq


def test_period_two_root_is_minus_one(quad):
    assert solve_superstable_1d(quad, 2, (-2.0, 0.0)) == -1.0


def test_period_three_matches_the_cubic(quad):
    ref = brentq(lambda c: c ** 3 + 2 * c ** 2 + c + 1, -2.0, -1.5, xtol=1e-15)
    assert abs(solve_superstable_1d(quad, 3, (-2.0, 0.0)) - ref) <= 1e-12


def test_sin_fixed_critical_value():
    assert solve_superstable_1d(make_family("sin"), 1, (0.1, 3.1)) == pytest.approx(math.pi / 2, abs=1e-12)


def test_words(quad):
    assert solve_word(quad, "0", (-2.0, 0.25)) == 0.0
    assert solve_word(quad, "-0", (-2.0, 0.25)) == pytest.approx(-1.0, abs=1e-12)
    assert solve_word(quad, "-+0", (-2.0, 0.25)) == pytest.approx(-1.754877666, abs=1e-9)


def test_word_outside_bracket(quad):
    with pytest.raises(NotRealized):
        solve_word(quad, "-+0", (-1.0, 0.25))


def test_no_root(quad):
    with pytest.raises(NoRoot):
        solve_superstable_1d(quad, 3, (-1.5, -1.2))


def test_minimal_periods_only(quad):
    roots = superstable_roots(quad, 4, (-2.0, 0.25))
    assert len(roots) == 2
    assert all(abs(r + 1.0) > 1e-6 for r in roots)


def test_chebyshev_is_second_kind(chebyshev):
    (rel,) = chebyshev.relations
    assert (rel.kind, rel.q, rel.l) == ("second", 3, 2)


def test_lorenz_pair_residual(lorenz_pair):
    res = relation_residual(lorenz_pair.family, lorenz_pair.params, (Relation(0, 2), Relation(1, 3)))
    assert np.abs(res).max() <= 1e-10
    assert [r.kind for r in lorenz_pair.relations] == ["first", "first"]


def test_arnold_superattracting_pair():
    fam = make_family("arnold")
    rels = (Relation(0, 1), Relation(1, 1))
    res = solve_2d_from_scan(fam, rels, [(0.0, 1.0), (0.2, 0.6)], n=30)
    assert res.residual <= 1e-9
    again = relation_residual(fam, res.params, rels)
    assert np.abs(again).max() <= max(1e-12, res.residual + 1e-12)


def test_marked_orbit_layout(airplane):
    assert airplane.nu == 1 and airplane.q(0) == 3
    assert airplane.points[0][-1].value == airplane.points[0][0].value
    assert airplane.word() == "-+0"
