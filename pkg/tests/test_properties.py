"""Property checks over randomly drawn inputs."""

import math

import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from kneadlab.errors import InvalidValueVector
from kneadlab.families import make_family
from kneadlab.kneading import KneadingSequence, Order, kneading, mt_compare
from kneadlab.motionlab import in_D, in_S, schwarz_property
from kneadlab.plmaps import PLSpec, lorenz_orbit_identity, pl_from_values
from kneadlab.solver import marked_orbit
from kneadlab.transversality import fd_jacobian_R, jacobian_R

symbols = st.lists(st.sampled_from([-1, 0, 1]), min_size=1, max_size=12)
FLIP = {Order.LESS: Order.GREATER, Order.GREATER: Order.LESS, Order.EQUAL: Order.EQUAL,
        Order.UNDECIDED: Order.UNDECIDED}


@given(symbols, symbols)
def test_mt_order_is_antisymmetric(a, b):
    assert mt_compare(b, a) == FLIP[mt_compare(a, b)]


@given(symbols)
def test_mt_order_is_reflexive(a):
    assert mt_compare(a, a) == Order.EQUAL


@settings(max_examples=60, deadline=None)
@given(st.floats(-2.0, 0.25), st.floats(-2.0, 0.25))
def test_kneading_is_monotone_in_c(c1, c2):
    q = make_family("quad")
    lo, hi = sorted((c1, c2))
    assert mt_compare(kneading(q, [lo], 30), kneading(q, [hi], 30)) != Order.GREATER


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.sampled_from([1, -1]), st.data())
def test_pl_round_trip(nu, eps, data):
    kappa = data.draw(st.lists(st.floats(0.3, 3.0), min_size=nu + 1, max_size=nu + 1))
    v = data.draw(st.lists(st.floats(-0.95, 0.95), min_size=nu, max_size=nu))
    try:
        sp = pl_from_values(eps, nu, kappa, v)
    except InvalidValueVector:
        assume(False)
    assert PLSpec.from_json(sp.to_json()) == sp
    assert np.allclose(sp.extremal_values(), v, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.floats(1.05, 2.0), st.floats(-1.0, 1.0), st.integers(1, 12))
def test_lorenz_tent_orbit_identity(t, x, n):
    a, b = lorenz_orbit_identity(t, x, n)
    assert abs(a - b) <= 1e-12 * t ** n


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([-1.0, -1.7548776662466927, -1.3107026413368328, -1.9407998065294847]))
def test_fd_jacobian_agrees(c):
    o = marked_orbit(make_family("quad"), [c])
    d = o.family.deformation(o.params)
    assert np.abs(jacobian_R(o, d) - fd_jacobian_R(o, d)).max() <= 1e-5 * max(1, abs(jacobian_R(o, d)).max())


def test_schwarz_property_on_samples():
    rng = np.random.default_rng(11)
    theta = 0.3
    bad = 0
    n = 0
    while n < 10_000:
        # the lens D_theta hugs the segment (0, 1); sample a box around it
        z = complex(rng.uniform(0, 1), rng.uniform(-0.1, 0.1))
        if not in_D(z, theta):
            continue
        t = rng.uniform(0.05, 1.0)
        n += 1
        bad += not schwarz_property(z, t, theta)
    assert bad == 0


@given(st.floats(0.01, 1.5), st.floats(-math.pi, math.pi))
def test_sector_membership_is_symmetric(r, a):
    z = r * complex(math.cos(a), math.sin(a))
    assert in_S(z, 0.4) == in_S(z.conjugate(), 0.4)


def test_kneading_parse_round_trip():
    for w in ("-+0", "0", "-++-+0"):
        assert str(KneadingSequence.parse(w)) == w
