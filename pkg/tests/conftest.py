import numpy as np
import pytest

from kneadlab.families import LorenzAffine, make_family
from kneadlab.solver import Relation, marked_orbit, solve_2d_from_scan, solve_superstable_1d

PHI = (1 + 5 ** 0.5) / 2


@pytest.fixture(scope="session")
def quad():
    return make_family("quad")


@pytest.fixture(scope="session")
def airplane(quad):
    c = solve_superstable_1d(quad, 3, (-2.0, 0.0))
    return marked_orbit(quad, [c])


@pytest.fixture(scope="session")
def basilica(quad):
    return marked_orbit(quad, [-1.0])


@pytest.fixture(scope="session")
def chebyshev(quad):
    return marked_orbit(quad, [-2.0])


@pytest.fixture(scope="session")
def tent_phi():
    return marked_orbit(make_family("tent"), [PHI - 1.0])


@pytest.fixture(scope="session")
def lorenz_pair():
    fam = LorenzAffine()
    res = solve_2d_from_scan(fam, (Relation(0, 2), Relation(1, 3)), [(1.05, 2.0), (-0.9, 0.9)], n=60)
    return marked_orbit(fam, res.params)


def rand_disk(n, seed):
    rng = np.random.default_rng(seed)
    r = np.sqrt(rng.uniform(0, 1, n))
    return r * np.exp(2j * np.pi * rng.uniform(0, 1, n))
