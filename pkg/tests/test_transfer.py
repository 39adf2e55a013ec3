import numpy as np
import pytest

from kneadlab.errors import WrongShape
from kneadlab.transfer import (
    J_labels,
    build_A,
    build_AJ,
    char_identity_check,
    matrix_to_json,
    scaled_triple_check,
    spectrum,
)
from kneadlab.transversality import D_rho

from conftest import rand_disk


def test_diagonal_spectrum():
    ev, r = spectrum([[0.5, 0.0], [0.0, 0.0]])
    assert list(ev) == [0.5, 0.0] and r == 0.5
    assert spectrum([[0.5]])[1] == 0.5


def test_planted_spectrum():
    rng = np.random.default_rng(3)
    lam = np.array([0.9, -0.7, 0.5 + 0.2j, 0.5 - 0.2j, 0.3, -0.2, 0.1, 0.05])
    S = rng.normal(size=(8, 8))
    M = S @ np.diag(lam) @ np.linalg.inv(S)
    ev, r = spectrum(M)
    for z in lam:
        assert np.abs(ev - z).min() <= 1e-8
    assert r == pytest.approx(0.9, abs=1e-8)


def test_spectrum_rejects_rectangles():
    with pytest.raises(WrongShape):
        spectrum(np.zeros((2, 3)))


def test_rho_zero_gives_one(basilica):
    d = basilica.family.deformation(basilica.params)
    assert build_AJ(basilica, d).charpoly_det(0.0) == 1.0
    assert np.linalg.det(D_rho(basilica, d, 0.0)) == 1.0


@pytest.mark.parametrize("name", ["basilica", "airplane", "chebyshev", "tent_phi", "lorenz_pair"])
def test_characteristic_identity(name, request):
    orbit = request.getfixturevalue(name)
    out = char_identity_check(orbit, None, rand_disk(20, 7))
    assert out["max_dev_AJ"] <= 1e-10


def test_unit_circle_on_second_kind(chebyshev):
    rhos = np.exp(2j * np.pi * np.arange(24) / 24)
    assert char_identity_check(chebyshev, None, rhos)["max_dev_AJ"] <= 1e-9


def test_J_labels_skip_unmarked_zero(basilica, chebyshev):
    assert J_labels(basilica) == [(0, 0), (1, 0)]
    assert J_labels(chebyshev) == [(1, 0), (2, 0)]


def test_operator_on_gP_has_the_same_spectrum(airplane):
    A = build_A(airplane)
    AJ = build_AJ(airplane)
    assert not A.collisions
    assert np.allclose(np.sort_complex(A.eigenvalues), np.sort_complex(AJ.eigenvalues))


def test_quadratic_radius_below_one(airplane, basilica):
    assert build_A(airplane).spectral_radius <= 1 - 1e-6
    assert build_A(basilica).spectral_radius == pytest.approx(0.5)


@pytest.mark.parametrize("xi,scale", [(0.0, 1.0), (0.25, 4 / 3), (0.5, 2.0)])
def test_scaled_triples(airplane, xi, scale):
    assert scaled_triple_check(airplane, None, xi)
    base = build_A(airplane).matrix
    scaled = build_A(airplane, dg_scale=1 - xi, dp_scale=1 / (1 - xi)).matrix
    assert np.allclose(scaled, scale * base)


def test_json_export(tent_phi):
    js = matrix_to_json(build_A(tent_phi))
    assert len(js["labels"]) == len(js["matrix_re"])
    assert js["spectral_radius"] == pytest.approx(0.6180339887498949)
