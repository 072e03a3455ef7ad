import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pluripot.closed_forms import (
    CLOSED_FORMS, closed_form_for, density_formula, extremal_function, v_quarterpair,
    v_realdisk, v_simplex, v_square,
)
from pluripot.core import cpoint
from pluripot.sets import Kind, SetDescriptor, s_prime, sample_inside


def test_hand_values():
    # |1-4| + 4 + 0 = 7 for S at (2, 0)
    assert v_quarterpair(cpoint(2, 0, 0, 0)) == pytest.approx(0.5 * math.log(7 + 4 * math.sqrt(3)), rel=1e-15)
    assert v_simplex(cpoint(0, 0, 0, 0)) == 0.0
    assert v_square(cpoint(2, 0, 3, 0)) == pytest.approx(math.log(3 + 2 * math.sqrt(2)), rel=1e-15)
    # simplex at (2, 0): arccosh(2 + 0 + 1) = log(3 + 2 sqrt 2)
    assert v_simplex(cpoint(2, 0, 0, 0)) == pytest.approx(math.log(3 + 2 * math.sqrt(2)), rel=1e-15)
    # disk at (2, 0): (1/2) arccosh(4 + 3)
    assert v_realdisk(cpoint(2, 0, 0, 0)) == pytest.approx(0.5 * math.acosh(7), rel=1e-15)


def test_mpmath_oracle_complex_point():
    z1, z2 = mpmath.mpc(2, 1), mpmath.mpc(3, -2)
    arg = abs(1 - z1 ** 2 - z2 ** 2) + abs(z1 - z2) ** 2 + 2 * abs(z1 * z2)
    want = float(mpmath.acosh(arg) / 2)
    assert v_quarterpair(cpoint(2, 1, 3, -2)) == pytest.approx(want, rel=1e-14)


@pytest.mark.parametrize("name", list(CLOSED_FORMS))
def test_vanishes_on_set(name):
    cf = CLOSED_FORMS[name]
    pts = sample_inside(cf.desc, 500, np.random.default_rng(3))
    assert np.max(cf.value(pts + 0j)) <= 1e-12
    assert np.all(cf.vanishes_on(pts))


@pytest.mark.parametrize("name", list(CLOSED_FORMS))
def test_log_growth(name):
    cf = CLOSED_FORMS[name]
    rng = np.random.default_rng(5)
    d = rng.normal(size=(50, 2)) + 1j * rng.normal(size=(50, 2))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    R = 1e6
    diff = cf.value(R * d) - math.log(R)
    assert np.all(np.abs(diff) < 3.0)


def test_simplex_symmetry_under_coordinate_swap():
    rng = np.random.default_rng(0)
    z = rng.normal(size=(100, 2)) + 1j * rng.normal(size=(100, 2))
    assert np.allclose(v_simplex(z), v_simplex(z[:, ::-1]), atol=1e-14)


@settings(max_examples=100, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_disk_rotation_invariance(a, b, c, d):
    z = np.array([complex(a, b), complex(c, d)])
    th = 0.7
    R = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    assert v_realdisk(R @ z) == pytest.approx(float(v_realdisk(z)), abs=1e-9)


def test_density_values():
    assert density_formula(SetDescriptor(Kind.REALDISK), (0.0, 0.0)) == 1.0
    assert density_formula(SetDescriptor(Kind.SQUARE), (0.5, 0.0)) == pytest.approx(1 / math.sqrt(0.75))
    # (x1 + x2) / sqrt(x1 x2 (1 - x1^2 - x2^2)) at (0.3, 0.4): 0.7 / sqrt(0.12 * 0.75)
    assert density_formula(SetDescriptor(Kind.QUARTERPAIR), (0.3, 0.4)) == pytest.approx(0.7 / math.sqrt(0.09))


def test_density_errors():
    qp = SetDescriptor(Kind.QUARTERPAIR)
    with pytest.raises(ValueError):
        density_formula(qp, (0.5, 0.0))
    with pytest.raises(ValueError):
        density_formula(qp, (0.9, 0.9))
    with pytest.raises(ValueError):
        density_formula(SetDescriptor(Kind.REALDISK), (1.0, 0.0))
    with pytest.raises(ValueError):
        density_formula(SetDescriptor(Kind.PACMAN), (0.5, 0.0))
    with pytest.raises(ValueError):
        density_formula(s_prime(), (1.0, 0.5))


def test_closed_form_lookup():
    assert closed_form_for(SetDescriptor(Kind.SIMPLEX)).name == "simplex"
    assert closed_form_for(SetDescriptor(Kind.PACMAN)) is None
    assert closed_form_for(s_prime()) is None


def test_extremal_function_affine_image():
    sp = s_prime()
    V = extremal_function(sp)
    # (1, 0) + rotation of a point of S stays on S'
    inside = sp.from_base(np.array([[0.3, 0.4]]))
    assert V(inside.astype(complex))[0] == 0.0
    z = np.array([[0.2 + 0.5j, -1.0 + 0.1j]])
    assert V(z)[0] == pytest.approx(float(v_quarterpair(sp.to_base(z))[0]), rel=1e-15)
    assert extremal_function(SetDescriptor(Kind.CONVEXK)) is None
