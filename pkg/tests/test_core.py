import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pluripot.core import as_cpoints, cpoint, dist_to_interval, green_interval, joukowski_h, log_h_real


def test_h_examples():
    assert joukowski_h(1.0) == pytest.approx(1.0, abs=1e-15)
    assert joukowski_h(1.25) == pytest.approx(2.0, abs=1e-15)
    assert abs(joukowski_h(0.0)) == pytest.approx(1.0, abs=1e-15)
    assert joukowski_h(2.0) == pytest.approx(2 + math.sqrt(3), rel=1e-15)


def test_green_examples():
    assert green_interval(0.3) == 0.0
    assert green_interval(2.0) == pytest.approx(1.3169578969248168, rel=1e-14)
    assert green_interval(1e6) == pytest.approx(math.log(2e6), abs=1e-6)


def test_green_asymptotic_difference_bounded():
    z = 1e4 * np.exp(1j * np.linspace(0, 2 * np.pi, 50))
    assert np.max(np.abs(green_interval(z) - np.log(np.abs(z)) - math.log(2))) < 1e-7


def test_random_identity_and_modulus():
    rng = np.random.default_rng(7)
    z = rng.uniform(-10, 10, 20000) + 1j * rng.uniform(-10, 10, 20000)
    z = z[(np.abs(z) <= 10) & (dist_to_interval(z) > 1e-3)][:10000]
    assert len(z) == 10000
    h = joukowski_h(z)
    assert np.max(np.abs(h + 1 / h - 2 * z)) <= 1e-12
    assert np.all(np.abs(h) > 1)


def test_branch_continuity_across_real_axis_outside_segment():
    x = np.linspace(1.5, 5, 20)
    up = joukowski_h(x + 1e-12j)
    down = joukowski_h(x - 1e-12j)
    assert np.max(np.abs(up - down)) < 1e-9
    # and continuity across the imaginary axis, where the principal branch jumps
    y = np.linspace(-3, 3, 21)
    assert np.max(np.abs(joukowski_h(1e-13 + 1j * y) - joukowski_h(-1e-13 + 1j * y))) < 1e-9


def test_segment_unit_modulus():
    x = np.linspace(-1, 1, 101)
    assert np.allclose(np.abs(joukowski_h(x)), 1.0, atol=1e-15)
    assert np.all(green_interval(x) == 0.0)


@settings(max_examples=200, deadline=None)
@given(st.floats(-10, 10), st.floats(-10, 10))
def test_symmetries(x, y):
    z = complex(x, y)
    if dist_to_interval(z) <= 1e-9:
        return  # at the segment both roots have modulus one; the tie is broken by convention
    assert abs(joukowski_h(z.conjugate()) - np.conj(joukowski_h(z))) <= 1e-12 * (1 + abs(z))
    assert abs(abs(joukowski_h(-z)) - abs(joukowski_h(z))) <= 1e-12 * (1 + abs(z))


@settings(max_examples=200, deadline=None)
@given(st.floats(1.0 + 1e-9, 1e6), st.floats(1e-6, 1e3))
def test_monotone_on_real_ray(a, d):
    b = a + d
    assert joukowski_h(b).real > joukowski_h(a).real


@settings(max_examples=200, deadline=None)
@given(st.floats(-50, 50), st.floats(-50, 50))
def test_green_nonnegative(x, y):
    assert green_interval(complex(x, y)) >= 0.0


def test_green_zero_iff_on_segment():
    assert green_interval(1.0 + 1e-9) > 0
    assert green_interval(0.5 + 1e-9j) > 0
    assert green_interval(0.5 + 1e-13j) == 0.0  # clamp next to the segment


def test_log_h_real_clamp():
    assert log_h_real(1.0) == 0.0
    assert log_h_real(1.0 + 1e-13) == 0.0
    assert log_h_real(7.0) == pytest.approx(math.log(7 + 4 * math.sqrt(3)), rel=1e-15)


def test_cpoint_and_validation():
    z = cpoint(1, 2, 3, 4)
    assert z.tolist() == [1 + 2j, 3 + 4j]
    with pytest.raises(ValueError):
        as_cpoints(np.zeros(3))
    with pytest.raises(ValueError):
        as_cpoints([np.nan, 0])
    with pytest.raises(ValueError):
        joukowski_h(np.inf)
