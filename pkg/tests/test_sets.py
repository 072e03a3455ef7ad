import json
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pluripot.sets import (
    MESH_C0, Kind, MeshTooLarge, SetDescriptor, boundary_points, build_mesh, contains,
    corner_sigma, dist_local_K, dist_to_boundary_K, horizontal_dist_K, k_corners, lobatto,
    parse_kind, s_prime, sample_inside, set_distance, vertical_dist_K,
)

P = SetDescriptor(Kind.PACMAN)
K = SetDescriptor(Kind.CONVEXK)
KP = SetDescriptor(Kind.CONVEXKPRIME)
QP = SetDescriptor(Kind.QUARTERPAIR)


def test_membership_examples():
    assert contains(QP, (0.5, 0.5))
    assert not contains(P, (1.5, 0.0))
    assert contains(P, (1.0, 0.0))
    # (1, 0.25) is the image of (1, 0.5) in P under (x, y) -> (x, y^2), so it lies in K
    assert contains(P, (1.0, 0.5))
    assert contains(K, (1.0, 0.25))
    assert not contains(K, (1.5, 0.1))  # below the lower parabola: 0.1 < 0.25


def test_membership_vectorized_and_edges():
    pts = np.array([[0.0, 0.0], [2.0, 0.0], [1.5, 0.5], [1.5, 0.4999], [0.0, 0.01]])
    assert contains(P, pts).tolist() == [True, False, True, False, False]
    assert contains(SetDescriptor(Kind.SIMPLEX), [[0, 0], [1, 0], [0, 1], [0.6, 0.6]]).tolist() == [True] * 3 + [False]
    assert contains(SetDescriptor(Kind.INTERVAL), [-1.0, 0.3, 1.0 + 1e-9]).tolist() == [True, True, False]
    assert contains(KP, (1.0, 0.0)) and not contains(KP, (0.5, 0.0))


def test_pacman_angle_validation():
    with pytest.raises(ValueError):
        SetDescriptor(Kind.PACMAN, alpha=math.pi)
    with pytest.raises(ValueError):
        SetDescriptor(Kind.PACMAN, alpha=0.0)
    narrow = SetDescriptor(Kind.PACMAN, alpha=math.pi / 3)
    assert contains(narrow, (1.5, 0.35)) and not contains(P, (1.5, 0.35))


def test_affine_validation_and_json_roundtrip():
    with pytest.raises(ValueError):
        SetDescriptor(Kind.SQUARE, matrix=((1, 2), (2, 4)))
    with pytest.raises(ValueError):
        SetDescriptor(Kind.INTERVAL, shift=(1, 0))
    sp = s_prime()
    obj = json.loads(sp.to_json())
    assert set(obj) == {"kind", "affine"}
    assert SetDescriptor.from_json(sp.to_json()) == sp
    pac = SetDescriptor.from_dict({"kind": "pacman", "alpha": 1.0})
    assert pac.to_dict() == {"kind": "pacman", "alpha": 1.0}
    assert SetDescriptor.from_dict({"kind": "disk"}).kind is Kind.REALDISK
    with pytest.raises(ValueError):
        SetDescriptor.from_dict({"alpha": 1})
    with pytest.raises(ValueError):
        parse_kind("hexagon")


def test_s_prime_geometry():
    sp = s_prime()
    # corner of S goes to (1, 0); the diagonal x1 = x2 of S goes to the vertical line
    assert np.allclose(sp.from_base(np.array([[0.0, 0.0]])), [[1.0, 0.0]])
    top = sp.from_base(np.array([[math.sqrt(0.5), math.sqrt(0.5)]]))
    assert np.allclose(top, [[1.0, 1.0]])
    # S' lies in the region between the parabolas after folding y -> y^2
    pts = sample_inside(sp, 2000, np.random.default_rng(1))
    folded = np.column_stack([pts[:, 0], pts[:, 1] ** 2])
    assert np.all(contains(KP, folded, tol=1e-10))


def test_k_corners():
    sc = corner_sigma()
    assert sc == pytest.approx(1 / math.sqrt(2), rel=1e-15)
    assert k_corners()[2] == pytest.approx((1 + 1 / math.sqrt(2), 0.5), rel=1e-14)
    with mpmath.workdps(40):
        assert abs(corner_sigma(mp=True) - 1 / mpmath.sqrt(2)) < mpmath.mpf(10) ** -38


def test_dist_examples():
    assert dist_to_boundary_K(0.5, 1e-6) == pytest.approx(1e-6, rel=1e-12)
    assert dist_to_boundary_K(1.0, 1e-4) == pytest.approx(1e-4, abs=1e-8)
    s = 1.01
    t = (2 * (s - 1)) ** 2
    ratio = dist_to_boundary_K(s, t) / (3 * (s - 1) ** 2)
    assert 0.2 <= ratio <= 5
    with pytest.raises(ValueError):
        dist_to_boundary_K(1.5, 0.1)


def test_dist_against_brute_force():
    rng = np.random.default_rng(11)
    pts = sample_inside(K, 200, rng)
    bpts, _ = boundary_points(K, 1e-5)
    for s, t in pts[:60]:
        brute = np.min(np.hypot(bpts[:, 0] - s, bpts[:, 1] - t))
        assert dist_to_boundary_K(s, t) == pytest.approx(brute, abs=2e-5)


def test_dist_mpmath_matches_float():
    with mpmath.workdps(40):
        for s, t in [(0.7, 0.2), (1.3, 0.3), (1.6, 0.45), (1.05, 0.01)]:
            a = dist_local_K(mpmath.mpf(s) - 1, mpmath.mpf(t))
            assert float(a) == pytest.approx(dist_to_boundary_K(s, t), rel=1e-10)
        # far below double precision next to the vertex: point (d, 4 d^2) has dist ~ 3 d^2
        d = mpmath.mpf(10) ** -15
        v = dist_local_K(d, 4 * d * d)
        assert abs(v / (3 * d * d) - 1) < mpmath.mpf(10) ** -20


def test_vertical_distance():
    assert vertical_dist_K(1.1, 0.02) == pytest.approx(0.01, abs=1e-15)
    assert vertical_dist_K(1.0, 1e-3) == 1e-3
    u = 0.01
    s, g = 1 + u, u * u
    assert vertical_dist_K(s, (u + g) ** 2) == pytest.approx(2 * u ** 3 + u ** 4, rel=1e-9)
    with pytest.raises(ValueError):
        vertical_dist_K(1.2, 0.01)
    with pytest.raises(ValueError):
        vertical_dist_K(0.5, 0.1)


@settings(max_examples=150, deadline=None)
@given(st.floats(1.0, 1.7), st.floats(0.0, 1.0))
def test_dist_below_vertical_and_horizontal(s, frac):
    lo, hi = (s - 1) ** 2, 2 * s - s * s
    if hi - lo < 1e-6:
        return
    t = lo + (hi - lo) * (0.001 + 0.998 * frac)
    d = dist_to_boundary_K(s, t)
    assert d <= vertical_dist_K(s, t) * (1 + 1e-12)
    assert d <= horizontal_dist_K(s, t) * (1 + 1e-12) + 1e-15


def test_dist_continuity_along_path():
    s = np.linspace(0.2, 1.6, 400)
    t = 0.5 * ((s - 1) ** 2 + 2 * s - s * s) + np.where(s < 1, -0.3 * (1 - s) ** 2, 0)
    t = np.maximum(t, 1e-3)
    d = np.array([dist_to_boundary_K(a, b) for a, b in zip(s, t)])
    step = np.hypot(np.diff(s), np.diff(t))
    assert np.all(np.abs(np.diff(d)) <= step + 1e-6)


def test_set_distance():
    disk = SetDescriptor(Kind.REALDISK)
    d = set_distance(disk, [[2.0, 0.0], [0.0, 0.0], [0.0, -3.0]])
    assert d == pytest.approx([1.0, 0.0, 2.0], abs=1e-6)
    assert set_distance(P, [[1.5, 0.0]])[0] == pytest.approx(0.5 / math.sqrt(2), abs=1e-6)


def test_lobatto():
    x = lobatto(5)
    assert x == pytest.approx([-1, -math.sqrt(0.5), 0, math.sqrt(0.5), 1], abs=1e-15)
    assert lobatto(1, 0, 2).tolist() == [1.0]


def test_mesh_examples():
    m = build_mesh(SetDescriptor(Kind.INTERVAL), 4)
    assert m.points.min() == -1.0 and m.points.max() == 1.0
    assert m.spacing <= MESH_C0 / 16
    m = build_mesh(SetDescriptor(Kind.SIMPLEX), 2)
    for v in [(0, 0), (1, 0), (0, 1)]:
        assert np.min(np.linalg.norm(m.points - v, axis=1)) < 1e-14
    m = build_mesh(QP, 4)
    assert np.all(m.points[:, 0] * m.points[:, 1] >= -1e-12)


@pytest.mark.parametrize("kind", [Kind.REALDISK, Kind.SQUARE, Kind.SIMPLEX, Kind.QUARTERPAIR,
                                  Kind.PACMAN, Kind.CONVEXK, Kind.CONVEXKPRIME])
@pytest.mark.parametrize("degree", [1, 3, 6])
def test_mesh_invariants(kind, degree):
    desc = SetDescriptor(kind)
    m = build_mesh(desc, degree)
    assert np.all(contains(desc, m.points))
    assert m.spacing <= MESH_C0 / degree ** 2
    again = build_mesh(desc, degree)
    assert np.array_equal(m.points, again.points)


def test_mesh_of_affine_image():
    sp = s_prime()
    m = build_mesh(sp, 4)
    assert np.all(contains(sp, m.points))


def test_mesh_k_is_fold_of_pacman():
    m = build_mesh(K, 4)
    # every point of the K mesh pulls back to P through (s, t) -> (s, sqrt t)
    back = np.column_stack([m.points[:, 0], np.sqrt(m.points[:, 1])])
    assert np.all(contains(P, back, tol=1e-10))


def test_mesh_cap():
    with pytest.raises(MeshTooLarge, match="try degree"):
        build_mesh(SetDescriptor(Kind.SQUARE), 40, cap=1000)
    with pytest.raises(ValueError):
        build_mesh(QP, 0)
