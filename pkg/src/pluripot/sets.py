"""Compact planar sets: descriptors, membership, distances and polynomial meshes.

The parabola-bounded convex set K lives in (s, t) coordinates. Its boundary
consists of the segment t = 0 (0 <= s <= 1), the lower parabola t = (s-1)^2 and
the upper parabola t = 2s - s^2. The distance routines for K work internally
in vertex-local coordinates sigma = s - 1 and accept either floats or mpmath
numbers, so that approach paths can be followed far closer to the vertex than
double precision allows.
"""

from __future__ import annotations

import enum
import functools
import json
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy.optimize import brentq
from scipy.spatial import cKDTree

TOL = 1e-12
MESH_C0 = 0.5
NODES_PER_DEGREE = 3
NODES_PER_DEGREE_1D = 4
MESH_CAP = 20_000


class Kind(str, enum.Enum):
    INTERVAL = "interval"
    REALDISK = "realdisk"
    SQUARE = "square"
    SIMPLEX = "simplex"
    QUARTERPAIR = "quarterpair"
    PACMAN = "pacman"
    CONVEXK = "convexk"
    CONVEXKPRIME = "convexkprime"


_ALIASES = {"disk": Kind.REALDISK, "e": Kind.REALDISK, "s": Kind.QUARTERPAIR,
            "k": Kind.CONVEXK, "kprime": Kind.CONVEXKPRIME}


def parse_kind(name: str) -> Kind:
    key = name.strip().lower().replace("_", "").replace("-", "")
    if key in _ALIASES:
        return _ALIASES[key]
    try:
        return Kind(key)
    except ValueError:
        raise ValueError(f"unknown set kind {name!r}") from None


@dataclass(frozen=True)
class SetDescriptor:
    """A model set, optionally moved by an invertible affine map x -> A x + b."""

    kind: Kind
    alpha: float = math.pi / 2
    matrix: tuple = ((1.0, 0.0), (0.0, 1.0))
    shift: tuple = (0.0, 0.0)

    def __post_init__(self):
        if not isinstance(self.kind, Kind):
            object.__setattr__(self, "kind", parse_kind(str(self.kind)))
        if self.kind is Kind.PACMAN and not (0.0 < self.alpha < math.pi):
            raise ValueError(f"pacman opening angle must lie in (0, pi), got {self.alpha}")
        A = np.asarray(self.matrix, dtype=float)
        if A.shape != (2, 2) or len(self.shift) != 2:
            raise ValueError("affine part must be a 2x2 matrix and a 2-vector")
        if abs(np.linalg.det(A)) <= 1e-12:
            raise ValueError("affine matrix is not invertible")
        object.__setattr__(self, "matrix", tuple(tuple(float(v) for v in row) for row in A))
        object.__setattr__(self, "shift", tuple(float(v) for v in self.shift))
        if self.kind is Kind.INTERVAL and not self.is_identity:
            raise ValueError("affine images of the interval are not supported")

    @property
    def is_identity(self) -> bool:
        return self.matrix == ((1.0, 0.0), (0.0, 1.0)) and self.shift == (0.0, 0.0)

    @property
    def dim(self) -> int:
        return 1 if self.kind is Kind.INTERVAL else 2

    def to_dict(self) -> dict:
        out = {"kind": self.kind.value}
        if self.kind is Kind.PACMAN:
            out["alpha"] = self.alpha
        if not self.is_identity:
            (a, b), (c, d) = self.matrix
            out["affine"] = [[a, b], [c, d], list(self.shift)]
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, obj: dict) -> "SetDescriptor":
        if not isinstance(obj, dict) or "kind" not in obj:
            raise ValueError("set descriptor needs a 'kind' field")
        kw = {"kind": parse_kind(str(obj["kind"]))}
        if obj.get("alpha") is not None:
            kw["alpha"] = float(obj["alpha"])
        if obj.get("affine") is not None:
            aff = obj["affine"]
            if len(aff) != 3 or any(len(row) != 2 for row in aff):
                raise ValueError("'affine' must be [[a,b],[c,d],[e,f]]")
            kw["matrix"] = (tuple(aff[0]), tuple(aff[1]))
            kw["shift"] = tuple(aff[2])
        return cls(**kw)

    @classmethod
    def from_json(cls, text: str) -> "SetDescriptor":
        return cls.from_dict(json.loads(text))

    def to_base(self, x: np.ndarray) -> np.ndarray:
        if self.is_identity:
            return x
        A = np.asarray(self.matrix)
        return (x - np.asarray(self.shift)) @ np.linalg.inv(A).T

    def from_base(self, x: np.ndarray) -> np.ndarray:
        if self.is_identity:
            return x
        return x @ np.asarray(self.matrix).T + np.asarray(self.shift)


def s_prime() -> SetDescriptor:
    """The two-quarter-disk set rotated by 45 degrees about its corner and moved to (1, 0)."""
    c = s = math.sqrt(0.5)
    return SetDescriptor(Kind.QUARTERPAIR, matrix=((c, -s), (s, c)), shift=(1.0, 0.0))


def _wedge_slope(alpha: float) -> float:
    return 1.0 if alpha == math.pi / 2 else math.tan(alpha / 2)


def contains(desc: SetDescriptor, x, tol: float = TOL):
    """Membership predicate from the defining inequalities, vectorized over points."""
    x = np.asarray(x, dtype=float)
    if desc.kind is Kind.INTERVAL:
        if x.ndim >= 1 and x.shape[-1] == 1:
            x = x[..., 0]
        out = np.abs(x) <= 1.0 + tol
        return out[()] if np.ndim(out) == 0 else out
    p = desc.to_base(x)
    a, b = p[..., 0], p[..., 1]
    k = desc.kind
    if k is Kind.REALDISK:
        out = a * a + b * b <= 1.0 + tol
    elif k is Kind.SQUARE:
        out = np.maximum(np.abs(a), np.abs(b)) <= 1.0 + tol
    elif k is Kind.SIMPLEX:
        out = (a >= -tol) & (b >= -tol) & (a + b <= 1.0 + tol)
    elif k is Kind.QUARTERPAIR:
        out = (a * a + b * b <= 1.0 + tol) & (a * b >= -tol)
    elif k is Kind.PACMAN:
        slope = _wedge_slope(desc.alpha)
        in_disk = (a - 1.0) ** 2 + b * b <= 1.0 + tol
        in_wedge = (a - 1.0 > tol) & (np.abs(b) < slope * (a - 1.0) - tol)
        out = in_disk & ~in_wedge
    elif k is Kind.CONVEXK:
        out = ((b >= -tol) & (b <= 2 * a - a * a + tol)
               & ((a <= 1.0 + tol) | (b >= (a - 1.0) ** 2 - tol)))
    elif k is Kind.CONVEXKPRIME:
        out = (b >= (a - 1.0) ** 2 - tol) & (b <= 2 * a - a * a + tol)
    else:  # pragma: no cover
        raise ValueError(k)
    return out[()] if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# geometry of K in vertex-local coordinates (sigma, t) = (s - 1, t)
# ---------------------------------------------------------------------------

def _is_mp(*xs) -> bool:
    return any(isinstance(v, mpmath.mpf) for v in xs)


@functools.lru_cache(maxsize=None)
def _corner_sigma_float() -> float:
    # the two parabolas t = sigma^2 and t = 1 - sigma^2 meet at sigma_c > 0
    return brentq(lambda u: u * u - (1.0 - u * u), 0.0, 1.0, xtol=1e-16, rtol=1e-15)


@functools.lru_cache(maxsize=None)
def _corner_sigma_mp(dps: int):
    with mpmath.workdps(dps):
        return mpmath.findroot(lambda u: u * u - (1 - u * u), mpmath.mpf("0.7"))


def corner_sigma(mp: bool = False):
    """Offset from s = 1 of the corner where the two parabolic arcs of K meet."""
    return _corner_sigma_mp(mpmath.mp.dps) if mp else _corner_sigma_float()


def k_corners() -> list[tuple[float, float]]:
    """Corner points of K, found as intersections of its boundary arcs."""
    sc = corner_sigma()
    s0 = brentq(lambda s: 2 * s - s * s, -0.5, 0.5)  # upper arc meets t = 0
    return [(s0, 0.0), (1.0, 0.0), (1.0 + sc, sc * sc)]


def _k_violation(sigma, t):
    """How far (sigma, t) lies outside K; <= 0 inside."""
    v = max(-t, t - (1 - sigma * sigma))
    if sigma > 0:
        v = max(v, sigma * sigma - t)
    return v


def _dist_segment(sigma0, t0, sqrt):
    sp = min(max(sigma0, -1), 0)
    return sqrt((sigma0 - sp) ** 2 + t0 * t0)


def _dist_parabola(sigma0, t0, a, b, lo, hi, sqrt, eps):
    """Distance from (sigma0, t0) to the arc t = a*sigma^2 + b, lo <= sigma <= hi.

    Critical points of the squared distance come from a safeguarded Newton
    iteration seeded at five points of the arc; endpoints are always tested.
    """
    def d(u):
        return sqrt((u - sigma0) ** 2 + (a * u * u + b - t0) ** 2)

    best = min(d(lo), d(hi))
    for i in range(5):
        u = lo + (hi - lo) * i / 4
        for _ in range(200):
            f = a * u * u + b - t0
            fp = 2 * a * u
            g = (u - sigma0) + f * fp
            gp = 1 + fp * fp + 2 * a * f
            if gp <= 0:
                # concave stretch: move downhill instead of toward a maximum
                nxt = hi if g < 0 else lo
            else:
                nxt = u - g / gp
            nxt = min(max(nxt, lo), hi)
            step = abs(nxt - u)
            u = nxt
            if step <= 4 * eps * (abs(u) + abs(sigma0) + abs(t0)):
                break
        best = min(best, d(u))
    return best


def dist_local_K(sigma, t):
    """Distance to the boundary of K from (s, t) = (1 + sigma, t)."""
    mp = _is_mp(sigma, t)
    if mp:
        sigma, t = mpmath.mpf(sigma), mpmath.mpf(t)
        sqrt, eps, tol = mpmath.sqrt, mpmath.mp.eps, 16 * mpmath.mp.eps
    else:
        sigma, t = float(sigma), float(t)
        sqrt, eps, tol = math.sqrt, 2.0 ** -52, TOL
    if _k_violation(sigma, t) > tol:
        raise ValueError(f"point (s-1, t) = ({float(sigma)!r}, {float(t)!r}) lies outside K")
    sc = corner_sigma(mp)
    return min(
        _dist_segment(sigma, t, sqrt),
        _dist_parabola(sigma, t, 1, 0, 0, sc, sqrt, eps),
        _dist_parabola(sigma, t, -1, 1, -1, sc, sqrt, eps),
    )


def dist_to_boundary_K(s, t):
    """Euclidean distance from an interior point (s, t) of K to its boundary."""
    return dist_local_K(s - 1, t)


def vertical_dist_K(s, t):
    """Height of (s, t) above the lower parabola, t - (s-1)^2, for s >= 1."""
    if s < 1:
        raise ValueError("vertical distance to the lower arc needs s >= 1")
    v = t - (s - 1) ** 2
    if v <= 0:
        raise ValueError(f"point ({s!r}, {t!r}) is not above the lower parabola")
    return v


def horizontal_dist_K(s, t):
    """Distance from (s, t) to the boundary of K along the line of constant t."""
    sqrt = mpmath.sqrt if _is_mp(s, t) else math.sqrt
    sigma = s - 1
    sc = corner_sigma(_is_mp(s, t))
    cands = []
    if 0 <= t <= sc * sc:
        cands.append(abs(sqrt(t) - sigma))
    if 0 <= t <= 1:
        r = sqrt(1 - t)
        cands.extend(abs(u - sigma) for u in (r, -r) if -1 <= u <= sc)
    if t == 0:
        cands.append(abs(min(max(sigma, -1), 0) - sigma))
    if not cands:
        raise ValueError("point lies outside K")
    return min(cands)


# ---------------------------------------------------------------------------
# boundaries
# ---------------------------------------------------------------------------

def _segment(p, q):
    p, q = np.asarray(p, float), np.asarray(q, float)
    return lambda tau: p + np.outer(tau, q - p)


def _arc(center, radius, th0, th1):
    c = np.asarray(center, float)

    def curve(tau):
        th = th0 + (th1 - th0) * tau
        return c + radius * np.column_stack([np.cos(th), np.sin(th)])
    return curve


def _graph(f, s0, s1):
    return lambda tau: np.column_stack([s0 + (s1 - s0) * tau, f(s0 + (s1 - s0) * tau)])


def boundary_pieces(kind: Kind, alpha: float = math.pi / 2) -> list:
    """Parametrized boundary arcs (tau in [0, 1]) of a base set."""
    if kind is Kind.REALDISK:
        return [_arc((0, 0), 1.0, 0.0, 2 * math.pi)]
    if kind is Kind.SQUARE:
        c = [(-1, -1), (1, -1), (1, 1), (-1, 1)]
        return [_segment(c[i], c[(i + 1) % 4]) for i in range(4)]
    if kind is Kind.SIMPLEX:
        c = [(0, 0), (1, 0), (0, 1)]
        return [_segment(c[i], c[(i + 1) % 3]) for i in range(3)]
    if kind is Kind.QUARTERPAIR:
        return [_arc((0, 0), 1.0, 0.0, math.pi / 2), _arc((0, 0), 1.0, math.pi, 1.5 * math.pi),
                _segment((-1, 0), (1, 0)), _segment((0, -1), (0, 1))]
    if kind is Kind.PACMAN:
        h = alpha / 2
        tip = (1 + math.cos(h), math.sin(h))
        return [_arc((1, 0), 1.0, h, 2 * math.pi - h),
                _segment((1, 0), tip), _segment((1, 0), (tip[0], -tip[1]))]
    sc = corner_sigma()
    if kind is Kind.CONVEXK:
        return [_segment((0, 0), (1, 0)),
                _graph(lambda s: (s - 1) ** 2, 1.0, 1.0 + sc),
                _graph(lambda s: 2 * s - s * s, 0.0, 1.0 + sc)]
    if kind is Kind.CONVEXKPRIME:
        return [_graph(lambda s: (s - 1) ** 2, 1.0 - sc, 1.0 + sc),
                _graph(lambda s: 2 * s - s * s, 1.0 - sc, 1.0 + sc)]
    raise ValueError(f"no planar boundary for {kind}")


def _sample_curve(curve, spacing: float) -> tuple[np.ndarray, float]:
    """Points along a curve at (near) uniform arclength, and the largest chord."""
    tau = np.linspace(0.0, 1.0, 4001)
    pts = curve(tau)
    seg = np.hypot(*np.diff(pts, axis=0).T)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    n = max(2, int(math.ceil(cum[-1] / spacing)) + 1)
    while True:
        out = curve(np.interp(np.linspace(0.0, cum[-1], n), cum, tau))
        gap = float(np.max(np.hypot(*np.diff(out, axis=0).T)))
        if gap <= spacing:
            return out, gap
        n += 1


def boundary_points(desc: SetDescriptor, spacing: float) -> tuple[np.ndarray, float]:
    scale = float(np.linalg.norm(np.asarray(desc.matrix), 2))
    chunks, gap = [], 0.0
    for piece in boundary_pieces(desc.kind, desc.alpha):
        pts, g = _sample_curve(piece, spacing / scale)
        chunks.append(pts)
        gap = max(gap, g * scale)
    return desc.from_base(np.vstack(chunks)), gap


def set_distance(desc: SetDescriptor, x, spacing: float = 2e-4) -> np.ndarray:
    """Distance from real points to the set (0 inside), via a dense boundary polyline.

    Accurate to half the polyline spacing.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if desc.kind is Kind.INTERVAL:
        return np.maximum(np.abs(x[:, 0]) - 1.0, 0.0)
    out = np.zeros(len(x))
    outside = ~contains(desc, x)
    if not np.any(outside):
        return out
    q = x[outside]
    scale = float(np.linalg.norm(np.asarray(desc.matrix), 2))
    a, b = [], []
    for piece in boundary_pieces(desc.kind, desc.alpha):
        poly = desc.from_base(_sample_curve(piece, spacing / scale)[0])
        a.append(poly[:-1])
        b.append(poly[1:])
    a, b = np.vstack(a), np.vstack(b)
    # the nearest segment is among those whose midpoints are nearest
    _, idx = cKDTree(0.5 * (a + b)).query(q, k=min(8, len(a)))
    sa, ab = a[idx], (b - a)[idx]
    w = np.clip(np.sum((q[:, None, :] - sa) * ab, axis=-1) / np.sum(ab * ab, axis=-1), 0.0, 1.0)
    d = np.linalg.norm(q[:, None, :] - sa - w[..., None] * ab, axis=-1)
    best = d.min(axis=1)
    out[outside] = best
    return out


def bounding_box(desc: SetDescriptor) -> tuple[np.ndarray, np.ndarray]:
    if desc.kind is Kind.INTERVAL:
        return np.array([-1.0]), np.array([1.0])
    pts, _ = boundary_points(desc, 1e-2)
    return pts.min(axis=0), pts.max(axis=0)


def sample_inside(desc: SetDescriptor, n: int, rng: np.random.Generator) -> np.ndarray:
    """n points drawn uniformly from the set by rejection from its bounding box."""
    lo, hi = bounding_box(desc)
    out, have = [], 0
    while have < n:
        cand = rng.uniform(lo, hi, size=(4 * n, len(lo)))
        if desc.kind is Kind.INTERVAL:
            cand = cand[:, 0]
        keep = cand[contains(desc, cand, tol=0.0)]
        out.append(keep)
        have += len(keep)
    return np.concatenate(out)[:n]


# ---------------------------------------------------------------------------
# meshes
# ---------------------------------------------------------------------------

class MeshTooLarge(ValueError):
    pass


@dataclass
class Mesh:
    """Finite point set on which sup norms of polynomials are enforced.

    ``spacing`` is the largest gap between consecutive boundary samples; the
    interior is covered by Chebyshev-Lobatto/arcsine clustered nodes.
    """

    points: np.ndarray
    degree_hint: int
    spacing: float
    desc: SetDescriptor = field(repr=False, default=None)

    def __len__(self) -> int:
        return len(self.points)


def lobatto(n: int, a: float = -1.0, b: float = 1.0) -> np.ndarray:
    """n Chebyshev-Lobatto nodes on [a, b], increasing."""
    if n == 1:
        return np.array([(a + b) / 2])
    x = -np.cos(np.pi * np.arange(n) / (n - 1))
    x[np.abs(x) < 1e-15] = 0.0
    return a + (b - a) * (x + 1) / 2


def _sector(center, th0, th1, degree, m):
    nr = m * degree + 1
    radii = lobatto(nr, 0.0, 1.0)[1:]
    half = (th1 - th0) / 2
    if half >= math.pi - 1e-12:
        nt = 2 * m * degree + 2
        th = np.linspace(0.0, 2 * math.pi, nt, endpoint=False)
    else:
        nt = int(math.ceil(m * degree * max(1.0, 2 * half / math.pi))) + 1
        th = (th0 + th1) / 2 + 2 * np.arcsin(math.sin(half / 2) * lobatto(nt))
    R, T = np.meshgrid(radii, th, indexing="ij")
    pts = np.column_stack([R.ravel() * np.cos(T.ravel()), R.ravel() * np.sin(T.ravel())])
    return np.vstack([[0.0, 0.0], pts]) + np.asarray(center, float)


def _base_interior(desc: SetDescriptor, degree: int, m: int) -> np.ndarray:
    k = desc.kind
    if k is Kind.REALDISK:
        return _sector((0, 0), 0.0, 2 * math.pi, degree, m)
    if k is Kind.SQUARE:
        g = lobatto(m * degree + 1)
        X, Y = np.meshgrid(g, g, indexing="ij")
        return np.column_stack([X.ravel(), Y.ravel()])
    if k is Kind.SIMPLEX:
        g = lobatto(m * degree + 1, 0.0, 1.0)
        A, B = np.meshgrid(g, g, indexing="ij")
        return np.column_stack([(A * (1 - B)).ravel(), (A * B).ravel()])
    if k is Kind.QUARTERPAIR:
        return np.vstack([_sector((0, 0), 0.0, math.pi / 2, degree, m),
                          _sector((0, 0), math.pi, 1.5 * math.pi, degree, m)])
    if k is Kind.PACMAN:
        h = desc.alpha / 2
        return _sector((1, 0), h, 2 * math.pi - h, degree, m)
    raise ValueError(k)  # pragma: no cover


def pullback_source(desc: SetDescriptor) -> SetDescriptor | None:
    """For K-type sets, the planar set whose image under (x, y) -> (x, y^2) it is."""
    if desc.kind is Kind.CONVEXK:
        return SetDescriptor(Kind.PACMAN)
    if desc.kind is Kind.CONVEXKPRIME:
        return s_prime()
    return None


def degree_weights(desc: SetDescriptor) -> tuple[int, ...]:
    """Weights turning an exponent J into the degree of the pulled-back monomial."""
    if desc.kind is Kind.INTERVAL:
        return (1,)
    return (1, 2) if pullback_source(desc) is not None else (1, 1)


def _dedupe(pts: np.ndarray) -> np.ndarray:
    key = np.round(pts / 1e-13).astype(np.int64)
    _, idx = np.unique(key, axis=0, return_index=True)
    return pts[np.sort(idx)] if pts.ndim == 1 else pts[idx]


def build_mesh(desc: SetDescriptor, degree: int, cap: int = MESH_CAP) -> Mesh:
    """Deterministic mesh adapted to polynomials of the given degree.

    For the K-type sets the degree refers to the pulled-back polynomial p(x, y^2),
    and the mesh is the image of the upper half of a mesh of the source set.
    """
    if degree < 1:
        raise ValueError("degree must be >= 1")
    h = MESH_C0 / degree ** 2
    if desc.kind is Kind.INTERVAL:
        uni = np.linspace(-1.0, 1.0, int(math.ceil(2.0 / h)) + 1)
        pts = np.sort(_dedupe(np.concatenate([lobatto(NODES_PER_DEGREE_1D * degree + 1), uni])))
        mesh = Mesh(pts, degree, float(np.max(np.diff(pts))), desc)
    else:
        src = pullback_source(desc)
        if src is not None:
            base = build_mesh(src, degree, cap=10 * cap).points
            upper = base[base[:, 1] >= 0.0]
            interior = np.column_stack([upper[:, 0], upper[:, 1] ** 2])
            interior = desc.from_base(interior)
        else:
            interior = desc.from_base(_base_interior(desc, degree, NODES_PER_DEGREE))
        bpts, gap = boundary_points(desc, h)
        pts = _dedupe(np.vstack([interior, bpts]))
        pts = pts[contains(desc, pts)]
        mesh = Mesh(pts, degree, gap, desc)
    if len(mesh) > cap:
        suggest = max(1, int(degree * math.sqrt(cap / len(mesh))))
        raise MeshTooLarge(f"mesh for {desc.kind.value} at degree {degree} has {len(mesh)} "
                           f"points (cap {cap}); try degree <= {suggest}")
    return mesh
