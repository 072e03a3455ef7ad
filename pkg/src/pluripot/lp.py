"""Lower bounds for (C-)extremal functions from the polynomial characterization.

For a real point z0 outside a real set K the quantity

    sup { p(z0) : p in Poly(nC) with real coefficients, |p| <= 1 on K }

is approximated by a finite LP whose constraints live on a mesh of K. Real
coefficients lose nothing for real z0: after a phase rotation p(z0) > 0, and
the real part of the coefficient vector keeps that value while |Re p| <= |p|
on real points. The LP is solved through its dual,

    minimize sum |u_i|  subject to  sum_i u_i phi(x_i) = phi(z0),

whose simplex multipliers are the coefficients of the optimal polynomial.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg
from numpy.polynomial import chebyshev as npcheb

from pluripot.sets import Mesh, SetDescriptor, build_mesh, degree_weights
from pluripot.simplex import Infeasible, LPError, solve_standard


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(str(v))


def _hull(points):
    """Convex hull (counter-clockwise, no collinear points) with exact arithmetic."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


@dataclass(frozen=True)
class LatticeSpec:
    """A convex body C in the positive orthant, given by its vertices."""

    vertices: tuple

    def __post_init__(self):
        verts = tuple(tuple(_frac(c) for c in v) for v in self.vertices)
        dims = {len(v) for v in verts}
        if len(dims) != 1 or dims.pop() not in (1, 2):
            raise ValueError("vertices must all be 1- or 2-vectors")
        if any(c < 0 for v in verts for c in v):
            raise ValueError("C must lie in the positive orthant")
        object.__setattr__(self, "vertices", verts)
        if self.sigma_multiple() is None:
            raise ValueError("the standard simplex is not contained in kC for any k <= 8")

    @property
    def dim(self) -> int:
        return len(self.vertices[0])

    def contains(self, p, scale=1) -> bool:
        p = tuple(_frac(c) for c in p)
        if self.dim == 1:
            lo = min(v[0] for v in self.vertices) * scale
            hi = max(v[0] for v in self.vertices) * scale
            return lo <= p[0] <= hi
        hull = [(v[0] * scale, v[1] * scale) for v in _hull(self.vertices)]
        if len(hull) < 3:
            return False
        for a, b in zip(hull, hull[1:] + hull[:1]):
            if (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) < 0:
                return False
        return True

    def sigma_multiple(self) -> int | None:
        """Smallest k <= 8 with the standard simplex inside kC."""
        corners = [(0,) * self.dim] + [tuple(int(i == j) for j in range(self.dim))
                                       for i in range(self.dim)]
        for k in range(1, 9):
            if all(self.contains(c, k) for c in corners):
                return k
        return None

    def points(self, n: int) -> list[tuple[int, ...]]:
        """Lattice points of nC, sorted lexicographically."""
        top = [max(int(math.floor(v[i] * n)) for v in self.vertices) for i in range(self.dim)]
        grid = np.ndindex(*[t + 1 for t in top])
        return sorted(J for J in grid if self.contains(J, n))

    def to_list(self) -> list:
        return [[float(c) for c in v] for v in self.vertices]


SIGMA_1D = LatticeSpec(((0,), (1,)))
SIGMA = LatticeSpec(((0, 0), (1, 0), (0, 1)))
# exponent body for polynomials in (z, w^2): j/2 + k <= 1
C_PAC = LatticeSpec(((0, 0), (2, 0), (0, 1)))


def lattice_for(desc: SetDescriptor, name: str | None = None) -> LatticeSpec:
    if name is None or name.lower() in ("sigma", "standard"):
        return SIGMA_1D if desc.dim == 1 else SIGMA
    if name.lower() in ("c", "pac", "cpac"):
        return C_PAC
    verts = [tuple(Fraction(c) for c in v.split(",")) for v in name.split(";")]
    return LatticeSpec(tuple(verts))


def h_indicator(vertices, z) -> float:
    """Logarithmic indicator sup_{J in C} log|z^J|, attained at a vertex of C."""
    if isinstance(vertices, LatticeSpec):
        vertices = vertices.vertices
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    logs = []
    for zi in z:
        a = abs(zi)
        logs.append(math.log(a) if a > 0 else -math.inf)
    best = -math.inf
    for v in vertices:
        tot = 0.0
        for j, lz in zip(v, logs):
            if j != 0:
                tot += float(j) * lz
        best = max(best, tot)
    return best


# ---------------------------------------------------------------------------
# basis
# ---------------------------------------------------------------------------

def _down_closed(exps) -> bool:
    s = set(exps)
    return all(tuple(J[:i] + (J[i] - 1,) + J[i + 1:]) in s
               for J in exps for i in range(len(J)) if J[i] > 0)


@dataclass(frozen=True)
class PolyBasis:
    """Exponent set with a numerically friendly basis on a box.

    For down-closed exponent sets the products of Chebyshev polynomials in the
    box-normalized coordinates span exactly the same space as the monomials;
    otherwise scaled monomials are used (scaling keeps the span, shifting may not).
    """

    exponents: tuple
    center: tuple
    half: tuple
    chebyshev: bool

    @classmethod
    def for_box(cls, exponents, lo, hi):
        exps = tuple(tuple(J) for J in exponents)
        lo, hi = np.atleast_1d(lo).astype(float), np.atleast_1d(hi).astype(float)
        half = np.maximum((hi - lo) / 2, 1e-12)
        if _down_closed(exps):
            return cls(exps, tuple((lo + hi) / 2), tuple(half), True)
        scale = np.maximum(np.abs(lo), np.abs(hi))
        return cls(exps, tuple(0.0 * scale), tuple(scale), False)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        d = len(self.center)
        x = x.reshape(-1, d)
        xi = (x - np.asarray(self.center)) / np.asarray(self.half)
        E = np.asarray(self.exponents, dtype=int).reshape(-1, d)
        out = np.ones((len(x), len(E)))
        for i in range(d):
            top = int(E[:, i].max())
            V = npcheb.chebvander(xi[:, i], top) if self.chebyshev else np.vander(
                xi[:, i], top + 1, increasing=True)
            out *= V[:, E[:, i]]
        return out


@dataclass
class LPBound:
    """Result of one LP: value = (1/n) log p(z0) for the optimal certificate p."""

    value: float
    degree: int
    mesh_size: int
    certificate: np.ndarray
    basis: PolyBasis = field(repr=False, default=None)
    z0: np.ndarray = field(repr=False, default=None)
    spacing: float = math.nan
    iterations: int = 0

    def polynomial(self, x) -> np.ndarray:
        return self.basis(x) @ self.certificate

    def replay(self, mesh_points) -> tuple[float, float]:
        """(max |p| on the given points, (1/n) log p(z0)) from the certificate alone."""
        sup = float(np.max(np.abs(self.polynomial(mesh_points))))
        pz = float(self.polynomial(self.z0)[0])
        return sup, max(0.0, math.log(pz) / self.degree) if pz > 0 else -math.inf

    def to_dict(self) -> dict:
        return {"value": self.value, "degree": self.degree, "mesh_size": self.mesh_size,
                "certificate": [float(c) for c in self.certificate]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def required_mesh_degree(desc: SetDescriptor, lattice: LatticeSpec, n: int) -> int:
    w = degree_weights(desc)
    return max(1, max(sum(wi * j for wi, j in zip(w, J)) for J in lattice.points(n)))


def _crash_basis(Phi, target):
    """Feasible starting basis from approximate Fekete points.

    Column-pivoted QR of Phi.T selects well-conditioned mesh points; each is
    entered with the sign that makes its weight nonnegative. Returns None when
    the mesh does not span the polynomial space.
    """
    N, m = Phi.shape
    if N < m:
        return None
    _, R, piv = scipy.linalg.qr(Phi.T, mode="economic", pivoting=True)
    if abs(R[m - 1, m - 1]) <= 1e-12 * abs(R[0, 0]):
        return None
    rows = piv[:m]
    u = np.linalg.solve(Phi[rows].T, target)
    return np.where(u >= 0, rows, rows + N)


def lp_lower_bound(desc: SetDescriptor, lattice: LatticeSpec, n: int, z0,
                   mesh: Mesh | None = None) -> LPBound:
    """LP estimate of V_{C,K}(z0) using Poly(nC) on a mesh of K."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if lattice.dim != desc.dim:
        raise ValueError(f"lattice dimension {lattice.dim} does not match set dimension {desc.dim}")
    z0 = np.asarray(z0)
    if np.iscomplexobj(z0):
        if np.any(z0.imag != 0):
            raise ValueError("LP bounds need a real query point; use the closed forms for complex points")
        z0 = z0.real
    z0 = z0.astype(float).reshape(desc.dim)
    if mesh is None:
        mesh = build_mesh(desc, required_mesh_degree(desc, lattice, n))
    pts = mesh.points.reshape(len(mesh), desc.dim)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    basis = PolyBasis.for_box(lattice.points(n), lo, hi)
    Phi = basis(pts)
    target = basis(z0)[0]
    start = _crash_basis(Phi, target)
    A = np.hstack([Phi.T, -Phi.T])
    try:
        res = solve_standard(A, target, np.ones(A.shape[1]), start=start)
    except Infeasible as exc:
        raise LPError(f"LP for degree {n} on {len(mesh)} mesh points is unbounded: the mesh "
                      f"does not determine Poly(nC) (not unisolvent); refine the mesh") from exc
    coef, iterations = res.duals, res.iterations
    sup = float(np.max(np.abs(Phi @ coef)))
    if sup > 1.0:
        coef = coef / sup
    pz = float(target @ coef)
    if pz <= 0:
        raise LPError("LP returned a non-positive optimum; the constant polynomial should give 1")
    value = max(0.0, math.log(pz) / n)
    return LPBound(value=value, degree=n, mesh_size=len(mesh), certificate=coef, basis=basis,
                   z0=z0, spacing=mesh.spacing, iterations=iterations)


def degree_sweep(desc: SetDescriptor, lattice: LatticeSpec, z0, degrees) -> list[LPBound]:
    """Bounds for increasing degrees on one common mesh (fine enough for the largest).

    Sharing the mesh makes the squared degree-n optimum feasible at degree 2n,
    so the sequence is monotone along doublings.
    """
    degrees = [int(d) for d in degrees]
    if any(b <= a for a, b in zip(degrees, degrees[1:])):
        raise ValueError("degrees must be increasing")
    if any(d % degrees[0] for d in degrees):
        raise ValueError("every degree must be a multiple of the smallest")
    mesh = build_mesh(desc, required_mesh_degree(desc, lattice, degrees[-1]))
    return [lp_lower_bound(desc, lattice, d, z0, mesh=mesh) for d in degrees]
