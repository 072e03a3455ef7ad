"""Polynomial self-maps of C^2 and extremal functions pulled back through them.

If F is proper of degree at most b with ||F(z)|| >= c ||z||^a near infinity,
then a V_{F^-1(K)} <= V_K o F <= b V_{F^-1(K)}, so dividing V_K(F(z)) by b and
by a brackets V_{F^-1(K)}(z). The map G(x1, x2) = ((x1-x2)^2, 2 x1 x2) has
a = b = 2 and carries the two-quarter-disk set S onto the standard triangle,
which makes the bracket collapse to the exact value of V_S.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from pluripot.core import as_cpoints
from pluripot.lp import C_PAC, SIGMA, LPBound, lp_lower_bound
from pluripot.sets import Kind, Mesh, SetDescriptor, build_mesh, s_prime

DEGREE_CAP = 64

Poly = dict  # {(j, k): complex coefficient of z1^j z2^k}


def _clean(p: Poly) -> Poly:
    return {m: c for m, c in p.items() if c != 0}


def _mul(p: Poly, q: Poly) -> Poly:
    terms: dict = {}
    for (a, b), c in p.items():
        for (d, e), f in q.items():
            terms.setdefault((a + d, b + e), []).append(c * f)
    return _clean({m: _fsum(v) for m, v in terms.items()})


def _fsum(values) -> complex:
    # compensated summation of real and imaginary parts
    return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))


def _degree(p: Poly) -> int:
    return max((j + k for j, k in p), default=0)


def _eval(p: Poly, z1, z2):
    out = np.zeros(np.broadcast(z1, z2).shape, dtype=complex)
    for (j, k), c in p.items():
        out = out + c * z1 ** j * z2 ** k
    return out


@dataclass(frozen=True)
class PolyMap2:
    """Polynomial map of C^2 with declared growth exponents a <= b."""

    components: tuple
    b: int
    a: float
    name: str = ""

    def __post_init__(self):
        comps = tuple(_clean({tuple(int(e) for e in m): complex(c) for m, c in p.items()})
                      for p in self.components)
        if len(comps) != 2:
            raise ValueError("a map of C^2 needs two components")
        object.__setattr__(self, "components", comps)
        deg = max(_degree(p) for p in comps)
        if deg != self.b:
            raise ValueError(f"declared degree b={self.b} but components have degree {deg}")
        if not (0 < self.a <= self.b):
            raise ValueError("growth exponent must satisfy 0 < a <= b")
        if self.growth_ratio() <= 0:
            raise ValueError("map fails the properness sanity check for the declared a")

    def __call__(self, z):
        z = as_cpoints(z)
        z1, z2 = z[..., 0], z[..., 1]
        return np.stack([_eval(p, z1, z2) for p in self.components], axis=-1)

    def growth_ratio(self, radius: float = 1e3, samples: int = 1000) -> float:
        """min ||F(z)|| / ||z||^a over seeded random points of the sphere |z| = radius."""
        rng = np.random.default_rng(0)
        w = rng.normal(size=(samples, 4))
        w *= radius / np.linalg.norm(w, axis=1, keepdims=True)
        z = w[:, ::2] + 1j * w[:, 1::2]
        F = self(z)
        norm = np.hypot(np.abs(F[:, 0]), np.abs(F[:, 1]))  # no overflow for high degrees
        return float(np.min(norm / radius ** self.a))

    def to_dict(self) -> dict:
        return {"components": [[{"j": j, "k": k, "re": c.real, "im": c.imag}
                                for (j, k), c in sorted(p.items())] for p in self.components],
                "a": self.a, "b": self.b}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, obj: dict, name: str = "") -> "PolyMap2":
        comps = tuple({(t["j"], t["k"]): complex(t["re"], t.get("im", 0.0)) for t in comp}
                      for comp in obj["components"])
        return cls(comps, b=int(obj["b"]), a=float(obj["a"]), name=name)

    @classmethod
    def from_json(cls, text: str) -> "PolyMap2":
        return cls.from_dict(json.loads(text))


def compose(f: PolyMap2, g: PolyMap2) -> PolyMap2:
    """The map f o g with exact coefficient arithmetic (up to rounding)."""
    if f.b * g.b > DEGREE_CAP:
        raise ValueError(f"composite degree {f.b * g.b} exceeds the cap {DEGREE_CAP}")
    g1, g2 = g.components
    powers1, powers2 = [{(0, 0): 1 + 0j}], [{(0, 0): 1 + 0j}]
    for _ in range(f.b):
        powers1.append(_mul(powers1[-1], g1))
        powers2.append(_mul(powers2[-1], g2))
    comps = []
    for p in f.components:
        terms: dict = {}
        for (j, k), c in p.items():
            for m, v in _mul(powers1[j], powers2[k]).items():
                terms.setdefault(m, []).append(c * v)
        comps.append(_clean({m: _fsum(v) for m, v in terms.items()}))
    b = max(_degree(p) for p in comps)
    name = f"{f.name}o{g.name}" if f.name and g.name else ""
    return PolyMap2(tuple(comps), b=b, a=min(f.a * g.a, b), name=name)


def builtin_maps() -> dict[str, PolyMap2]:
    r = 1 / math.sqrt(2)
    return {
        "identity": PolyMap2(({(1, 0): 1}, {(0, 1): 1}), b=1, a=1, name="identity"),
        # rotation by 45 degrees
        "T1": PolyMap2(({(1, 0): r, (0, 1): -r}, {(1, 0): r, (0, 1): r}), b=1, a=1, name="T1"),
        "Qmap": PolyMap2(({(2, 0): 1}, {(0, 2): 1}), b=2, a=2, name="Qmap"),
        "T2": PolyMap2(({(1, 0): 2}, {(0, 1): 1, (1, 0): -1}), b=1, a=1, name="T2"),
        "G": PolyMap2(({(2, 0): 1, (1, 1): -2, (0, 2): 1}, {(1, 1): 2}), b=2, a=2, name="G"),
        "F_pac": PolyMap2(({(1, 0): 1}, {(0, 2): 1}), b=2, a=1, name="F_pac"),
    }


def sandwich(v_model: Callable, F: PolyMap2, z) -> tuple[float, float]:
    """Bracket (lo, hi) for the extremal function of F^-1(K) at z, given V_K."""
    v = v_model(F(z))
    return v / F.b, v / F.a


def fold(points: np.ndarray) -> np.ndarray:
    """Real slice of F_pac: (x, y) -> (x, y^2)."""
    points = np.asarray(points, dtype=float)
    return np.column_stack([points[..., 0], points[..., 1] ** 2]) if points.ndim == 2 else \
        np.array([points[0], points[1] ** 2])


def pullback_meshes(n: int) -> tuple[Mesh, Mesh]:
    """Matched meshes for the lattice check: a mirror-symmetric mesh of S' and its fold onto K'.

    The mesh of S' is built for degree 2n, which is also the degree of p(x, y^2)
    for p in Poly(nC).
    """
    sp = s_prime()
    base = build_mesh(sp, 2 * n)
    upper = base.points[base.points[:, 1] >= 0.0]
    lower = upper[upper[:, 1] > 0.0] * np.array([1.0, -1.0])
    mesh_p = Mesh(np.vstack([upper, lower]), 2 * n, base.spacing, sp)
    kp = SetDescriptor(Kind.CONVEXKPRIME)
    mesh_k = Mesh(fold(upper), 2 * n, base.spacing, kp)
    return mesh_p, mesh_k


@dataclass
class LatticeCheck:
    lhs: float
    rhs: float
    lhs_bound: LPBound
    rhs_bound: LPBound

    def __iter__(self):
        return iter((self.lhs, self.rhs))

    @property
    def gap(self) -> float:
        return abs(self.lhs - self.rhs)


def lattice_pullback_check(n: int, z, meshes: tuple[Mesh, Mesh] | None = None) -> LatticeCheck:
    """Compare V_{C,K'}(F(z)) with 2 V_{S'}(z) through their degree-n LP estimates.

    lhs uses Poly(nC), C = co{(0,0), (2,0), (0,1)}, on a mesh of K'; rhs is
    (1/n) log of the LP optimum over Poly(2n Sigma) on the matching mesh of S'.
    Both increase to the same limit.
    """
    if not 2 <= n <= 16:
        raise ValueError("n must lie in 2..16")
    z = np.asarray(z)
    if np.iscomplexobj(z):
        if np.any(z.imag != 0):
            raise ValueError("the lattice check needs a real point")
        z = z.real
    z = z.astype(float).reshape(2)
    mesh_p, mesh_k = meshes if meshes is not None else pullback_meshes(n)
    lhs_b = lp_lower_bound(mesh_k.desc, C_PAC, n, fold(z), mesh=mesh_k)
    rhs_b = lp_lower_bound(mesh_p.desc, SIGMA, 2 * n, z, mesh=mesh_p)
    return LatticeCheck(lhs_b.value, 2.0 * rhs_b.value, lhs_b, rhs_b)
