"""Finite-difference complex Hessians and density asymptotics near corners.

Pac-Man experiments work with a surrogate for the density of P near its
vertex (1, 0): under the fold (x, y) -> (s, t) = (x, y^2) the density of P is
comparable to sqrt(t) * rho_K(s, t), and rho_K behaves like dist((s,t), dK)^(-1/2).
The surrogate sqrt(t) / sqrt(dist) keeps the dependence on the approach
direction and drops the unknown constant, so only ratios and exponents of
it carry meaning.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import mpmath
import numpy as np
from scipy import stats

from pluripot.closed_forms import density_formula
from pluripot.core import green_interval
from pluripot.sets import Kind, SetDescriptor, dist_local_K

STEP_RANGE = (1e-5, 1e-2)
PATH_DELTA0 = 1e-2
PATH_SAMPLES = 25
PATH_DPS = 50
FINITE_TAIL = 5
DIVERGENT_TAIL = 10
DIVERGENT_R2 = 0.99
DIVERGENT_SLOPE = -0.05

CSV_COLUMNS = ("k", "delta", "x", "y", "s", "t", "surrogate_value")


# ---------------------------------------------------------------------------
# complex Hessian
# ---------------------------------------------------------------------------

def _stencil(step: float) -> np.ndarray:
    """Offsets in (x1, y1, x2, y2): centre, axial pairs, and the four corners of each plane."""
    eye = np.eye(4) * step
    offs = [np.zeros(4)]
    for a in range(4):
        offs += [eye[a], -eye[a]]
    for a in range(4):
        for b in range(a + 1, 4):
            for sa in (1, -1):
                for sb in (1, -1):
                    offs.append(sa * eye[a] + sb * eye[b])
    return np.array(offs)


def real_hessian_fd(V: Callable, z, step: float) -> np.ndarray:
    """4x4 Hessian of V in the real coordinates (x1, y1, x2, y2) by central differences."""
    z = np.asarray(z, dtype=complex).reshape(2)
    q = np.array([z[0].real, z[0].imag, z[1].real, z[1].imag])
    pts = q + _stencil(step)
    vals = np.asarray(V(pts[:, 0::2] + 1j * pts[:, 1::2]), dtype=float).reshape(-1)
    if not np.all(np.isfinite(vals)):
        raise ValueError("non-finite value inside the finite-difference stencil")
    h2 = step * step
    D = np.empty((4, 4))
    v0 = vals[0]
    for a in range(4):
        D[a, a] = (vals[1 + 2 * a] - 2.0 * v0 + vals[2 + 2 * a]) / h2
    i = 9
    for a in range(4):
        for b in range(a + 1, 4):
            pp, pm, mp_, mm = vals[i:i + 4]
            D[a, b] = D[b, a] = (pp - pm - mp_ + mm) / (4.0 * h2)
            i += 4
    return D


def complex_hessian_fd(V: Callable, z, step: float = 1e-3) -> np.ndarray:
    """Levi form H_jk = d^2 V / dz_j dzbar_k at z, as a Hermitian 2x2 matrix.

    V maps complex arrays of shape (..., 2) to reals. The real Hessian is
    symmetric by construction, so H is exactly Hermitian.
    """
    if not STEP_RANGE[0] <= step <= STEP_RANGE[1]:
        raise ValueError(f"finite-difference step {step!r} outside [{STEP_RANGE[0]}, {STEP_RANGE[1]}]")
    D = real_hessian_fd(V, z, step)
    x1, y1, x2, y2 = range(4)
    h11 = 0.25 * (D[x1, x1] + D[y1, y1])
    h22 = 0.25 * (D[x2, x2] + D[y2, y2])
    h12 = 0.25 * complex(D[x1, x2] + D[y1, y2], D[x1, y2] - D[y1, x2])
    return np.array([[h11, h12], [np.conj(h12), h22]], dtype=complex)


def maximality_residual(V: Callable, z, step: float = 1e-3) -> float:
    """|det H| / (1 + ||H||^2) with the spectral norm; zero for maximal functions.

    Callers keep z at least 10 steps away from the set and from the branch
    sets of the formula, where V is not twice differentiable.
    """
    H = complex_hessian_fd(V, z, step)
    det = abs(np.linalg.det(H))
    return float(det / (1.0 + np.linalg.norm(H, 2) ** 2))


def min_eigenvalue_ratio(H: np.ndarray) -> float:
    """Smallest eigenvalue of H relative to its norm (plurisubharmonicity check)."""
    w = np.linalg.eigvalsh(H)
    return float(w[0] / max(np.linalg.norm(H, 2), 1e-300))


# ---------------------------------------------------------------------------
# one-variable density
# ---------------------------------------------------------------------------

def default_y_samples() -> np.ndarray:
    return 1e-3 * 2.0 ** -np.arange(10)


def interval_density_jump(x: float, y_samples=None) -> float:
    """Equilibrium density of [-1, 1] at x from the normal slope of its Green function."""
    if not abs(x) < 1:
        raise ValueError("x must lie inside (-1, 1)")
    y = default_y_samples() if y_samples is None else np.asarray(y_samples, dtype=float)
    if np.any(y <= 0) or np.any(y >= 1e-2):
        raise ValueError("y samples must lie in (0, 1e-2)")
    g = green_interval(x + 1j * y)
    slope = float(np.dot(y, g) / np.dot(y, y))
    return slope / math.pi


# ---------------------------------------------------------------------------
# Pac-Man surrogate
# ---------------------------------------------------------------------------

def surrogate_local(sigma, t):
    """Surrogate at (s, t) = (1 + sigma, t); float or mpmath input."""
    if t == 0:
        # bottom edge away from the vertex: dist = t, the ratio is identically one
        if -1 < sigma < 0:
            return t * 0 + 1
        raise ValueError("surrogate is undefined on the boundary of K except the open bottom edge")
    if t < 0:
        raise ValueError("t must be positive")
    sqrt = mpmath.sqrt if isinstance(t, mpmath.mpf) or isinstance(sigma, mpmath.mpf) else math.sqrt
    return sqrt(t) / sqrt(dist_local_K(sigma, t))


def pacman_density_surrogate(s, t):
    """sqrt(t) / sqrt(dist((s, t), boundary of K)), the Pac-Man density surrogate at (s, sqrt(t))."""
    return surrogate_local(s - 1, t)


# ---------------------------------------------------------------------------
# approach paths
# ---------------------------------------------------------------------------

class Target(str, enum.Enum):
    PACMAN = "pacman"
    SCORNER = "scorner"


class PathKind(str, enum.Enum):
    LINEAR = "linear"
    VERTICAL = "vertical"
    TANGENTIAL = "tangential"
    LINEAR_M = "linearm"


@dataclass(frozen=True)
class ApproachPath:
    """A curve into the Pac-Man vertex (1, 0) or the corner (0, 0) of the quarter-disk pair.

    Pac-Man paths, with u = delta:
      linear c > 1:   (1 + u, c u)
      linear c <= 0:  (1 - u, |c| u)   (the line y = c (x - 1) from the left)
      vertical:       (1, u)
      tangential:     (1 + u, u + a u^N)
    Corner paths: linearm (u, m u) and tangential (u, a u^N).
    ``mirror`` reflects y -> -y (Pac-Man) or z -> -z (corner).
    """

    target: Target
    kind: PathKind
    c: float = math.nan
    m: float = math.nan
    a: float = 1.0
    N: float = 2.0
    mirror: bool = False
    delta0: float = PATH_DELTA0
    samples: int = PATH_SAMPLES

    def __post_init__(self):
        object.__setattr__(self, "target", Target(self.target))
        object.__setattr__(self, "kind", PathKind(self.kind))
        if self.samples < 20:
            raise ValueError("an approach experiment needs at least 20 samples")
        if not 0 < self.delta0 <= 0.1:
            raise ValueError("delta0 must lie in (0, 0.1]")
        if self.target is Target.PACMAN:
            if self.kind is PathKind.LINEAR_M:
                raise ValueError("linearm paths approach the corner of S, not the Pac-Man vertex")
            if self.kind is PathKind.LINEAR:
                c = self.c
                if not math.isfinite(c) or 0 < c <= 1:
                    raise ValueError("linear Pac-Man paths need c > 1 or c <= 0")
        else:
            if self.kind in (PathKind.LINEAR, PathKind.VERTICAL):
                raise ValueError("corner paths are linearm or tangential")
            if self.kind is PathKind.LINEAR_M and not 0 < self.m <= 1:
                raise ValueError("m must lie in (0, 1]")
        if self.kind is PathKind.TANGENTIAL and not (self.a > 0 and self.N > 1):
            raise ValueError("tangential paths need a > 0 and N > 1")

    @property
    def deltas(self) -> list:
        with mpmath.workdps(PATH_DPS):
            return [mpmath.mpf(self.delta0) / 2 ** k for k in range(self.samples)]

    def local_point(self, u):
        """(offset from the target along x, y-coordinate), exact in mpmath."""
        if self.target is Target.PACMAN:
            if self.kind is PathKind.LINEAR:
                du, y = (u, self.c * u) if self.c > 1 else (-u, -self.c * u)
            elif self.kind is PathKind.VERTICAL:
                du, y = 0 * u, u
            else:
                du, y = u, u + self.a * u ** self.N
        else:
            if self.kind is PathKind.LINEAR_M:
                du, y = u, self.m * u
            else:
                du, y = u, self.a * u ** self.N
            if self.mirror:
                du = -du
        return du, (-y if self.mirror else y)

    def label(self) -> str:
        if self.kind is PathKind.LINEAR:
            return f"linear(c={self.c:g})"
        if self.kind is PathKind.LINEAR_M:
            return f"linearm(m={self.m:g})"
        if self.kind is PathKind.TANGENTIAL:
            return f"tangential(a={self.a:g},N={self.N:g})"
        return "vertical"


def _in_pacman_local(du, y) -> bool:
    # unit disk centred at the vertex's circle centre (1, 0), minus the open wedge |y| < x - 1
    if du * du + y * y > 1:
        return False
    return not (du > 0 and abs(y) < du)


def _in_s(x1, x2) -> bool:
    return x1 * x2 >= 0 and x1 * x1 + x2 * x2 <= 1


@dataclass
class LimitFit:
    kind: str  # "FiniteLimit" or "Divergent"
    value: float = math.nan
    residual: float = math.nan
    loglog_slope: float = math.nan
    r2: float = math.nan

    def to_dict(self) -> dict:
        if self.kind == "FiniteLimit":
            return {"kind": self.kind, "value": self.value, "residual": self.residual,
                    "loglog_slope": self.loglog_slope, "r2": self.r2}
        return {"kind": self.kind, "loglog_slope": self.loglog_slope, "r2": self.r2,
                "value": self.value, "residual": self.residual}


@dataclass
class ApproachResult:
    path: ApproachPath
    rows: list = field(repr=False)
    fit: LimitFit = None

    @property
    def values(self) -> np.ndarray:
        return np.array([r[-1] for r in self.rows], dtype=float)

    @property
    def deltas(self) -> np.ndarray:
        return np.array([r[1] for r in self.rows], dtype=float)


def fit_limit(deltas, values) -> LimitFit:
    """Classify a sampled sequence as convergent or as a power-law blow-up.

    The log-log regression runs over the last 10 samples; a slope below -0.05
    with r^2 >= 0.99 means divergence, anything else is treated as a finite
    limit estimated by the mean of the last 5 samples.
    """
    deltas = np.asarray(deltas, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(values) < max(FINITE_TAIL, DIVERGENT_TAIL):
        raise ValueError("too few samples to fit")
    if np.any(values <= 0):
        raise ValueError("surrogate values must be positive")
    reg = stats.linregress(np.log(deltas[-DIVERGENT_TAIL:]), np.log(values[-DIVERGENT_TAIL:]))
    slope, r2 = float(reg.slope), float(reg.rvalue ** 2)
    tail = values[-FINITE_TAIL:]
    mean = math.fsum(tail) / len(tail)
    resid = float(np.max(np.abs(tail - mean)))
    if slope < DIVERGENT_SLOPE and r2 >= DIVERGENT_R2:
        return LimitFit("Divergent", value=float(values[-1]), residual=resid,
                        loglog_slope=slope, r2=r2)
    return LimitFit("FiniteLimit", value=mean, residual=resid, loglog_slope=slope, r2=r2)


def approach_experiment(path: ApproachPath) -> ApproachResult:
    """Sample the density (surrogate) along the path and fit its behaviour at the target.

    Rows carry (k, delta, x, y, s, t, surrogate_value); for the corner of S the
    columns s, t repeat x, y since no fold is applied there.
    """
    rows = []
    qp = SetDescriptor(Kind.QUARTERPAIR)
    with mpmath.workdps(PATH_DPS):
        for k, u in enumerate(path.deltas):
            du, y = path.local_point(u)
            if path.target is Target.PACMAN:
                if not _in_pacman_local(du, y):
                    raise ValueError(f"sample {k} of {path.label()} leaves the Pac-Man set")
                t = y * y
                val = surrogate_local(du, t)
                x = 1 + du
                s = x
            else:
                if not _in_s(du, y):
                    raise ValueError(f"sample {k} of {path.label()} leaves S")
                val = density_formula(qp, (float(du), float(y)))
                x, s, t = du, du, y
            rows.append((k, float(u), float(x), float(y), float(s), float(t), float(val)))
    res = ApproachResult(path, rows)
    res.fit = fit_limit(res.deltas, res.values)
    return res


def linear_limit_oracle(c: float) -> float:
    """|c| / sqrt(c^2 - 1), the algebraic limit of the surrogate along y = c (x - 1), c > 1."""
    return abs(c) / math.sqrt((abs(c) - 1) * (abs(c) + 1))


def corner_limit_oracle(m: float) -> float:
    """(1 + m) / sqrt(m), the limit of the density of S along x2 = m x1 (unit constant)."""
    return (1 + m) / math.sqrt(m)


def rotation_correspondence(m: float) -> tuple[float, float]:
    """Slope c = (1 + m)/(1 - m) of the Pac-Man line matching the corner line of slope m,
    and c / sqrt(c^2 - 1), which equals (1 + m) / (2 sqrt(m))."""
    if not 0 < m < 1:
        raise ValueError("m must lie in (0, 1)")
    c = (1 + m) / (1 - m)
    return c, c / math.sqrt((c - 1) * (c + 1))
