"""Complex scalar helpers, the Joukowski inverse map and the interval Green function.

Points of C^2 are numpy complex arrays whose last axis has length 2, so every
evaluator in the package works on a single point or on a batch alike.
"""

from __future__ import annotations

import numpy as np

# |h| is clamped to 1 (log|h| to 0) this close to the segment [-1, 1].
NEAR_INTERVAL = 1e-12


def cpoint(x1: float, y1: float, x2: float, y2: float) -> np.ndarray:
    """Build a point of C^2 from its four real coordinates."""
    return np.array([complex(x1, y1), complex(x2, y2)])


def as_cpoints(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if z.shape[-1:] != (2,):
        raise ValueError(f"expected points of C^2 (last axis 2), got shape {z.shape}")
    if not np.all(np.isfinite(z)):
        raise ValueError("non-finite coordinates")
    return z


def dist_to_interval(zeta) -> np.ndarray:
    """Euclidean distance from zeta to the real segment [-1, 1]."""
    zeta = np.asarray(zeta, dtype=complex)
    dx = np.maximum(np.abs(zeta.real) - 1.0, 0.0)
    return np.hypot(dx, zeta.imag)


def joukowski_h(zeta):
    """Inverse Joukowski map h(zeta) = zeta + sqrt(zeta^2 - 1), branch with |h| >= 1.

    Both square roots are formed and the candidate of larger modulus is kept,
    which is continuous on C minus [-1, 1] without relying on where numpy puts
    the principal-branch cut. On the segment itself both roots have modulus one
    and the one with non-negative imaginary part is returned.
    """
    zeta = np.asarray(zeta, dtype=complex)
    if not np.all(np.isfinite(zeta)):
        raise ValueError("non-finite argument")
    # (zeta-1)(zeta+1) keeps relative accuracy next to the endpoints
    r = np.sqrt((zeta - 1.0) * (zeta + 1.0))
    plus = zeta + r
    minus = zeta - r
    h = np.where(np.abs(plus) >= np.abs(minus), plus, minus)
    on_seg = (np.abs(zeta.imag) == 0.0) & (np.abs(zeta.real) <= 1.0)
    if np.any(on_seg):
        x = np.clip(zeta.real, -1.0, 1.0)
        h = np.where(on_seg, x + 1j * np.sqrt(1.0 - x * x), h)
    return h[()] if h.ndim == 0 else h


def green_interval(zeta):
    """Green function of [-1, 1] with pole at infinity, log|h(zeta)|."""
    zeta = np.asarray(zeta, dtype=complex)
    g = np.log(np.abs(joukowski_h(zeta)))
    g = np.where(dist_to_interval(zeta) < NEAR_INTERVAL, 0.0, np.maximum(g, 0.0))
    return g[()] if g.ndim == 0 else g


def log_h_real(x):
    """log h(x) for real x >= 1, i.e. arccosh(x).

    Arguments within NEAR_INTERVAL of 1 return exactly 0 so rounding in the
    callers' moduli never produces a spurious positive value on the set.
    """
    x = np.asarray(x, dtype=float)
    out = np.where(x - 1.0 <= NEAR_INTERVAL, 0.0, np.arccosh(np.maximum(x, 1.0)))
    return out[()] if out.ndim == 0 else out
