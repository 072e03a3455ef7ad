"""Closed-form extremal functions of the model sets and their Monge-Ampere densities.

All evaluators take points of C^2 as complex arrays with a trailing axis of
length 2 and broadcast over any leading batch shape. Densities are returned
with unit normalization constant; only ratios of them are meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from pluripot.core import as_cpoints, dist_to_interval, green_interval, log_h_real
from pluripot.sets import Kind, SetDescriptor, TOL, contains


def _split(z):
    z = as_cpoints(z)
    return z[..., 0], z[..., 1]


def simplex_h_arg(z):
    z1, z2 = _split(z)
    return np.abs(z1) + np.abs(z2) + np.abs(z1 + z2 - 1.0)


def quarterpair_h_arg(z):
    z1, z2 = _split(z)
    return np.abs(1.0 - z1 * z1 - z2 * z2) + np.abs(z1 - z2) ** 2 + 2.0 * np.abs(z1 * z2)


def realdisk_h_arg(z):
    z1, z2 = _split(z)
    return np.abs(z1) ** 2 + np.abs(z2) ** 2 + np.abs(z1 * z1 + z2 * z2 - 1.0)


def v_simplex(z):
    """Extremal function of the standard triangle co{(0,0), (1,0), (0,1)}."""
    return log_h_real(simplex_h_arg(z))


def v_quarterpair(z):
    """Extremal function of S = {x1^2 + x2^2 <= 1, x1 x2 >= 0}.

    Half the log of the Joukowski map at |1 - z1^2 - z2^2| + |z1 - z2|^2 + 2|z1 z2|;
    the factor one half is what makes it vanish on S and grow like log|z|.
    """
    return 0.5 * log_h_real(quarterpair_h_arg(z))


def v_realdisk(z):
    """Lundin's formula for the real unit disk."""
    return 0.5 * log_h_real(realdisk_h_arg(z))


def v_square(z):
    z1, z2 = _split(z)
    return np.maximum(green_interval(z1), green_interval(z2))


def density_formula(desc: SetDescriptor, x) -> float:
    """Monge-Ampere density of the disk, square or two-quarter-disk set, constant 1.

    Raises ValueError when x is not an interior point, or sits on the axes for
    the quarter-disk pair where the density is singular.
    """
    if not desc.is_identity:
        raise ValueError("densities are available for the untransformed model sets only")
    x1, x2 = (float(v) for v in np.asarray(x, dtype=float).reshape(2))
    k = desc.kind
    if k is Kind.REALDISK:
        r = 1.0 - x1 * x1 - x2 * x2
        if r <= 0:
            raise ValueError("point is not interior to the disk")
        return r ** -0.5
    if k is Kind.SQUARE:
        a, b = 1.0 - x1 * x1, 1.0 - x2 * x2
        if a <= 0 or b <= 0:
            raise ValueError("point is not interior to the square")
        return (a * b) ** -0.5
    if k is Kind.QUARTERPAIR:
        r = 1.0 - x1 * x1 - x2 * x2
        if x1 * x2 <= 0:
            raise ValueError("density is singular on the axes (x1 x2 = 0) or undefined outside S")
        if r <= 0:
            raise ValueError("point is not interior to S")
        return abs(x1 + x2) / np.sqrt(x1 * x2 * r)
    raise ValueError(f"no closed-form density for {k.value}")


@dataclass(frozen=True)
class ClosedForm:
    """An extremal function together with the loci where it fails to be smooth."""

    name: str
    kind: Kind
    value: Callable
    margin: Callable  # distance-like measure to branch and kink sets

    @property
    def desc(self) -> SetDescriptor:
        return SetDescriptor(self.kind)

    def vanishes_on(self, x) -> np.ndarray:
        return contains(self.desc, x, tol=TOL)


def _margin_simplex(z):
    z1, z2 = _split(z)
    return np.minimum.reduce([simplex_h_arg(z) - 1.0, np.abs(z1), np.abs(z2), np.abs(z1 + z2 - 1)])


def _margin_quarterpair(z):
    z1, z2 = _split(z)
    return np.minimum.reduce([quarterpair_h_arg(z) - 1.0, np.abs(1 - z1 * z1 - z2 * z2),
                              np.abs(z1 * z2)])


def _margin_realdisk(z):
    z1, z2 = _split(z)
    return np.minimum(realdisk_h_arg(z) - 1.0, np.abs(z1 * z1 + z2 * z2 - 1))


def _margin_square(z):
    z1, z2 = _split(z)
    g1, g2 = green_interval(z1), green_interval(z2)
    dom = np.where(g1 >= g2, z1, z2)
    return np.minimum(np.abs(g1 - g2), dist_to_interval(dom))


CLOSED_FORMS = {
    "simplex": ClosedForm("simplex", Kind.SIMPLEX, v_simplex, _margin_simplex),
    "quarterpair": ClosedForm("quarterpair", Kind.QUARTERPAIR, v_quarterpair, _margin_quarterpair),
    "realdisk": ClosedForm("realdisk", Kind.REALDISK, v_realdisk, _margin_realdisk),
    "square": ClosedForm("square", Kind.SQUARE, v_square, _margin_square),
}


def closed_form_for(desc: SetDescriptor) -> ClosedForm | None:
    if not desc.is_identity:
        return None
    for cf in CLOSED_FORMS.values():
        if cf.kind is desc.kind:
            return cf
    return None


def extremal_function(desc: SetDescriptor) -> Callable | None:
    """V for a model set with a closed form, including its affine images.

    Extremal functions are invariant under complex affine automorphisms, so
    V_{A(K)}(z) = V_K(A^{-1}(z - b)). For the interval the evaluator takes
    complex scalars.
    """
    if desc.kind is Kind.INTERVAL:
        return green_interval
    base = closed_form_for(SetDescriptor(desc.kind))
    if base is None:
        return None
    if desc.is_identity:
        return base.value
    return lambda z: base.value(desc.to_base(as_cpoints(z)))
