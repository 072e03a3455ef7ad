"""Numerical extremal functions and Monge-Ampere asymptotics for planar model sets."""

from pluripot.core import cpoint, green_interval, joukowski_h
from pluripot.closed_forms import (
    density_formula,
    extremal_function,
    v_quarterpair,
    v_realdisk,
    v_simplex,
    v_square,
)
from pluripot.lp import C_PAC, SIGMA, degree_sweep, lp_lower_bound
from pluripot.numerics import ApproachPath, approach_experiment, maximality_residual
from pluripot.pullback import PolyMap2, builtin_maps, compose, lattice_pullback_check, sandwich
from pluripot.sets import Kind, SetDescriptor, build_mesh, contains
from pluripot.verify import run_verification

__version__ = "0.1.0"

__all__ = [
    "ApproachPath",
    "C_PAC",
    "Kind",
    "PolyMap2",
    "SIGMA",
    "SetDescriptor",
    "approach_experiment",
    "build_mesh",
    "builtin_maps",
    "compose",
    "contains",
    "cpoint",
    "degree_sweep",
    "density_formula",
    "extremal_function",
    "green_interval",
    "joukowski_h",
    "lattice_pullback_check",
    "lp_lower_bound",
    "maximality_residual",
    "run_verification",
    "sandwich",
    "v_quarterpair",
    "v_realdisk",
    "v_simplex",
    "v_square",
]
