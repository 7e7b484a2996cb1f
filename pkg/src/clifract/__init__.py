"""Clifford-valued fractal interpolation.

Multivector arithmetic over algebras whose generators square to -1,
contractive affine partitions of an interval, self-referential fixed-point
solvers on sampled functions, their componentwise lift to algebra-valued
functions, and per-space contraction gates.
"""

from .algebra import (
    MAX_DIMENSION,
    Multivector,
    Paravector,
    ParavectorMatrix,
    blade_key,
    blade_mul,
    clifford_norm,
    conj,
    mv_mul,
    omega,
    parse_blade_key,
    pv_project,
    quaternion_mul,
    right_linear_apply,
)
from .engine import (
    AlignmentError,
    ConvergenceError,
    FixedPointResult,
    GridFunction,
    Poly,
    RBParams,
    SpaceSpec,
    empirical_gamma,
    fif_from_data,
    fixed_point,
    gamma_gate,
    norm,
    rb_apply,
    sup_norm,
)
from .lift import (
    CliffordFixedPointResult,
    CliffordGridFunction,
    CliffordRBParams,
    clifford_empirical_gamma,
    clifford_fif_from_data,
    clifford_fixed_point,
    clifford_norm_F,
    clifford_rb_apply,
    pointwise_conj,
    pointwise_product,
    pv_restrict,
    residual,
)
from .partition import AffineMap, AffinePartition, from_knots, uniform_partition

__version__ = "0.1.0"

__all__ = [
    "AffineMap",
    "AffinePartition",
    "AlignmentError",
    "CliffordFixedPointResult",
    "CliffordGridFunction",
    "CliffordRBParams",
    "ConvergenceError",
    "FixedPointResult",
    "GridFunction",
    "MAX_DIMENSION",
    "Multivector",
    "Paravector",
    "ParavectorMatrix",
    "Poly",
    "RBParams",
    "SpaceSpec",
    "blade_key",
    "blade_mul",
    "clifford_empirical_gamma",
    "clifford_fif_from_data",
    "clifford_fixed_point",
    "clifford_norm",
    "clifford_norm_F",
    "clifford_rb_apply",
    "conj",
    "empirical_gamma",
    "fif_from_data",
    "fixed_point",
    "from_knots",
    "gamma_gate",
    "mv_mul",
    "norm",
    "omega",
    "parse_blade_key",
    "pointwise_conj",
    "pointwise_product",
    "pv_project",
    "pv_restrict",
    "quaternion_mul",
    "rb_apply",
    "residual",
    "right_linear_apply",
    "sup_norm",
    "uniform_partition",
]
