"""Lie group integrators on spheres and rotation groups, with error analysis."""

from ._core import (
    CoefficientField,
    ConfigError,
    ConvergenceError,
    DomainError,
    Point,
    SpaceDescriptor,
    act,
    bernoulli,
    commutator,
    constant_field,
    convergence_slope,
    dexpinv,
    forest_factorial,
    forests,
    geodesic_distance,
    global_error_table,
    hat,
    integrate,
    local_error_table,
    manifold_defect,
    mat_exp,
    mat_log,
    method_ids,
    method_order,
    reference_flow,
    run_experiment,
    sample_field,
    sample_point,
    step,
    uniform_grid,
    vee,
)

__version__ = "0.1.0"
