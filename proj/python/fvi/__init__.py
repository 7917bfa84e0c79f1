"""Fractional variational integrators with BDF convolution quadrature."""

from ._core import (
    DimensionError,
    Error,
    InvalidConfigurationError,
    InvalidOrderError,
    NewtonFailure,
    NumericalDegeneracyError,
    OrderReport,
    StepFailure,
    bdf_generating_polynomial,
    conv_left,
    conv_right,
    convergence,
    corrected_conv_left,
    cq_weights,
    fit_order,
    gamma,
    model_ids,
    rl_integral_monomial,
    rl_integral_sin_power,
    run,
    saturation,
    starting_quadrature,
)

__all__ = [name for name in dir() if not name.startswith("_")]
