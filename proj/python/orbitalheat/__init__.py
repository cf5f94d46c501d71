"""Orbit counting and heat kernels for Kleinian groups acting on H^3."""

from ._core import (
    OrbitBall,
    absorbed_return_series,
    ball_volume,
    decay_fit,
    dist,
    dp3_drho,
    enumerate_ball,
    gaussian_tail_check,
    injectivity_lower_bound,
    mixed_return_series,
    p3,
    p5,
    poincare_sup,
    quotient_kernel,
    set_thread_cap,
    spectral_bottom,
    star_return_series,
    stieltjes_residual,
)

__version__ = "0.1.0"

__all__ = [
    "OrbitBall",
    "absorbed_return_series",
    "ball_volume",
    "decay_fit",
    "dist",
    "dp3_drho",
    "enumerate_ball",
    "gaussian_tail_check",
    "injectivity_lower_bound",
    "mixed_return_series",
    "p3",
    "p5",
    "poincare_sup",
    "quotient_kernel",
    "set_thread_cap",
    "spectral_bottom",
    "star_return_series",
    "stieltjes_residual",
]
