"""Fused Winograd convolution engines, transforms and cache planning."""

from ._core import (
    AllocationError,
    Error,
    InvalidDimension,
    InvalidParameter,
    LayerSpec,
    ParseError,
    ShapeMismatch,
    bench,
    buffer_layout,
    conv2d,
    l2_element_budget,
    make_basis,
    plan,
    r_lower_bound,
    r_upper_bound,
    verify_case,
)

__all__ = [
    "AllocationError",
    "Error",
    "InvalidDimension",
    "InvalidParameter",
    "LayerSpec",
    "ParseError",
    "ShapeMismatch",
    "bench",
    "buffer_layout",
    "conv2d",
    "l2_element_budget",
    "make_basis",
    "plan",
    "r_lower_bound",
    "r_upper_bound",
    "verify_case",
]
