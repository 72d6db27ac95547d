"""Exact divisor arithmetic on hyperelliptic curves."""

from .curve import (
    Divisor,
    HyperellipticCurve,
    MeromorphicFunction,
    Place,
    canonical_divisor,
    differential_divisor,
    divisor_of,
    order_at,
    polar_divisor,
    zero_divisor,
)
from .linear_series import (
    Pencil,
    PencilProbeReport,
    RiemannRochReport,
    h0,
    h0_of_doubled_pencil,
    hyperelliptic_pencil,
    linearly_equivalent,
    pencil_of,
    random_divisor,
    random_effective_divisor,
    riemann_roch_basis,
    riemann_roch_check,
    unique_pencil_probe,
)

__all__ = [
    "Divisor",
    "HyperellipticCurve",
    "MeromorphicFunction",
    "Pencil",
    "PencilProbeReport",
    "Place",
    "RiemannRochReport",
    "canonical_divisor",
    "differential_divisor",
    "divisor_of",
    "h0",
    "h0_of_doubled_pencil",
    "hyperelliptic_pencil",
    "linearly_equivalent",
    "order_at",
    "pencil_of",
    "polar_divisor",
    "random_divisor",
    "random_effective_divisor",
    "riemann_roch_basis",
    "riemann_roch_check",
    "unique_pencil_probe",
    "zero_divisor",
]
