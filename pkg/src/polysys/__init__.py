from .system import ParametricSystem, finite_difference_jacobians
from .slp import Expr, SLPSystem, parameters, square_root_system, unknowns
from .depth import DepthSystem, build_system, system_from_descriptor, unknown_count
from .synthetic import SyntheticInstance, conditioning_for, synthetic_instance
from .certify import (
    CertificateReport,
    certify_colorings,
    certify_minimal,
    minimal_classes,
    numerical_rank,
    tetra_det_residual,
)

__all__ = [
    "ParametricSystem",
    "finite_difference_jacobians",
    "Expr",
    "SLPSystem",
    "parameters",
    "square_root_system",
    "unknowns",
    "DepthSystem",
    "build_system",
    "system_from_descriptor",
    "unknown_count",
    "SyntheticInstance",
    "conditioning_for",
    "synthetic_instance",
    "CertificateReport",
    "certify_colorings",
    "certify_minimal",
    "minimal_classes",
    "numerical_rank",
    "tetra_det_residual",
]
