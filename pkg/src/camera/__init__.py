from .intrinsics import (
    OMEGA_PARAM_NAMES,
    Intrinsics,
    OmegaParams,
    build_k,
    cleared_omega,
    intrinsics_from_k,
    k_candidates,
    k_inverse,
    omega_direct,
    omega_from_params,
    omega_params_of,
)
from .spec import ALL_KNOWN, ALL_UNKNOWN, IntrinsicsSpec, Slot, SlotKind, all_masks, known
from .normalization import (
    NormalizationRecord,
    NormalizationStep,
    denormalize_intrinsics,
    normalize_intrinsics,
    normalize_observations,
)

__all__ = [
    "OMEGA_PARAM_NAMES",
    "Intrinsics",
    "OmegaParams",
    "build_k",
    "cleared_omega",
    "intrinsics_from_k",
    "k_candidates",
    "k_inverse",
    "omega_direct",
    "omega_from_params",
    "omega_params_of",
    "ALL_KNOWN",
    "ALL_UNKNOWN",
    "IntrinsicsSpec",
    "Slot",
    "SlotKind",
    "all_masks",
    "known",
    "NormalizationRecord",
    "NormalizationStep",
    "denormalize_intrinsics",
    "normalize_intrinsics",
    "normalize_observations",
]
