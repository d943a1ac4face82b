from .coloring import (
    VIEW_PAIRS,
    Color,
    Coloring,
    EquationSelection,
    coloring_to_selection,
    point_pairs,
)
from .feasibility import (
    CSV_COLUMNS,
    FeasibilityRow,
    Status,
    available_equations,
    feasibility,
    feasibility_table,
    unknown_count,
)
from .isomorphism import (
    brute_force_isomorphic,
    classify,
    fingerprint,
    isomorphic,
    line_graph,
)
from .enumeration import (
    ClassCatalog,
    canonical_form,
    canonical_mask,
    coloring_to_mask,
    enumerate_catalog,
    enumerate_classes,
    mask_to_coloring,
)
from .relaxations import SHIPPED, ShippedRelaxation, shipped

__all__ = [
    "VIEW_PAIRS",
    "Color",
    "Coloring",
    "EquationSelection",
    "coloring_to_selection",
    "point_pairs",
    "CSV_COLUMNS",
    "FeasibilityRow",
    "Status",
    "available_equations",
    "feasibility",
    "feasibility_table",
    "unknown_count",
    "brute_force_isomorphic",
    "classify",
    "fingerprint",
    "isomorphic",
    "line_graph",
    "ClassCatalog",
    "canonical_form",
    "canonical_mask",
    "coloring_to_mask",
    "enumerate_catalog",
    "enumerate_classes",
    "mask_to_coloring",
    "SHIPPED",
    "ShippedRelaxation",
    "shipped",
]
