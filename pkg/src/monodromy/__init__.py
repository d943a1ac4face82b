from .solutions import SolutionSet, dedup, filter_physical, flip_view_depths
from .solver import MonodromySettings, monodromy_solve, random_parameters, reanchor, seed_pair
from .bundle import StartBundle, complex_to_pairs, load_bundle, pairs_to_complex

__all__ = [
    "SolutionSet",
    "dedup",
    "filter_physical",
    "flip_view_depths",
    "MonodromySettings",
    "monodromy_solve",
    "random_parameters",
    "reanchor",
    "seed_pair",
    "StartBundle",
    "complex_to_pairs",
    "load_bundle",
    "pairs_to_complex",
]
