"""Magnitude, weightings and positive definiteness of finite metric spaces,
with exact rational arithmetic."""
from .core import (FiniteMetricSpace, SimilaritySpace, Subspace, Weighting, determinant,
                   from_distances, is_positive_definite, leading_principal_minors, magnitude,
                   magnitude_telescoped, restrict, validate_similarity, weighting)
from .errors import (ConstructionError, MetricMagError, RangeError, SingularityError,
                     TriangleError, ValidationError)
from .fourpoint import bounds4, classify_case, decomposition4, verify_positivity_campaign
from .homology import boundary_matrix, length_spectrum, magnitude_homology
from .inclexcl import (bordered_determinant, check_conditions, comparison_report, defect,
                       general_b0, general_b_minus, glue_at_b0, pair_decomposition)
from .spacegen import GeneratorConfig, find_non_posdef_5pt, random_similarity

__version__ = "0.1.0"

__all__ = [
    "FiniteMetricSpace", "SimilaritySpace", "Subspace", "Weighting", "determinant",
    "from_distances", "is_positive_definite", "leading_principal_minors", "magnitude",
    "magnitude_telescoped", "restrict", "validate_similarity", "weighting",
    "ConstructionError", "MetricMagError", "RangeError", "SingularityError", "TriangleError",
    "ValidationError", "bounds4", "classify_case", "decomposition4",
    "verify_positivity_campaign", "boundary_matrix", "length_spectrum", "magnitude_homology",
    "bordered_determinant", "check_conditions", "comparison_report", "defect", "general_b0",
    "general_b_minus", "glue_at_b0", "pair_decomposition", "GeneratorConfig",
    "find_non_posdef_5pt", "random_similarity",
]
