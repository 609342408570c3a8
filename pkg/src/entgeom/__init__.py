"""Composite multipartite entanglement measures and their triangle/tetrahedron geometry."""

__version__ = "0.1.0"

from .bipartite import Kind, MeasureDescriptor, Strategy, as_measure, mixed_measure, pure_measure, wootters_concurrence
from .errors import (
    EntgeomError,
    FaceInequalityViolation,
    InfeasibleError,
    InputError,
    NotApplicable,
    NotATriangle,
    NumericalContractError,
)
from .geometry import (
    alpha_estimate,
    bip_triangle_4,
    cayley_menger_volume,
    gamma_star,
    tetra_from_tripartitions,
    tetra_of_state,
    triangle_check,
    triangle_geom,
)
from .partitions import Partition, canonical_label, coarse_grain, enumerate_partitions, parse_partition
from .qstate import DensityMatrix, Ensemble, PureState, haar_random_pure, make_pure_state, named_state, partial_trace
from .roof import RoofConfig, roof_minimize
from .tripartite import e123, edge_vector_3, ef3, eg123, f123, tau3

__all__ = [
    "Kind",
    "MeasureDescriptor",
    "Strategy",
    "as_measure",
    "mixed_measure",
    "pure_measure",
    "wootters_concurrence",
    "EntgeomError",
    "FaceInequalityViolation",
    "InfeasibleError",
    "InputError",
    "NotApplicable",
    "NotATriangle",
    "NumericalContractError",
    "alpha_estimate",
    "bip_triangle_4",
    "cayley_menger_volume",
    "gamma_star",
    "tetra_from_tripartitions",
    "tetra_of_state",
    "triangle_check",
    "triangle_geom",
    "Partition",
    "canonical_label",
    "coarse_grain",
    "enumerate_partitions",
    "parse_partition",
    "DensityMatrix",
    "Ensemble",
    "PureState",
    "haar_random_pure",
    "make_pure_state",
    "named_state",
    "partial_trace",
    "RoofConfig",
    "roof_minimize",
    "e123",
    "edge_vector_3",
    "ef3",
    "eg123",
    "f123",
    "tau3",
]
