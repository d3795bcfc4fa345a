"""Invariants of polarized weighted graphs, tropical moments of lattices and
theta-function numerics for degenerating abelian varieties."""

from .errors import (
    IdentityViolation,
    InputError,
    NumericalError,
    SlopelabError,
)
from .graph import (
    Edge,
    PolarizedGraph,
    Vertex,
    blocks,
    canonical_divisor,
    contract_all_but,
    edge_profile,
    genus,
    is_stable,
    is_two_connected,
    minimal_model,
    validate,
)
from .invariants import (
    epsilon,
    lambda_direct,
    lambda_from_slope,
    phi,
    report,
    sigma,
    slope,
    slope_bridgeless,
)
from .jump import classify_vanishing, height_jump, jump_crosscheck
from .laplace import (
    GraphMeasure,
    admissible_measure,
    canonical_measure,
    effective_resistance,
    foster,
    green_function,
    j_function,
    tau,
)
from .tropical import (
    GramLattice,
    cycle_gram,
    jac_moment,
    moment,
    moment_over,
    relevant_vectors,
    voronoi_cell,
)

__version__ = "0.1.0"

__all__ = [
    "IdentityViolation",
    "InputError",
    "NumericalError",
    "SlopelabError",
    "Edge",
    "PolarizedGraph",
    "Vertex",
    "blocks",
    "canonical_divisor",
    "contract_all_but",
    "edge_profile",
    "genus",
    "is_stable",
    "is_two_connected",
    "minimal_model",
    "validate",
    "epsilon",
    "lambda_direct",
    "lambda_from_slope",
    "phi",
    "report",
    "sigma",
    "slope",
    "slope_bridgeless",
    "classify_vanishing",
    "height_jump",
    "jump_crosscheck",
    "GraphMeasure",
    "admissible_measure",
    "canonical_measure",
    "effective_resistance",
    "foster",
    "green_function",
    "j_function",
    "tau",
    "GramLattice",
    "cycle_gram",
    "jac_moment",
    "moment",
    "moment_over",
    "relevant_vectors",
    "voronoi_cell",
]
