"""Variation of martingales of probabilities, its bounds, and repeated-game values."""

from .constructions import binary_walk, theorem2_witness, weiss_doubling
from .errors import (
    BudgetError,
    ConfigError,
    DomainError,
    MartvarError,
    SizeError,
    SolverError,
    UnsupportedError,
    ValidationError,
)
from .martingale import (
    ChainedMartingale,
    SplittingTree,
    bound_classical,
    bound_entropy,
    bound_logd,
    bound_per_coordinate,
    bound_trivial,
    certify,
    concat,
    pad,
    random_tree,
    tree_from_json,
    tree_to_json,
    validate,
    variation,
    variation_monte_carlo,
)
from .maxvar import ValueTable, concave_envelope, maxvar_binary, maxvar_ratio, witness_tree
from .prob_core import (
    BoundCertificate,
    Distribution,
    entropy,
    kl_divergence,
    l1_distance,
    pinsker,
    pinsker_variant,
    tensor,
)

__version__ = "0.1.0"
