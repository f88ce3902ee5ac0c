"""Finite information domains, measurements, and spin-1/2 measurement contexts."""

from .classical import (
    BitDomainSpec,
    PuzzleState,
    Trajectory,
    determinism_threshold,
    full_class,
    is_bit_domain,
    periodic_class,
    place_piece,
    predict_message,
    puzzle_entropy,
)
from .errors import CtxDomError
from .experiments import Policy, entropy_growth, record_entropy, second_law_report
from .info import (
    ProbVector,
    bayesian_leq,
    is_monotone_measurement,
    reflects_max,
    shannon_entropy,
    success_probability,
)
from .order import (
    FiniteDomain,
    MeasurementMap,
    PosetSpec,
    approximation_transitivity_check,
    downset,
    is_dcpo,
    is_directed,
    maximal_elements,
    orthogonal,
    supremum,
    upset,
    validate_poset,
    way_below,
)
from .quantum import (
    Context,
    DensityMatrix,
    OutcomeRecord,
    PureState,
    SpinAxis,
    born_probabilities,
    chain_distribution,
    classical_projection,
    collapse,
    context_from_axis,
    context_overlap,
    reset_demonstration,
    run_chain,
    von_neumann_entropy,
)

__version__ = "0.1.0"
