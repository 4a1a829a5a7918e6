"""Bell-inequality violation versus concurrence for two qubits in non-Markovian reservoirs."""

__version__ = "0.1.0"

from .bell import (
    AngleSet,
    PQPair,
    b_fix,
    b_max_horodecki,
    b_max_x,
    chsh,
    chsh_signed,
    correlation,
    correlation_tensor,
    fixed_angles,
    optimal_angles,
    polarizer_angles,
    pq,
)
from .channel import (
    BellLikeState,
    Family,
    ReservoirParams,
    XStateMatrix,
    decay_amplitude,
    decay_probability,
    decay_probability_markovian,
    evolve,
    evolve_at_time,
    evolve_many,
    kraus_operators,
)
from .entanglement import concurrence_general, concurrence_x, validate_density_matrix
from .errors import DegenerateStateError, DomainError, NoCrossingError, NumericalError, ResolutionError
from .islands import (
    BellIsland,
    MaxThreshold,
    RelativeErrorProfile,
    SweepRow,
    ThresholdResult,
    concurrence_threshold,
    default_time_grid,
    find_islands,
    max_threshold,
    relative_error_profile,
    sweep,
    threshold_crossing,
)
