"""Implicit channel-flow time stepping with each linear solve posed as a QUBO.

The pipeline per time step: assemble the backward-Euler system, expand it to
binary unknowns with a fixed-point code, build the least-squares QUBO, sample
it, and collapse the samples into a real profile with a selection strategy.
"""

from .analysis import CenterDistribution, ErrorSeries, center_distribution, chebyshev_error, l2_error, linf_error
from .channel_flow import (
    FlowParams,
    LinearSystem,
    SolutionProfile,
    analytic_steady_profile,
    assemble_system,
    classical_solve,
    classical_trajectory,
    initial_profile,
    iterate_to_steady_state,
    step_classical,
)
from .exceptions import (
    CapacityError,
    ConfigurationError,
    EncodingRangeError,
    FormatError,
    QflowError,
    SingularSystemError,
)
from .experiment import RunConfig, RunResult, run_experiment, sweep
from .fixed_point import (
    FixedPointFormat,
    decode_scalar,
    decode_vector,
    encode_scalar,
    encode_vector,
    expand_matrix,
    max_value,
)
from .qubo import Qubo, build_qubo, embeddable_hint, eval_energy, logical_problem_size
from .samplers import SampleSet, SamplerConfig, exhaustive_minimum, merge, sample_annealing, sample_exhaustive
from .selection import Strategy, select, select_profile

__version__ = "0.1.0"
