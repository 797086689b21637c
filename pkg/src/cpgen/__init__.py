"""Limit-cycle trajectory generation with hard output bounds.

A desired periodic joint trajectory (truncated Fourier series) is encoded
as the globally attractive solution of a programmable oscillator. The
bounded-output variant guarantees position and rate limits for any finite
state, supports online motion and tempo switching with state continuity,
and exposes a phase-coupling gain that trades time-locked tracking (gamma
= 0) against convergence to the orbit regardless of timing (large gamma).
"""

from .analysis import (
    errors_from_records,
    lyapunov_v1,
    lyapunov_v3,
    orbital_distance,
    orbital_distance_unbounded,
    phase_distance_gradient,
)
from .cpg import (
    CpgRuntime,
    MotionEntry,
    MotionLibrary,
    StepRecord,
    init_from_robot,
    make_runtime,
    run,
    run_collect,
    switch_motion,
)
from .errors import (
    BoundaryViolation,
    CpgenError,
    NonFiniteState,
    NumericalSingularity,
    PeriodTooShort,
    ScenarioError,
    UnknownMotion,
)
from .integrator import IntegratorConfig, Method, step, steps_for
from .oscillator import (
    OscillatorParams,
    OscillatorState,
    ShapeDerivatives,
    TransformedTarget,
    bounded_rhs,
    inverse_transform,
    output_map,
    output_rate,
    sat_hat,
    transformed_target,
    unbounded_rhs,
)
from .scenario import (
    InitConditions,
    RunResult,
    Scenario,
    TimelineEvent,
    build_library,
    build_runtime,
    execute,
    load_scenario,
)
from .trajectory import (
    Feasibility,
    FeasibilityReport,
    OutputLimits,
    PeriodicTrajectory,
    check_feasibility,
    min_admissible_period,
    tempo_rescale,
)

__version__ = "0.1.0"

__all__ = [
    "BoundaryViolation",
    "CpgRuntime",
    "CpgenError",
    "Feasibility",
    "FeasibilityReport",
    "InitConditions",
    "IntegratorConfig",
    "Method",
    "MotionEntry",
    "MotionLibrary",
    "NonFiniteState",
    "NumericalSingularity",
    "OscillatorParams",
    "OscillatorState",
    "OutputLimits",
    "PeriodTooShort",
    "PeriodicTrajectory",
    "RunResult",
    "Scenario",
    "ScenarioError",
    "ShapeDerivatives",
    "StepRecord",
    "TimelineEvent",
    "TransformedTarget",
    "UnknownMotion",
    "bounded_rhs",
    "build_library",
    "build_runtime",
    "check_feasibility",
    "errors_from_records",
    "execute",
    "init_from_robot",
    "inverse_transform",
    "load_scenario",
    "lyapunov_v1",
    "lyapunov_v3",
    "make_runtime",
    "min_admissible_period",
    "orbital_distance",
    "orbital_distance_unbounded",
    "output_map",
    "output_rate",
    "phase_distance_gradient",
    "run",
    "run_collect",
    "sat_hat",
    "step",
    "steps_for",
    "switch_motion",
    "tempo_rescale",
    "transformed_target",
    "unbounded_rhs",
]
