"""Exception types shared across the engine."""


class CpgenError(Exception):
    """Base class for all engine errors."""


class BoundaryViolation(CpgenError):
    """A desired point touches or exceeds the open output box."""


class PeriodTooShort(CpgenError):
    """Requested period would push the desired rate past its limit.

    Attributes:
        min_period: smallest admissible period for the trajectory/limits pair.
    """

    def __init__(self, requested: float, min_period: float):
        self.requested = float(requested)
        self.min_period = float(min_period)
        super().__init__(
            f"period {requested:g} s too short; must exceed {min_period:.6g} s"
        )


class NumericalSingularity(CpgenError):
    """A transform Jacobian underflowed; the state escaped to extreme values.

    This is a bug trap, not a recoverable condition: bounded dynamics should
    never drive the shape states far enough for sech^2 to underflow.
    """


class NonFiniteState(CpgenError):
    """NaN or inf appeared in the state after an integration step."""

    def __init__(self, message: str, snapshot=None):
        self.snapshot = snapshot
        super().__init__(message)


class UnknownMotion(CpgenError, KeyError):
    """Motion id not present in the library."""

    def __init__(self, motion_id: str):
        self.motion_id = motion_id
        super().__init__(motion_id)

    def __str__(self) -> str:
        return f"unknown motion: {self.motion_id!r}"


class ScenarioError(CpgenError):
    """A scenario or trajectory file failed validation."""
