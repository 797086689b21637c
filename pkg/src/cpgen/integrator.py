"""Fixed-step explicit integration with post-step sanity enforcement.

The downstream service streams at a fixed control rate, so there is no
adaptive stepping; RK4 at h=1e-3 holds the Lyapunov-monotonicity tolerance
for the stiffest gain sets in use. Euler exists for convergence-order tests.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteState
from .oscillator import OscillatorState, ShapeDerivatives

__all__ = ["Method", "IntegratorConfig", "step", "steps_for"]


class Method(enum.Enum):
    RK4 = "rk4"
    EULER = "euler"


@dataclass(frozen=True)
class IntegratorConfig:
    """Step size and scheme.

    Attributes:
        step_h: step in seconds, in (0, 0.1].
        method: RK4 (default) or EULER.
    """

    step_h: float = 1e-3
    method: Method = Method.RK4

    def __post_init__(self):
        h = float(self.step_h)
        if not (0.0 < h <= 0.1) or not math.isfinite(h):
            raise ValueError("step_h must be in (0, 0.1]")
        object.__setattr__(self, "step_h", h)
        if not isinstance(self.method, Method):
            object.__setattr__(self, "method", Method(self.method))


def steps_for(duration: float, step_h: float) -> int:
    """Number of whole steps covering a duration (guarding 0.12/1e-3 style
    float quotients that land one ulp under an integer)."""
    if duration < 0:
        raise ValueError("duration must be >= 0")
    return int(math.floor(duration / step_h + 1e-9))


def _make_state(s1: np.ndarray, s2: np.ndarray, phi: float, t: float) -> OscillatorState:
    if not (
        np.all(np.isfinite(s1)) and np.all(np.isfinite(s2)) and math.isfinite(phi)
    ):
        raise NonFiniteState(
            f"non-finite state at t={t:.6g}",
            snapshot={"s1": np.array(s1), "s2": np.array(s2), "phi": phi},
        )
    return OscillatorState(s1, s2, phi)


def step(rhs, state: OscillatorState, t: float, cfg: IntegratorConfig) -> OscillatorState:
    """Advance one step of the joint (s1, s2, phi) system.

    Args:
        rhs: callable (state, time) -> ShapeDerivatives.
        state: current state.
        t: current time (passed through to rhs; the dynamics are autonomous
            but the signature keeps time explicit).
        cfg: step size and scheme.

    Raises:
        NonFiniteState: if any component is NaN/inf after (or during) the
            update; carries a snapshot for diagnostics.
    """
    h = cfg.step_h
    d1: ShapeDerivatives = rhs(state, t)
    if cfg.method is Method.EULER:
        return _make_state(
            state.s1 + h * d1.ds1,
            state.s2 + h * d1.ds2,
            state.phi + h * d1.dphi,
            t + h,
        )
    half = 0.5 * h
    mid1 = _make_state(
        state.s1 + half * d1.ds1, state.s2 + half * d1.ds2,
        state.phi + half * d1.dphi, t,
    )
    d2 = rhs(mid1, t + half)
    mid2 = _make_state(
        state.s1 + half * d2.ds1, state.s2 + half * d2.ds2,
        state.phi + half * d2.dphi, t,
    )
    d3 = rhs(mid2, t + half)
    end = _make_state(
        state.s1 + h * d3.ds1, state.s2 + h * d3.ds2,
        state.phi + h * d3.dphi, t,
    )
    d4 = rhs(end, t + h)
    # /6 folded into the stage sum: a unit dphi advances phi by exactly h.
    return _make_state(
        state.s1 + h * ((d1.ds1 + 2.0 * (d2.ds1 + d3.ds1) + d4.ds1) / 6.0),
        state.s2 + h * ((d1.ds2 + 2.0 * (d2.ds2 + d3.ds2) + d4.ds2) / 6.0),
        state.phi + h * ((d1.dphi + 2.0 * (d2.dphi + d3.dphi) + d4.dphi) / 6.0),
        t + h,
    )
