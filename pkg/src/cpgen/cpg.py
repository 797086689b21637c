"""Motion library, runtime state, and the stepping loop.

This module wires the pieces together: named motions validated against one
set of output limits, a mutable runtime holding the active (possibly
tempo-rescaled) trajectory and oscillator state, online motion switching
that carries the state across unchanged, and a run loop that advances the
bounded oscillator through the compiled kernel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

import numpy as np

from . import _kernel
from .errors import NonFiniteState, NumericalSingularity, UnknownMotion
from .integrator import IntegratorConfig, Method, steps_for
from .oscillator import OscillatorParams, OscillatorState
from .trajectory import (
    Feasibility,
    OutputLimits,
    PeriodicTrajectory,
    check_feasibility,
    tempo_rescale,
)

__all__ = [
    "MotionEntry",
    "MotionLibrary",
    "CpgRuntime",
    "StepRecord",
    "init_from_robot",
    "make_runtime",
    "switch_motion",
    "run",
    "run_collect",
]

# Initialization projects out-of-range robot states this far inside the
# limits instead of erroring; a real robot can sit exactly on a bound.
_INIT_MARGIN = 1e-6


@dataclass(frozen=True)
class MotionEntry:
    """A stored motion: nominal trajectory plus its feasibility class."""

    trajectory: PeriodicTrajectory
    classification: Feasibility

    @property
    def nominal_period(self) -> float:
        return self.trajectory.period


class MotionLibrary:
    """Named motions, each validated against one set of output limits.

    Insertion rejects anything infeasible, so runtime code never sees a
    motion it cannot generate. Iteration order is insertion order.
    """

    def __init__(self, limits: OutputLimits):
        self.limits = limits
        self._entries: dict[str, MotionEntry] = {}

    def add(self, motion_id: str, traj: PeriodicTrajectory) -> Feasibility:
        """Validate and store a motion under a fresh id.

        Returns:
            The feasibility classification (STRICT or BOX_ONLY).

        Raises:
            ValueError: duplicate id, dimension mismatch, or an infeasible
                trajectory.
        """
        if not motion_id:
            raise ValueError("motion id must be a non-empty string")
        if motion_id in self._entries:
            raise ValueError(f"motion id already in library: {motion_id!r}")
        if traj.n != self.limits.n:
            raise ValueError(
                f"motion {motion_id!r} has n={traj.n}, limits have n={self.limits.n}"
            )
        report = check_feasibility(traj, self.limits)
        if report.classification is Feasibility.INFEASIBLE:
            raise ValueError(
                f"motion {motion_id!r} is infeasible against the output limits "
                f"(box margin {report.box_margin:.3g})"
            )
        self._entries[motion_id] = MotionEntry(traj, report.classification)
        return report.classification

    def get(self, motion_id: str) -> MotionEntry:
        try:
            return self._entries[motion_id]
        except KeyError:
            raise UnknownMotion(motion_id) from None

    def ids(self) -> list[str]:
        return list(self._entries)

    def items(self) -> Iterator[tuple[str, MotionEntry]]:
        return iter(self._entries.items())

    def __contains__(self, motion_id: str) -> bool:
        return motion_id in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def manifest(self) -> list[dict]:
        """Serializable listing for the service and UI.

        Includes the Fourier coefficients so a client can draw the desired
        curve without streaming it.
        """
        out = []
        for motion_id, entry in self._entries.items():
            traj = entry.trajectory
            out.append(
                {
                    "id": motion_id,
                    "n": traj.n,
                    "period": traj.period,
                    "classification": entry.classification.value,
                    "components": traj.to_json()["components"],
                }
            )
        return out


@dataclass
class CpgRuntime:
    """Everything the stepping loop owns.

    Single-writer: one loop advances the state; everyone else reads
    snapshots. ``violations`` counts post-step bound violations observed by
    the kernel (zero on any healthy run).
    """

    limits: OutputLimits
    params: OscillatorParams
    library: MotionLibrary
    active_motion: str
    active_trajectory: PeriodicTrajectory
    state: OscillatorState
    t: float = 0.0
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    violations: int = 0


@dataclass(frozen=True)
class StepRecord:
    """One row emitted to a run sink (state before the step)."""

    t: float
    phi: float
    s1: np.ndarray
    s2: np.ndarray
    y: np.ndarray
    ydot: np.ndarray
    f: np.ndarray
    fp: np.ndarray
    v3: float
    dphi: float

    @classmethod
    def from_row(cls, row: np.ndarray, n: int) -> "StepRecord":
        return cls(
            t=float(row[0]),
            phi=float(row[1]),
            s1=row[2 : 2 + n].copy(),
            s2=row[2 + n : 2 + 2 * n].copy(),
            y=row[2 + 2 * n : 2 + 3 * n].copy(),
            ydot=row[2 + 3 * n : 2 + 4 * n].copy(),
            f=row[2 + 4 * n : 2 + 5 * n].copy(),
            fp=row[2 + 5 * n : 2 + 6 * n].copy(),
            v3=float(row[2 + 6 * n]),
            dphi=float(row[2 + 6 * n + 1]),
        )


def init_from_robot(
    y0, ydot0, phi0: float, limits: OutputLimits
) -> OscillatorState:
    """Shape state whose output matches the robot's current pose.

    Out-of-range inputs are projected just inside the limits (relative
    margin 1e-6) rather than rejected; the phase is taken as given.
    """
    y0 = np.atleast_1d(np.asarray(y0, dtype=float))
    ydot0 = np.atleast_1d(np.asarray(ydot0, dtype=float))
    if y0.shape != (limits.n,) or ydot0.shape != (limits.n,):
        raise ValueError(
            f"y0 and ydot0 must have shape ({limits.n},), got {y0.shape} and {ydot0.shape}"
        )
    dy = limits.delta_y
    dv = limits.delta_ydot
    span = (1.0 - _INIT_MARGIN) * dy
    dev = np.clip(y0 - limits.y_avg, -span, span)
    rate = np.clip(ydot0, -(1.0 - _INIT_MARGIN) * dv, (1.0 - _INIT_MARGIN) * dv)
    s1 = np.arctanh(dev / dy)
    s2 = np.arctanh(rate / dv)
    return OscillatorState(s1=s1, s2=s2, phi=float(phi0))


def make_runtime(
    library: MotionLibrary,
    params: OscillatorParams,
    motion: str,
    period: Optional[float] = None,
    state: Optional[OscillatorState] = None,
    integrator: Optional[IntegratorConfig] = None,
    t: float = 0.0,
) -> CpgRuntime:
    """Assemble a runtime with the given motion active.

    Raises:
        UnknownMotion, PeriodTooShort: from the motion lookup and rescale.
        ValueError: parameter/limits dimension mismatch.
    """
    limits = library.limits
    if params.n != limits.n:
        raise ValueError(f"params have n={params.n}, limits have n={limits.n}")
    entry = library.get(motion)
    target_period = entry.nominal_period if period is None else float(period)
    traj = tempo_rescale(entry.trajectory, target_period, limits)
    if state is None:
        state = init_from_robot(limits.y_avg, np.zeros(limits.n), 0.0, limits)
    if state.n != limits.n:
        raise ValueError(f"state has n={state.n}, limits have n={limits.n}")
    return CpgRuntime(
        limits=limits,
        params=params,
        library=library,
        active_motion=motion,
        active_trajectory=traj,
        state=state,
        t=float(t),
        integrator=integrator if integrator is not None else IntegratorConfig(),
    )


def switch_motion(
    rt: CpgRuntime, motion_id: str, period: Optional[float] = None
) -> CpgRuntime:
    """Swap the active motion and period; the state is carried unchanged.

    Because the output depends only on the state, y and ydot are continuous
    across the switch; only the target curve moves.

    Raises:
        UnknownMotion: id not in the library.
        PeriodTooShort: requested tempo violates a rate bound.
    """
    entry = rt.library.get(motion_id)
    target_period = entry.nominal_period if period is None else float(period)
    rt.active_trajectory = tempo_rescale(entry.trajectory, target_period, rt.limits)
    rt.active_motion = motion_id
    return rt


def _traj_arrays(traj: PeriodicTrajectory):
    dc = np.ascontiguousarray(traj.dc)
    ca = np.ascontiguousarray(traj.cos_coeffs)
    sa = np.ascontiguousarray(traj.sin_coeffs)
    omega = 2.0 * np.pi / traj.period
    return dc, ca, sa, omega


def _advance(
    rt: CpgRuntime, nsteps: int, record_stride: int, emit_final: bool
) -> np.ndarray:
    """Drive the kernel for nsteps, updating rt in place.

    Returns the written record rows (possibly empty). Raises on the kernel
    status codes.
    """
    n = rt.limits.n
    width = _kernel.record_width(n)
    if record_stride > 0 and nsteps >= 0:
        max_rows = (nsteps + record_stride - 1) // record_stride + (1 if emit_final else 0)
    else:
        max_rows = 0
    records = np.empty((max_rows, width))
    if nsteps <= 0:
        return records[:0]

    dc, ca, sa, omega = _traj_arrays(rt.active_trajectory)
    s1 = rt.state.s1.copy()
    s2 = rt.state.s2.copy()
    status, steps_done, p_acc, t_acc, violations, rows = _kernel.run_bounded(
        dc, ca, sa, omega,
        rt.limits.y_avg, rt.limits.delta_y, rt.limits.delta_ydot,
        rt.params.b, rt.params.k, rt.params.d,
        rt.params.gamma, rt.params.sat_sharpness,
        s1, s2, rt.state.phi, rt.t,
        rt.integrator.step_h, nsteps, rt.integrator.method is Method.EULER,
        records, record_stride, emit_final,
    )
    rt.violations += int(violations)
    phi = rt.state.phi + p_acc
    t = rt.t + t_acc
    if status == _kernel.STATUS_NONFINITE:
        raise NonFiniteState(
            f"state went non-finite after step {steps_done} (t={t:.6g})",
            snapshot={"t": t, "phi": phi, "s1": s1.copy(), "s2": s2.copy()},
        )
    if status == _kernel.STATUS_SINGULAR:
        raise NumericalSingularity(
            f"transform Jacobian underflow after step {steps_done} (t={t:.6g})"
        )
    rt.state = OscillatorState(s1=s1, s2=s2, phi=phi)
    rt.t = t
    return records[:rows]


def run(
    rt: CpgRuntime,
    duration: float,
    sink: Optional[Callable[[StepRecord], None]] = None,
) -> CpgRuntime:
    """Advance the runtime by a duration, optionally streaming records.

    The sink, when given, receives one StepRecord per step (state before
    the step) plus a terminal record, so a run of N steps emits N+1 rows.
    Zero duration emits nothing and changes nothing.

    Raises:
        NonFiniteState, NumericalSingularity: from the kernel.
    """
    if duration < 0:
        raise ValueError("duration must be >= 0")
    nsteps = steps_for(duration, rt.integrator.step_h)
    if sink is None:
        _advance(rt, nsteps, record_stride=0, emit_final=False)
        return rt
    rows = _advance(rt, nsteps, record_stride=1, emit_final=True)
    n = rt.limits.n
    for row in rows:
        sink(StepRecord.from_row(row, n))
    return rt


def run_collect(
    rt: CpgRuntime,
    duration: float,
    record_stride: int = 1,
    emit_final: bool = True,
) -> np.ndarray:
    """Advance and return raw record rows (kernel layout, width 6n+4).

    A duration of N full steps yields N/stride pre-step rows plus one
    terminal row when emit_final. Zero duration yields an empty array.
    """
    if duration < 0:
        raise ValueError("duration must be >= 0")
    nsteps = steps_for(duration, rt.integrator.step_h)
    if nsteps == 0:
        return np.empty((0, _kernel.record_width(rt.limits.n)))
    return _advance(rt, nsteps, record_stride, emit_final)
