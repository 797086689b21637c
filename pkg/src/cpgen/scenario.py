"""Scenario files: one JSON document describing a complete run.

Schema (all payloads UTF-8 JSON):

    {
      "limits":     {"y_min": [...], "y_max": [...], "delta_ydot": [...]},
      "params":     {"b": 15.0 | [...], "k": ..., "d": ...,
                     "gamma": 10.0, "p": 100.0},
      "integrator": {"h": 0.001, "method": "rk4"},
      "motions":    {"walk": "motions/walk.json", "stand": { ...inline... }},
      "timeline":   [{"t": 0.0, "motion": "walk", "period": 2.0}, ...],
      "init":       {"y0": [...], "ydot0": [...], "phi0": 0.0},
      "duration":   120.0
    }

Scalar gains broadcast to every joint. Motion values are either a path to a
trajectory file (relative paths resolve against the scenario file) or the
trajectory object inline. "integrator", "init", event "period", "gamma" and
"p" are optional with the documented defaults. Timeline events must start
at t=0 when the duration is positive, be strictly increasing, and fall
inside the duration; an empty timeline is only valid with duration 0.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import _kernel
from .analysis import errors_from_records, lyapunov_v3
from .cpg import (
    CpgRuntime,
    MotionLibrary,
    _advance,
    init_from_robot,
    make_runtime,
    switch_motion,
)
from .errors import ScenarioError
from .integrator import IntegratorConfig, steps_for
from .oscillator import OscillatorParams, OscillatorState, output_map, transformed_target
from .trajectory import OutputLimits, PeriodicTrajectory

__all__ = [
    "TimelineEvent",
    "InitConditions",
    "Scenario",
    "RunResult",
    "load_scenario",
    "build_library",
    "build_runtime",
    "execute",
]

# Convergence bookkeeping threshold on ||e1||; reported in summaries and
# used by the gamma-comparison runs.
E1_CONVERGENCE_THRESHOLD = 0.05


@dataclass(frozen=True)
class TimelineEvent:
    t: float
    motion: str
    period: Optional[float] = None


@dataclass(frozen=True)
class InitConditions:
    y0: Optional[np.ndarray] = None
    ydot0: Optional[np.ndarray] = None
    phi0: float = 0.0


@dataclass(frozen=True)
class Scenario:
    """Validated scenario; building one from JSON is the only entry point."""

    limits: OutputLimits
    params: OscillatorParams
    integrator: IntegratorConfig
    motions: dict[str, PeriodicTrajectory]
    timeline: tuple[TimelineEvent, ...]
    init: InitConditions
    duration: float
    name: str = "scenario"


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise ScenarioError(f"{where}: missing required key {key!r}")
    return obj[key]


def _gain_vector(value, n: int, where: str) -> np.ndarray:
    if isinstance(value, (int, float)):
        return np.full(n, float(value))
    try:
        arr = np.asarray([float(v) for v in value], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"{where}: expected a number or list of numbers") from exc
    if arr.shape != (n,):
        raise ScenarioError(f"{where}: expected {n} entries, got {arr.shape[0]}")
    return arr


def _parse_params(obj: dict, n: int) -> OscillatorParams:
    where = "params"
    if not isinstance(obj, dict):
        raise ScenarioError(f"{where}: must be an object")
    try:
        return OscillatorParams(
            b=_gain_vector(_require(obj, "b", where), n, f"{where}.b"),
            k=_gain_vector(_require(obj, "k", where), n, f"{where}.k"),
            d=_gain_vector(_require(obj, "d", where), n, f"{where}.d"),
            gamma=float(obj.get("gamma", 0.0)),
            sat_sharpness=float(obj.get("p", 100.0)),
        )
    except ValueError as exc:
        raise ScenarioError(f"{where}: {exc}") from exc


def _parse_integrator(obj) -> IntegratorConfig:
    if obj is None:
        return IntegratorConfig()
    if not isinstance(obj, dict):
        raise ScenarioError("integrator: must be an object")
    try:
        return IntegratorConfig(
            step_h=float(obj.get("h", 1e-3)),
            method=obj.get("method", "rk4"),
        )
    except ValueError as exc:
        raise ScenarioError(f"integrator: {exc}") from exc


def _parse_motions(obj, base_dir: Path, n: int) -> dict[str, PeriodicTrajectory]:
    if not isinstance(obj, dict) or not obj:
        raise ScenarioError("motions: must be a non-empty object")
    motions: dict[str, PeriodicTrajectory] = {}
    for motion_id, value in obj.items():
        where = f"motions.{motion_id}"
        if isinstance(value, str):
            path = Path(value)
            if not path.is_absolute():
                path = base_dir / path
            if not path.exists():
                raise ScenarioError(f"{where}: trajectory file not found: {path}")
            traj = PeriodicTrajectory.load(path)
        elif isinstance(value, dict):
            traj = PeriodicTrajectory.from_json(value)
        else:
            raise ScenarioError(f"{where}: must be a file path or trajectory object")
        if traj.n != n:
            raise ScenarioError(f"{where}: has n={traj.n}, limits have n={n}")
        motions[motion_id] = traj
    return motions


def _parse_timeline(obj, motions: dict, duration: float, h: float):
    if obj is None:
        obj = []
    if not isinstance(obj, list):
        raise ScenarioError("timeline: must be a list")
    events = []
    prev_t = -math.inf
    for idx, item in enumerate(obj):
        where = f"timeline[{idx}]"
        if not isinstance(item, dict):
            raise ScenarioError(f"{where}: must be an object")
        try:
            t = float(_require(item, "t", where))
            motion = str(_require(item, "motion", where))
        except (TypeError, ValueError) as exc:
            raise ScenarioError(f"{where}: {exc}") from exc
        period = item.get("period")
        if period is not None:
            period = float(period)
            if not (period > 0 and math.isfinite(period)):
                raise ScenarioError(f"{where}: period must be positive")
        if not (t >= 0 and math.isfinite(t)):
            raise ScenarioError(f"{where}: t must be finite and >= 0")
        if t <= prev_t:
            raise ScenarioError(f"{where}: event times must be strictly increasing")
        if motion not in motions:
            raise ScenarioError(f"{where}: unknown motion {motion!r}")
        if duration > 0 and round(t / h) >= steps_for(duration, h):
            raise ScenarioError(f"{where}: event at t={t} is at or beyond the duration")
        prev_t = t
        events.append(TimelineEvent(t=t, motion=motion, period=period))
    if duration > 0:
        if not events:
            raise ScenarioError("timeline: must not be empty when duration > 0")
        if events[0].t != 0.0:
            raise ScenarioError("timeline: first event must be at t=0")
    return tuple(events)


def _parse_init(obj, n: int) -> InitConditions:
    if obj is None:
        return InitConditions()
    if not isinstance(obj, dict):
        raise ScenarioError("init: must be an object")

    def vec(key):
        if key not in obj or obj[key] is None:
            return None
        arr = np.asarray([float(v) for v in obj[key]], dtype=float)
        if arr.shape != (n,):
            raise ScenarioError(f"init.{key}: expected {n} entries")
        return arr

    try:
        return InitConditions(
            y0=vec("y0"), ydot0=vec("ydot0"), phi0=float(obj.get("phi0", 0.0))
        )
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"init: {exc}") from exc


def scenario_from_json(obj: dict, base_dir: Path, name: str = "scenario") -> Scenario:
    if not isinstance(obj, dict):
        raise ScenarioError("scenario: top level must be an object")
    limits = OutputLimits.from_json(_require(obj, "limits", "scenario"))
    params = _parse_params(_require(obj, "params", "scenario"), limits.n)
    integrator = _parse_integrator(obj.get("integrator"))
    motions = _parse_motions(_require(obj, "motions", "scenario"), base_dir, limits.n)
    duration = float(obj.get("duration", 0.0))
    if not (duration >= 0 and math.isfinite(duration)):
        raise ScenarioError("duration: must be finite and >= 0")
    timeline = _parse_timeline(
        obj.get("timeline"), motions, duration, integrator.step_h
    )
    init = _parse_init(obj.get("init"), limits.n)
    return Scenario(
        limits=limits,
        params=params,
        integrator=integrator,
        motions=motions,
        timeline=timeline,
        init=init,
        duration=duration,
        name=name,
    )


def load_scenario(path) -> Scenario:
    """Parse and validate a scenario file.

    Raises:
        ScenarioError: anything wrong with the document, with a pointer to
            the offending field.
    """
    path = Path(path)
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: invalid JSON: {exc}") from exc
    return scenario_from_json(obj, path.parent, name=path.stem)


def build_library(sc: Scenario) -> MotionLibrary:
    """Motion library for the scenario; insertion re-checks feasibility."""
    lib = MotionLibrary(sc.limits)
    for motion_id, traj in sc.motions.items():
        try:
            lib.add(motion_id, traj)
        except ValueError as exc:
            raise ScenarioError(str(exc)) from exc
    return lib


def _initial_state(sc: Scenario) -> OscillatorState:
    y0 = sc.init.y0 if sc.init.y0 is not None else sc.limits.y_avg
    ydot0 = sc.init.ydot0 if sc.init.ydot0 is not None else np.zeros(sc.limits.n)
    return init_from_robot(y0, ydot0, sc.init.phi0, sc.limits)


def build_runtime(sc: Scenario, gamma_override: Optional[float] = None) -> CpgRuntime:
    """Runtime positioned at the first timeline event.

    Raises:
        ScenarioError: empty timeline (nothing to activate).
    """
    if not sc.timeline:
        raise ScenarioError("scenario has an empty timeline; nothing to run")
    params = sc.params
    if gamma_override is not None:
        params = replace(params, gamma=float(gamma_override))
    first = sc.timeline[0]
    try:
        return make_runtime(
            build_library(sc),
            params,
            motion=first.motion,
            period=first.period,
            state=_initial_state(sc),
            integrator=sc.integrator,
        )
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc


@dataclass
class RunResult:
    """Records (kernel row layout), a JSON-ready summary, and the runtime."""

    records: np.ndarray
    summary: dict
    runtime: Optional[CpgRuntime]


def _final_block(rt: CpgRuntime) -> dict:
    tt = transformed_target(rt.active_trajectory, rt.limits, rt.params, rt.state)
    f, _, _ = rt.active_trajectory.evaluate(rt.state.phi)
    y = output_map(rt.state.s1, rt.limits)
    return {
        "t": rt.t,
        "phi": rt.state.phi,
        "delta_phi_minus_t": rt.state.phi - rt.t,
        "motion": rt.active_motion,
        "period": rt.active_trajectory.period,
        "e1_norm": float(np.linalg.norm(tt.e1)),
        "e2_norm": float(np.linalg.norm(tt.e2)),
        "output_error_norm": float(np.linalg.norm(y - f)),
        "v3": lyapunov_v3(rt.active_trajectory, rt.limits, rt.params, rt.state),
    }


def _convergence_block(
    records: np.ndarray, sc: Scenario, params: OscillatorParams
) -> dict:
    block = {"e1_threshold": E1_CONVERGENCE_THRESHOLD, "time_to_e1_below": None}
    if records.shape[0] == 0:
        return block
    e1, _ = errors_from_records(records, sc.limits, params)
    norms = np.linalg.norm(e1, axis=1)
    below = np.nonzero(norms < E1_CONVERGENCE_THRESHOLD)[0]
    if below.size:
        block["time_to_e1_below"] = float(records[below[0], 0])
    return block


def execute(
    sc: Scenario,
    collect: bool = True,
    gamma_override: Optional[float] = None,
) -> RunResult:
    """Run the scenario timeline start to finish.

    With collect, the per-step records of every segment are concatenated
    (one row per step plus a terminal row). Timeline switches carry the
    state across, so the summary's max_switch_output_jump must come out at
    rounding level on any healthy scenario.

    Raises:
        ScenarioError: structural problems (empty timeline with duration).
        NonFiniteState, NumericalSingularity: from the kernel.
    """
    h = sc.integrator.step_h
    total_steps = steps_for(sc.duration, h)
    width = _kernel.record_width(sc.limits.n)

    if total_steps == 0:
        summary = {
            "scenario": sc.name,
            "duration": sc.duration,
            "steps": 0,
            "h": h,
            "gamma": sc.params.gamma if gamma_override is None else float(gamma_override),
            "bound_violations": 0,
            "switches": 0,
            "max_switch_output_jump": 0.0,
            "final": None,
            "convergence": {
                "e1_threshold": E1_CONVERGENCE_THRESHOLD,
                "time_to_e1_below": None,
            },
        }
        return RunResult(np.empty((0, width)), summary, None)

    rt = build_runtime(sc, gamma_override)
    stride = 1 if collect else 0
    boundaries = [round(ev.t / h) for ev in sc.timeline]
    boundaries.append(total_steps)

    chunks = []
    max_jump = 0.0
    for j, ev in enumerate(sc.timeline):
        if j > 0:
            y_before = output_map(rt.state.s1, rt.limits)
            switch_motion(rt, ev.motion, ev.period)
            y_after = output_map(rt.state.s1, rt.limits)
            max_jump = max(max_jump, float(np.abs(y_after - y_before).max()))
        seg_steps = boundaries[j + 1] - boundaries[j]
        is_last = j == len(sc.timeline) - 1
        rows = _advance(rt, seg_steps, stride, emit_final=is_last and collect)
        if collect:
            chunks.append(rows)

    records = np.concatenate(chunks, axis=0) if collect else np.empty((0, width))
    summary = {
        "scenario": sc.name,
        "duration": sc.duration,
        "steps": total_steps,
        "h": h,
        "gamma": rt.params.gamma,
        "bound_violations": rt.violations,
        "switches": len(sc.timeline) - 1,
        "max_switch_output_jump": max_jump,
        "final": _final_block(rt),
        "convergence": _convergence_block(records, sc, rt.params),
    }
    return RunResult(records, summary, rt)
