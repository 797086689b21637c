#!/usr/bin/env python3
"""Regenerate the bundled scenarios and their motion files.

Two desk-scale setups:

* rehab_arm: a 2-joint arm drawing circles in joint space, with online
  tempo changes, a plane switch, and a final constant rest posture. The
  initial condition sits on the circle but a quarter turn out of phase, so
  the gamma comparison cleanly separates time-locked tracking from
  limit-cycle tracking.
* gait: a 7-joint stylized walker. Step length scales the joint
  amplitudes (walk_50 is the design gait; walk_80/20/10 are longer and
  shorter steps), the timeline sweeps tempo and step length, and the run
  ends standing.
* sweep: a 2-joint motion whose first joint swings through 87% of its box
  fast enough that the strict feasibility inequality fails while the box
  and rate limits still hold (BOX_ONLY), so the bundled data exercises the
  saturated velocity coupling.

Run from the repository root:  python3 scripts/build_bundled_motions.py
"""

import json
import math
from pathlib import Path

import numpy as np

from cpgen import OutputLimits, PeriodicTrajectory, check_feasibility

ROOT = Path(__file__).resolve().parent.parent
SCEN = ROOT / "scenarios"
MOTIONS = SCEN / "motions"


def write(path: Path, obj: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")
    print(f"wrote {path.relative_to(ROOT)}")


def circle(center, radius: float, axis0: int, period: float) -> PeriodicTrajectory:
    """Joint-space circle: cos on one joint, sin on the other."""
    n = 2
    ca = np.zeros((n, 1))
    sa = np.zeros((n, 1))
    ca[axis0, 0] = radius
    sa[1 - axis0, 0] = radius
    return PeriodicTrajectory(np.asarray(center, dtype=float), ca, sa, period)


def report(name: str, traj: PeriodicTrajectory, limits: OutputLimits) -> None:
    rep = check_feasibility(traj, limits)
    print(
        f"  {name}: {rep.classification.value}"
        f" (box {rep.box_margin:.3f}, strict {rep.strict_margin:.3f})"
    )


def build_rehab() -> None:
    limits = OutputLimits(
        y_min=[-1.2, -1.2], y_max=[1.2, 1.2], delta_ydot=[1.0, 1.0]
    )
    horizontal = circle([0.3, 0.0], 0.5, axis0=0, period=10.0)
    vertical = circle([0.0, 0.3], 0.5, axis0=1, period=10.0)
    rest = PeriodicTrajectory.constant([0.3, 0.0], period=1.0)

    print("rehab_arm motions:")
    for name, traj in [
        ("horizontal_circle", horizontal),
        ("vertical_circle", vertical),
        ("rest_posture", rest),
    ]:
        report(name, traj, limits)
        write(MOTIONS / f"{name}.json", traj.to_json())

    # start on the horizontal circle a quarter period out of phase
    y0 = [0.3 + 0.5 * math.cos(math.pi / 2), 0.5 * math.sin(math.pi / 2)]
    ydot0 = [
        -0.5 * (2 * math.pi / 10) * math.sin(math.pi / 2),
        0.5 * (2 * math.pi / 10) * math.cos(math.pi / 2),
    ]
    scenario = {
        "limits": limits.to_json(),
        "params": {"b": 15.0, "k": 10.0, "d": 25.0, "gamma": 10.0, "p": 100.0},
        "integrator": {"h": 0.001},
        "motions": {
            "horizontal_circle": "motions/horizontal_circle.json",
            "vertical_circle": "motions/vertical_circle.json",
            "rest_posture": "motions/rest_posture.json",
        },
        "timeline": [
            {"t": 0.0, "motion": "horizontal_circle", "period": 10.0},
            {"t": 26.0, "motion": "horizontal_circle", "period": 7.0},
            {"t": 48.0, "motion": "vertical_circle", "period": 7.0},
            {"t": 72.0, "motion": "horizontal_circle", "period": 15.0},
            {"t": 100.0, "motion": "rest_posture"},
        ],
        "init": {"y0": y0, "ydot0": ydot0, "phi0": 0.0},
        "duration": 120.0,
    }
    write(SCEN / "rehab_arm.json", scenario)


def gait_motion(scale: float, period: float) -> PeriodicTrajectory:
    """Stylized 7-joint walking pattern; scale plays the step-length knob."""
    base_amp = np.array([0.35, 0.22, 0.35, 0.22, 0.12, 0.12, 0.06])
    phase = np.array([0.0, 0.5, math.pi, math.pi + 0.5, 0.3, math.pi + 0.3, 0.0])
    second = np.array([0.0, 0.25, 0.0, 0.25, 0.0, 0.0, 0.0])
    n = 7
    ca = np.zeros((n, 2))
    sa = np.zeros((n, 2))
    amp = scale * base_amp
    # a sin(theta + ph) = a cos(ph) sin(theta) + a sin(ph) cos(theta)
    ca[:, 0] = amp * np.sin(phase)
    sa[:, 0] = amp * np.cos(phase)
    ca[:, 1] = amp * second * np.sin(2.0 * phase)
    sa[:, 1] = amp * second * np.cos(2.0 * phase)
    return PeriodicTrajectory(np.zeros(n), ca, sa, period)


def build_gait() -> None:
    n = 7
    limits = OutputLimits(
        y_min=-1.0 * np.ones(n), y_max=1.0 * np.ones(n), delta_ydot=2.5 * np.ones(n)
    )
    motions = {
        "walk_50": gait_motion(1.0, period=2.0),
        "walk_80": gait_motion(1.6, period=1.7),
        "walk_20": gait_motion(0.4, period=4.0),
        "walk_10": gait_motion(0.2, period=4.0),
        "stand": PeriodicTrajectory.constant(np.zeros(n), period=1.0),
    }
    print("gait motions:")
    for name, traj in motions.items():
        report(name, traj, limits)
        write(MOTIONS / f"{name}.json", traj.to_json())

    scenario = {
        "limits": limits.to_json(),
        "params": {"b": 40.0, "k": 30.0, "d": 60.0, "gamma": 10.0, "p": 100.0},
        "integrator": {"h": 0.001},
        "motions": {name: f"motions/{name}.json" for name in motions},
        "timeline": [
            {"t": 0.0, "motion": "walk_50", "period": 2.0},
            {"t": 12.0, "motion": "walk_50", "period": 1.0},
            {"t": 23.0, "motion": "walk_80", "period": 1.7},
            {"t": 37.0, "motion": "walk_50", "period": 2.0},
            {"t": 48.0, "motion": "walk_20", "period": 4.0},
            {"t": 58.0, "motion": "walk_10", "period": 4.0},
            {"t": 68.0, "motion": "stand"},
        ],
        "duration": 80.0,
    }
    write(SCEN / "gait.json", scenario)


def build_sweep() -> None:
    limits = OutputLimits(
        y_min=[-1.2, -1.2], y_max=[1.2, 1.2], delta_ydot=[1.0, 1.0]
    )
    n = 2
    ca = np.zeros((n, 1))
    sa = np.zeros((n, 1))
    sa[0, 0] = 1.05
    ca[1, 0] = 0.25
    sweep = PeriodicTrajectory(np.asarray([0.0, 0.3]), ca, sa, period=7.0)
    print("sweep motions:")
    report("full_sweep", sweep, limits)
    write(MOTIONS / "full_sweep.json", sweep.to_json())
    scenario = {
        "limits": limits.to_json(),
        "params": {"b": 15.0, "k": 10.0, "d": 25.0, "gamma": 10.0, "p": 100.0},
        "integrator": {"h": 0.001},
        "motions": {"full_sweep": "motions/full_sweep.json"},
        "timeline": [{"t": 0.0, "motion": "full_sweep", "period": 7.0}],
        "duration": 30.0,
    }
    write(SCEN / "sweep.json", scenario)


if __name__ == "__main__":
    build_rehab()
    build_gait()
    build_sweep()
