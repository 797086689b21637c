#!/usr/bin/env python3
"""Hammer the hard output bounds with random motions, gains, and inits.

Every run draws a random box-feasible motion, random gains satisfying the
positive-definiteness gate, and an initial state that may hug the position
boundary, then integrates for a minute and measures the closest approach
to any bound. The guarantee under test: the output never touches a limit,
no matter how adversarial the rest of the setup is.

    python3 scripts/fuzz_bounds.py --runs 100 --duration 60
"""

import argparse
import time

import numpy as np

from cpgen import MotionLibrary, OscillatorParams, OutputLimits, PeriodicTrajectory
from cpgen.cpg import make_runtime, run_collect
from cpgen.oscillator import OscillatorState
from cpgen.trajectory import Feasibility, check_feasibility


def random_feasible_motion(rng, limits):
    """Rejection-sample a random Fourier motion inside the box and rate
    limits; roughly half the accepted draws break the strict inequality."""
    n = limits.n
    while True:
        K = int(rng.integers(1, 4))
        decay = 0.5 ** np.arange(K)
        ca = rng.normal(size=(n, K)) * decay
        sa = rng.normal(size=(n, K)) * decay
        traj = PeriodicTrajectory(
            limits.y_avg + rng.uniform(-0.2, 0.2, n) * limits.delta_y,
            ca, sa, float(rng.uniform(2.0, 10.0)),
        )
        f, _, _ = traj.evaluate_many(np.linspace(0, traj.period, 512, endpoint=False))
        use = (np.abs(f - limits.y_avg) / limits.delta_y).max()
        traj = PeriodicTrajectory(
            limits.y_avg + (traj.dc - limits.y_avg) * rng.uniform(0.5, 0.95) / use,
            ca * rng.uniform(0.5, 0.95) / use, sa * rng.uniform(0.5, 0.95) / use,
            traj.period,
        )
        report = check_feasibility(traj, limits)
        if report.classification is not Feasibility.INFEASIBLE:
            return traj, report.classification


def random_setup(rng):
    n = int(rng.integers(1, 5))
    center = rng.uniform(-0.5, 0.5, n)
    half = rng.uniform(0.5, 2.0, n)
    limits = OutputLimits(
        y_min=center - half, y_max=center + half,
        delta_ydot=rng.uniform(0.5, 3.0, n),
    )
    traj, classification = random_feasible_motion(rng, limits)
    k = rng.uniform(5.0, 40.0, n)
    d = rng.uniform(5.0, 40.0, n)
    b = np.sqrt(k * d) * rng.uniform(0.3, 0.9, n)
    params = OscillatorParams(b=b, k=k, d=d, gamma=float(rng.choice([0.0, 10.0])))
    pos_ratio = 0.995 if rng.random() < 0.3 else 0.9
    state = OscillatorState(
        s1=np.arctanh(rng.uniform(-pos_ratio, pos_ratio, n)),
        s2=np.arctanh(rng.uniform(-0.9, 0.9, n)),
        phi=float(rng.uniform(0.0, 20.0)),
    )
    return limits, traj, params, state, classification


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--runs", type=int, default=100)
    ap.add_argument("--duration", type=float, default=60.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    t0 = time.perf_counter()
    worst_pos = np.inf
    worst_rate = np.inf
    violations = 0
    for i in range(args.runs):
        limits, traj, params, state, classification = random_setup(rng)
        n = limits.n
        lib = MotionLibrary(limits)
        lib.add("m", traj)
        rt = make_runtime(lib, params, "m", state=state)
        records = run_collect(rt, args.duration)
        violations += rt.violations
        y = records[:, 2 + 2 * n : 2 + 3 * n]
        ydot = records[:, 2 + 3 * n : 2 + 4 * n]
        pos_margin = min(
            float((y - limits.y_min).min()), float((limits.y_max - y).min())
        )
        rate_margin = float((limits.delta_ydot - np.abs(ydot)).min())
        worst_pos = min(worst_pos, pos_margin)
        worst_rate = min(worst_rate, rate_margin)
        print(f"run {i:3d}: n={n} {classification.value:<8} "
              f"gamma={params.gamma:<4g} pos margin {pos_margin:.2e} "
              f"rate margin {rate_margin:.2e}")

    print(f"\n{args.runs} runs x {args.duration:g}s in "
          f"{time.perf_counter() - t0:.1f}s")
    print(f"kernel violations: {violations}")
    print(f"closest approach: position {worst_pos:.3e}, rate {worst_rate:.3e}")
    if violations:
        raise SystemExit(1)


if __name__ == "__main__":
    main()
