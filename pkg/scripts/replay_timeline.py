#!/usr/bin/env python3
"""Replay a scenario timeline and report per-segment tracking quality.

For every timeline event this prints how long the oscillator needed to
pull the shape error back under the convergence threshold after the
switch, the error at the segment's end, and how much of the position box
the output actually used. The bundled demonstrations are good inputs:

    python3 scripts/replay_timeline.py scenarios/rehab_arm.json
    python3 scripts/replay_timeline.py scenarios/gait.json --csv /tmp/gait.csv
"""

import argparse

import numpy as np

from cpgen.analysis import errors_from_records
from cpgen.cli import write_csv
from cpgen.scenario import E1_CONVERGENCE_THRESHOLD, execute, load_scenario


def segment_report(records, e1_norms, t_lo, t_hi, limits):
    t = records[:, 0]
    mask = (t >= t_lo) & (t < t_hi)
    seg = e1_norms[mask]
    seg_t = t[mask]
    below = np.nonzero(seg < E1_CONVERGENCE_THRESHOLD)[0]
    settle = seg_t[below[0]] - t_lo if below.size else None
    n = limits.n
    y = records[mask, 2 + 2 * n : 2 + 3 * n]
    box_use = (np.abs(y - limits.y_avg) / limits.delta_y).max()
    return settle, float(seg[-1]), float(box_use)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("scenario", help="scenario JSON file")
    ap.add_argument("--gamma", type=float, default=None,
                    help="override the scenario's phase-coupling gain")
    ap.add_argument("--csv", default=None, help="also write the per-step CSV here")
    args = ap.parse_args()

    sc = load_scenario(args.scenario)
    result = execute(sc, gamma_override=args.gamma)
    s = result.summary
    print(f"{s['scenario']}: {s['steps']} steps at h={s['h']:g}, "
          f"gamma={s['gamma']:g}")
    print(f"  bound violations: {s['bound_violations']}, "
          f"switches: {s['switches']}, "
          f"max output jump at a switch: {s['max_switch_output_jump']:.3g}")

    e1, _ = errors_from_records(result.records, sc.limits, result.runtime.params)
    norms = np.linalg.norm(e1, axis=1)
    edges = [ev.t for ev in sc.timeline] + [sc.duration]
    for j, ev in enumerate(sc.timeline):
        settle, tail, box_use = segment_report(
            result.records, norms, edges[j], edges[j + 1], sc.limits
        )
        settle_txt = f"{settle:6.2f}s" if settle is not None else "  never"
        period = ev.period if ev.period is not None else sc.motions[ev.motion].period
        print(f"  t={ev.t:6.1f}  {ev.motion:<18} T={period:<5g} "
              f"settle {settle_txt}  end |e1| {tail:.2e}  box use {box_use:.0%}")

    final = s["final"]
    print(f"  final: |e1| {final['e1_norm']:.2e}, |e2| {final['e2_norm']:.2e}, "
          f"phi - t = {final['delta_phi_minus_t']:+.4f}")
    if args.csv:
        write_csv(args.csv, result.records, sc.limits.n)
        print(f"  wrote {args.csv}")


if __name__ == "__main__":
    main()
