"""Command-line scenario runner.

Commands:
    run            execute a scenario, write per-step CSV and a JSON summary
    validate       feasibility and timeline report without running
    compare-gamma  run the same scenario under several phase-coupling gains

Set CPG_LOG=debug|info for progress logging. Exit codes: 0 success,
1 validation failure, 2 numeric runtime failure.
"""

from __future__ import annotations

import json
import logging
import os
import sys
import time

import click
import numpy as np

from .errors import (
    NonFiniteState,
    NumericalSingularity,
    PeriodTooShort,
    ScenarioError,
    UnknownMotion,
)
from .scenario import execute, load_scenario
from .trajectory import Feasibility, check_feasibility, tempo_rescale

log = logging.getLogger("cpgen")

_VALIDATION_ERRORS = (ScenarioError, UnknownMotion, PeriodTooShort, ValueError)
_RUNTIME_ERRORS = (NonFiniteState, NumericalSingularity)


def _init_logging() -> None:
    level_name = os.environ.get("CPG_LOG", "").strip().lower()
    level = {"debug": logging.DEBUG, "info": logging.INFO}.get(level_name)
    if level is not None:
        logging.basicConfig(
            level=level, format="%(asctime)s %(name)s %(levelname)s %(message)s"
        )


def _csv_columns(n: int) -> list[str]:
    cols = ["t", "phi"]
    cols += [f"s1_{i}" for i in range(n)]
    cols += [f"s2_{i}" for i in range(n)]
    cols += [f"y_{i}" for i in range(n)]
    cols += [f"ydot_{i}" for i in range(n)]
    cols += [f"f_{i}" for i in range(n)]
    cols += ["V3", "dphi"]
    return cols


def write_csv(path: str, records: np.ndarray, n: int) -> None:
    """Records in kernel layout -> CSV; drops the f' block, 17 sig digits."""
    keep = list(range(2 + 5 * n)) + [2 + 6 * n, 2 + 6 * n + 1]
    header = ",".join(_csv_columns(n))
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        if records.shape[0]:
            np.savetxt(fh, records[:, keep], fmt="%.17g", delimiter=",")


@click.group(help=__doc__)
def main() -> None:
    _init_logging()


@main.command("run")
@click.argument("scenario_path", metavar="SCENARIO", type=click.Path(dir_okay=False))
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False),
              help="Per-step CSV output path.")
@click.option("--summary", "summary_path", type=click.Path(dir_okay=False),
              help="Also write the JSON summary to this file.")
@click.option("--gamma", type=float, default=None,
              help="Override the scenario's phase-coupling gain.")
def run_cmd(scenario_path: str, output: str, summary_path, gamma) -> None:
    """Execute SCENARIO and write the per-step CSV."""
    try:
        sc = load_scenario(scenario_path)
        log.info("loaded %s: n=%d, duration=%gs", sc.name, sc.limits.n, sc.duration)
        t0 = time.perf_counter()
        result = execute(sc, collect=True, gamma_override=gamma)
        log.info("ran %d steps in %.2fs", result.summary["steps"],
                 time.perf_counter() - t0)
    except _VALIDATION_ERRORS as exc:
        click.echo(f"error: {exc}", err=True)
        raise SystemExit(1)
    except _RUNTIME_ERRORS as exc:
        click.echo(f"numeric failure: {exc}", err=True)
        raise SystemExit(2)
    write_csv(output, result.records, sc.limits.n)
    payload = json.dumps(result.summary, indent=2)
    if summary_path:
        with open(summary_path, "w") as fh:
            fh.write(payload + "\n")
    click.echo(payload)


@main.command("validate")
@click.argument("scenario_path", metavar="SCENARIO", type=click.Path(dir_okay=False))
def validate_cmd(scenario_path: str) -> None:
    """Check SCENARIO structure, motion feasibility, and timeline tempos."""
    try:
        sc = load_scenario(scenario_path)
    except _VALIDATION_ERRORS as exc:
        click.echo(f"error: {exc}", err=True)
        raise SystemExit(1)

    click.echo(
        f"scenario: {sc.name} (n={sc.limits.n}, duration={sc.duration:g} s, "
        f"h={sc.integrator.step_h:g}, gamma={sc.params.gamma:g})"
    )
    failed = False
    for motion_id, traj in sc.motions.items():
        report = check_feasibility(traj, sc.limits)
        line = (
            f"motion {motion_id}: {report.classification.value}"
            f" (box margin {report.box_margin:.4g},"
            f" strict margin {report.strict_margin:.4g})"
        )
        if report.classification is Feasibility.INFEASIBLE:
            failed = True
            line += "  <- rejected"
        click.echo(line)
    for idx, ev in enumerate(sc.timeline):
        traj = sc.motions[ev.motion]
        period = ev.period if ev.period is not None else traj.period
        try:
            tempo_rescale(traj, period, sc.limits)
            click.echo(f"timeline[{idx}]: t={ev.t:g} {ev.motion} T={period:g} ok")
        except PeriodTooShort as exc:
            failed = True
            click.echo(
                f"timeline[{idx}]: t={ev.t:g} {ev.motion} T={period:g}"
                f"  <- too short, minimum {exc.min_period:.4g}"
            )
    if failed:
        click.echo("invalid", err=True)
        raise SystemExit(1)
    click.echo("ok")


@main.command("compare-gamma")
@click.argument("scenario_path", metavar="SCENARIO", type=click.Path(dir_okay=False))
@click.option("--gammas", default="0,10", show_default=True,
              help="Comma-separated phase-coupling gains to compare.")
@click.option("--summary", "summary_path", type=click.Path(dir_okay=False),
              help="Also write the paired summaries to this file.")
def compare_gamma_cmd(scenario_path: str, gammas: str, summary_path) -> None:
    """Run SCENARIO once per gamma and pair up the convergence summaries."""
    try:
        values = [float(v) for v in gammas.split(",") if v.strip() != ""]
    except ValueError:
        click.echo(f"error: bad --gammas value: {gammas!r}", err=True)
        raise SystemExit(1)
    if len(values) < 2:
        click.echo("error: --gammas needs at least two values", err=True)
        raise SystemExit(1)

    try:
        sc = load_scenario(scenario_path)
        summaries = {}
        for g in values:
            log.info("running %s with gamma=%g", sc.name, g)
            summaries[f"{g:g}"] = execute(sc, collect=True, gamma_override=g).summary
    except _VALIDATION_ERRORS as exc:
        click.echo(f"error: {exc}", err=True)
        raise SystemExit(1)
    except _RUNTIME_ERRORS as exc:
        click.echo(f"numeric failure: {exc}", err=True)
        raise SystemExit(2)

    times = {
        key: s["convergence"]["time_to_e1_below"] for key, s in summaries.items()
    }
    reached = {k: v for k, v in times.items() if v is not None}
    fastest = min(reached, key=reached.get) if reached else None
    payload = json.dumps(
        {
            "scenario": sc.name,
            "gammas": summaries,
            "comparison": {"time_to_e1_below": times, "fastest": fastest},
        },
        indent=2,
    )
    if summary_path:
        with open(summary_path, "w") as fh:
            fh.write(payload + "\n")
    click.echo(payload)


@main.command("serve")
@click.argument("scenario_path", metavar="SCENARIO", type=click.Path(dir_okay=False))
@click.option("--bind", default="127.0.0.1:8000", show_default=True,
              help="host:port to listen on.")
@click.option("--decimation", default=10, show_default=True, type=int,
              help="Steps between streamed state snapshots.")
def serve_cmd(scenario_path: str, bind: str, decimation: int) -> None:
    """Stream SCENARIO live over websocket until terminated."""
    from .service import serve

    try:
        serve(scenario_path, bind=bind, decimation=decimation)
    except _VALIDATION_ERRORS as exc:
        click.echo(f"error: {exc}", err=True)
        raise SystemExit(1)


if __name__ == "__main__":
    main()
