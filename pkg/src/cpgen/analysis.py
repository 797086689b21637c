"""Lyapunov values, orbital distance, and record post-processing.

These are the measurement tools used by the test suite and the CLI
summaries: none of them feed back into the dynamics.
"""

from __future__ import annotations

import numpy as np

from .oscillator import (
    OscillatorParams,
    OscillatorState,
    _sat_hat_full,
    _sech2,
    _ATANH_CLAMP,
    transformed_target,
)
from .trajectory import OutputLimits, PeriodicTrajectory

__all__ = [
    "lyapunov_v1",
    "lyapunov_v3",
    "orbital_distance",
    "orbital_distance_unbounded",
    "phase_distance_gradient",
    "errors_from_records",
]


def lyapunov_v1(
    traj: PeriodicTrajectory, params: OscillatorParams, state: OscillatorState
) -> float:
    """Tracking energy of the unbounded oscillator.

    0.5 (s - f)^T K (s - f) + 0.5 |s_dot - f'|^2, with the state record
    reinterpreted as (s, s_dot, phi). Zero exactly on target.
    """
    f, fp, _ = traj.evaluate(state.phi)
    es = state.s1 - f
    ev = state.s2 - fp
    return float(0.5 * np.dot(es, params.k * es) + 0.5 * np.dot(ev, ev))


def lyapunov_v3(
    traj: PeriodicTrajectory,
    limits: OutputLimits,
    params: OscillatorParams,
    state: OscillatorState,
) -> float:
    """Error quadratic form of the bounded oscillator.

    0.5 [e1; e2]^T [[D, B], [B, K]] [e1; e2], componentwise on the diagonal
    blocks. Positive definite thanks to the k*d > b^2 parameter gate.
    """
    tt = transformed_target(traj, limits, params, state)
    return _v3_quadratic(tt.e1, tt.e2, params)


def _v3_quadratic(e1: np.ndarray, e2: np.ndarray, params: OscillatorParams) -> float:
    b, k, d = params.b, params.k, params.d
    return float(np.sum(0.5 * (d * e1**2 + 2.0 * b * e1 * e2 + k * e2**2)))


def orbital_distance(
    traj: PeriodicTrajectory,
    limits: OutputLimits,
    params: OscillatorParams,
    state: OscillatorState,
    samples: int = 10_000,
):
    """Distance from the shape state to the desired curve, bounded system.

    Brute-force minimum over a uniform tau grid on [0, period) of the same
    quadratic form as lyapunov_v3 between (s1, s2) and the curve point
    (g_p(tau), g_v(tau)).

    Returns:
        (dist, tau_star): the minimum and its grid argmin.
    """
    if samples < 1000:
        raise ValueError("samples must be >= 1000")
    taus = np.linspace(0.0, traj.period, samples, endpoint=False)
    f, fp, _ = traj.evaluate_many(taus)
    dy = limits.delta_y
    dv = limits.delta_ydot
    gp = np.arctanh(np.clip((f - limits.y_avg) / dy, -_ATANH_CLAMP, _ATANH_CLAMP))
    gv = np.arctanh(np.clip(fp / dv, -_ATANH_CLAMP, _ATANH_CLAMP))
    d1 = state.s1 - gp
    d2 = state.s2 - gv
    b, k, d = params.b, params.k, params.d
    dist = np.sum(0.5 * (d * d1**2 + 2.0 * b * d1 * d2 + k * d2**2), axis=1)
    idx = int(np.argmin(dist))
    return float(dist[idx]), float(taus[idx])


def orbital_distance_unbounded(
    traj: PeriodicTrajectory,
    params: OscillatorParams,
    state: OscillatorState,
    samples: int = 10_000,
):
    """Distance to the desired curve for the unbounded oscillator.

    K-weighted position error plus unweighted rate error, matching
    lyapunov_v1 evaluated against the curve point at tau.
    """
    if samples < 1000:
        raise ValueError("samples must be >= 1000")
    taus = np.linspace(0.0, traj.period, samples, endpoint=False)
    f, fp, _ = traj.evaluate_many(taus)
    d1 = state.s1 - f
    d2 = state.s2 - fp
    dist = 0.5 * np.sum(params.k * d1**2, axis=1) + 0.5 * np.sum(d2**2, axis=1)
    idx = int(np.argmin(dist))
    return float(dist[idx]), float(taus[idx])


def phase_distance_gradient(
    traj: PeriodicTrajectory, params: OscillatorParams, state: OscillatorState
) -> float:
    """Rate of change of the point distance along the curve parameter,
    evaluated at tau = phi (unbounded system).

    This is the negative of the coupling term that drives the phase
    dynamics, so it crosses zero where the phase sits at a local
    closest-point; exposed as a diagnostic for limit-cycle runs.
    """
    f, fp, fpp = traj.evaluate(state.phi)
    es = state.s1 - f
    ev = state.s2 - fp
    return float(-(np.dot(es, params.k * fp) + np.dot(ev, fpp)))


def errors_from_records(
    records: np.ndarray, limits: OutputLimits, params: OscillatorParams
):
    """Recover shape errors (e1, e2) from run records.

    Args:
        records: (m, 6n+4) array in the kernel record layout.
        limits, params: the configuration the run used.

    Returns:
        (e1, e2): arrays of shape (m, n).
    """
    n = limits.n
    s1 = records[:, 2 : 2 + n]
    s2 = records[:, 2 + n : 2 + 2 * n]
    f = records[:, 2 + 4 * n : 2 + 5 * n]
    fp = records[:, 2 + 5 * n : 2 + 6 * n]
    dy = limits.delta_y
    dv = limits.delta_ydot
    tgp = np.clip((f - limits.y_avg) / dy, -_ATANH_CLAMP, _ATANH_CLAMP)
    tgv = np.clip(fp / dv, -_ATANH_CLAMP, _ATANH_CLAMP)
    gp = np.arctanh(tgp)
    u = dy * _sech2(s1) * tgv / (dy * (1.0 - tgp**2))
    sigma, _, _ = _sat_hat_full(u, params.sat_sharpness)
    psi = np.arctanh(sigma)
    return s1 - gp, s2 - psi
