"""Compiled scalar-loop twins of the oscillator RHS and the run loop.

Everything here mirrors the reference implementations in ``oscillator`` op
for op; tests pin agreement to near machine precision. Long runs (fuzzing,
scenario replays, the streaming service) go through ``run_bounded`` so a
60 s run at h=1e-3 costs milliseconds instead of minutes.

Record row layout (width 6n+4):
    t, phi, s1[n], s2[n], y[n], ydot[n], f[n], fp[n], V3, dphi

Status codes: 0 ok, 1 Jacobian underflow, 2 non-finite state.
"""

import math

import numpy as np
from numba import njit

STATUS_OK = 0
STATUS_SINGULAR = 1
STATUS_NONFINITE = 2

_TANH_CLAMP = 1.0 - 1e-13
_ATANH_CLAMP = 1.0 - 1e-15
_JAC_FLOOR = 1e-300


def record_width(n: int) -> int:
    return 6 * n + 4


@njit(cache=True, inline="always")
def _traj_eval(dc, ca, sa, omega, phi, f, fp, fpp):
    # f_i = dc_i + sum_k a cos(k w phi) + b sin(k w phi); exact derivatives.
    n, K = ca.shape
    for i in range(n):
        f[i] = dc[i]
        fp[i] = 0.0
        fpp[i] = 0.0
    for kk in range(K):
        kw = omega * (kk + 1)
        c = math.cos(kw * phi)
        s = math.sin(kw * phi)
        for i in range(n):
            a = ca[i, kk]
            b = sa[i, kk]
            f[i] += a * c + b * s
            fp[i] += kw * (b * c - a * s)
            fpp[i] -= kw * kw * (a * c + b * s)


@njit(cache=True, inline="always")
def _sech2(x):
    e = math.exp(-2.0 * abs(x))
    return 4.0 * e / (1.0 + e) ** 2


@njit(cache=True, inline="always")
def _sat_full(u, p):
    # Returns (sigma, dsigma, 1 - sigma^2); |x|>1 branch works through
    # w = |x|^-p so nothing overflows and 1-sigma^2 keeps its digits.
    au = abs(u)
    if au <= 1.0:
        w = au**p
        base = (1.0 + w) ** (-1.0 / p)
        sigma = u * base
        dsig = base ** (1.0 + p)
        oms2 = 1.0 - sigma * sigma
    else:
        w = (1.0 / au) ** p
        base = (1.0 + w) ** (-1.0 / p)
        one_minus = -math.expm1(math.log1p(w) * (-1.0 / p))
        if one_minus < 1e-15:
            one_minus = 1e-15
        sigma = 1.0 - one_minus
        if u < 0.0:
            sigma = -sigma
        dsig = au ** (-(1.0 + p)) * base ** (1.0 + p)
        oms2 = one_minus * (2.0 - one_minus)
    return sigma, dsig, oms2


@njit(cache=True, inline="always")
def _rhs_bounded(
    s1, s2, phi,
    dc, ca, sa, omega,
    y_avg, dy, dv,
    b, k, d, gamma, p,
    f, fp, fpp, ds1, ds2,
):
    # Fills ds1/ds2 (and f/fp/fpp as a side effect); returns (dphi, v3, ok).
    n = s1.shape[0]
    _traj_eval(dc, ca, sa, omega, phi, f, fp, fpp)
    acc_gp = 0.0
    acc_psi = 0.0
    v3 = 0.0
    ok = True
    for i in range(n):
        t1 = math.tanh(s1[i])
        t2 = math.tanh(s2[i])
        tgp = (f[i] - y_avg[i]) / dy[i]
        if tgp > _ATANH_CLAMP:
            tgp = _ATANH_CLAMP
        elif tgp < -_ATANH_CLAMP:
            tgp = -_ATANH_CLAMP
        tgv = fp[i] / dv[i]
        if tgv > _ATANH_CLAMP:
            tgv = _ATANH_CLAMP
        elif tgv < -_ATANH_CLAMP:
            tgv = -_ATANH_CLAMP
        J_s1 = dy[i] * _sech2(s1[i])
        J_gp = dy[i] * (1.0 - tgp * tgp)
        J_gv = dv[i] * (1.0 - tgv * tgv)
        if J_s1 < _JAC_FLOOR or J_gp < _JAC_FLOOR or J_gv < _JAC_FLOOR:
            # Bail before dividing by the underflowed diagonal.
            return 1.0, 0.0, False
        g_a = fpp[i] / J_gv
        u = J_s1 * tgv / J_gp
        sigma, dsig, oms2 = _sat_full(u, p)
        J_psi = dv[i] * oms2
        if J_psi < _JAC_FLOOR:
            return 1.0, 0.0, False
        psi = math.atanh(sigma)
        e1 = s1[i] - math.atanh(tgp)
        e2 = s2[i] - psi
        bracket = J_gv * g_a + 2.0 * dv[i] * dv[i] * tgv * tgv * tgp / J_gp
        psi_phi = dsig * J_s1 * bracket / (J_gp * J_psi)
        psi_t = -2.0 * dsig * dv[i] * dv[i] * t1 * t2 * tgv / (J_psi * J_gp)
        ds1[i] = dv[i] * t2 / J_s1
        ds2[i] = (
            psi_phi + psi_t
            - b[i] * e1
            - k[i] * e2
            - (d[i] / b[i]) * dv[i] * (t2 - sigma) / J_s1
        )
        gp_rate = dv[i] * tgv / J_gp
        acc_gp += (d[i] * e1 + b[i] * e2) * gp_rate
        acc_psi += (b[i] * e1 + k[i] * e2) * psi_phi
        v3 += 0.5 * (d[i] * e1 * e1 + 2.0 * b[i] * e1 * e2 + k[i] * e2 * e2)
    dphi = 1.0 + gamma * (acc_gp + acc_psi)
    return dphi, v3, ok


@njit(cache=True)
def rhs_bounded_once(
    s1, s2, phi,
    dc, ca, sa, omega,
    y_avg, dy, dv,
    b, k, d, gamma, p,
):
    """One RHS evaluation; returns (ds1, ds2, dphi, v3, ok)."""
    n = s1.shape[0]
    f = np.empty(n)
    fp = np.empty(n)
    fpp = np.empty(n)
    ds1 = np.empty(n)
    ds2 = np.empty(n)
    dphi, v3, ok = _rhs_bounded(
        s1, s2, phi, dc, ca, sa, omega, y_avg, dy, dv,
        b, k, d, gamma, p, f, fp, fpp, ds1, ds2,
    )
    return ds1, ds2, dphi, v3, ok


@njit(cache=True, inline="always")
def _clamped_tanh(x):
    t = math.tanh(x)
    if t > _TANH_CLAMP:
        t = _TANH_CLAMP
    elif t < -_TANH_CLAMP:
        t = -_TANH_CLAMP
    return t


@njit(cache=True)
def run_bounded(
    dc, ca, sa, omega,
    y_avg, dy, dv,
    b, k, d, gamma, p,
    s1, s2, phi0, t0,
    h, nsteps, use_euler,
    records, rec_stride, emit_final,
):
    """Advance nsteps in place; s1/s2 are mutated.

    Records state-before-step rows every rec_stride steps (0 disables), plus
    the terminal state when emit_final. Bounds are checked after every step.

    Returns (status, steps_done, phi_acc, t_acc, violations, rows_written).
    phi and t advance through separate accumulators added to phi0/t0 so that
    for gamma=0 the phase increment is bitwise h, keeping phi - t - phi0 at
    rounding level over arbitrarily long runs.
    """
    n = s1.shape[0]
    f = np.empty(n)
    fp = np.empty(n)
    fpp = np.empty(n)
    k1s1 = np.empty(n)
    k1s2 = np.empty(n)
    k2s1 = np.empty(n)
    k2s2 = np.empty(n)
    k3s1 = np.empty(n)
    k3s2 = np.empty(n)
    k4s1 = np.empty(n)
    k4s2 = np.empty(n)
    ts1 = np.empty(n)
    ts2 = np.empty(n)

    max_rows = records.shape[0]
    status = STATUS_OK
    violations = 0
    rows = 0
    p_acc = 0.0
    t_acc = 0.0
    steps_done = 0

    for step in range(nsteps):
        phi_now = phi0 + p_acc
        dphi1, v3, ok = _rhs_bounded(
            s1, s2, phi_now, dc, ca, sa, omega, y_avg, dy, dv,
            b, k, d, gamma, p, f, fp, fpp, k1s1, k1s2,
        )
        if not ok:
            status = STATUS_SINGULAR
            break
        if rec_stride > 0 and step % rec_stride == 0 and rows < max_rows:
            r = records[rows]
            r[0] = t0 + t_acc
            r[1] = phi_now
            for i in range(n):
                r[2 + i] = s1[i]
                r[2 + n + i] = s2[i]
                r[2 + 2 * n + i] = y_avg[i] + dy[i] * _clamped_tanh(s1[i])
                r[2 + 3 * n + i] = dv[i] * _clamped_tanh(s2[i])
                r[2 + 4 * n + i] = f[i]
                r[2 + 5 * n + i] = fp[i]
            r[2 + 6 * n] = v3
            r[2 + 6 * n + 1] = dphi1
            rows += 1

        if use_euler:
            for i in range(n):
                s1[i] += h * k1s1[i]
                s2[i] += h * k1s2[i]
            p_acc += h * dphi1
        else:
            half = 0.5 * h
            for i in range(n):
                ts1[i] = s1[i] + half * k1s1[i]
                ts2[i] = s2[i] + half * k1s2[i]
            dphi2, _, ok = _rhs_bounded(
                ts1, ts2, phi_now + half * dphi1, dc, ca, sa, omega,
                y_avg, dy, dv, b, k, d, gamma, p, f, fp, fpp, k2s1, k2s2,
            )
            if not ok:
                status = STATUS_SINGULAR
                break
            for i in range(n):
                ts1[i] = s1[i] + half * k2s1[i]
                ts2[i] = s2[i] + half * k2s2[i]
            dphi3, _, ok = _rhs_bounded(
                ts1, ts2, phi_now + half * dphi2, dc, ca, sa, omega,
                y_avg, dy, dv, b, k, d, gamma, p, f, fp, fpp, k3s1, k3s2,
            )
            if not ok:
                status = STATUS_SINGULAR
                break
            for i in range(n):
                ts1[i] = s1[i] + h * k3s1[i]
                ts2[i] = s2[i] + h * k3s2[i]
            dphi4, _, ok = _rhs_bounded(
                ts1, ts2, phi_now + h * dphi3, dc, ca, sa, omega,
                y_avg, dy, dv, b, k, d, gamma, p, f, fp, fpp, k4s1, k4s2,
            )
            if not ok:
                status = STATUS_SINGULAR
                break
            for i in range(n):
                # /6 folded into the stage sum so a unit dphi adds exactly h.
                s1[i] += h * ((k1s1[i] + 2.0 * (k2s1[i] + k3s1[i]) + k4s1[i]) / 6.0)
                s2[i] += h * ((k1s2[i] + 2.0 * (k2s2[i] + k3s2[i]) + k4s2[i]) / 6.0)
            p_acc += h * ((dphi1 + 2.0 * (dphi2 + dphi3) + dphi4) / 6.0)

        t_acc += h
        steps_done = step + 1

        if not math.isfinite(p_acc):
            status = STATUS_NONFINITE
            break
        for i in range(n):
            if not (math.isfinite(s1[i]) and math.isfinite(s2[i])):
                status = STATUS_NONFINITE
                break
            yi = y_avg[i] + dy[i] * _clamped_tanh(s1[i])
            ydi = dv[i] * _clamped_tanh(s2[i])
            if not (y_avg[i] - dy[i] < yi < y_avg[i] + dy[i]):
                violations += 1
            if not (-dv[i] < ydi < dv[i]):
                violations += 1
        if status != STATUS_OK:
            break

    if status == STATUS_OK and emit_final and rec_stride > 0 and rows < max_rows:
        phi_now = phi0 + p_acc
        dphi1, v3, ok = _rhs_bounded(
            s1, s2, phi_now, dc, ca, sa, omega, y_avg, dy, dv,
            b, k, d, gamma, p, f, fp, fpp, k1s1, k1s2,
        )
        if ok:
            r = records[rows]
            r[0] = t0 + t_acc
            r[1] = phi_now
            for i in range(n):
                r[2 + i] = s1[i]
                r[2 + n + i] = s2[i]
                r[2 + 2 * n + i] = y_avg[i] + dy[i] * _clamped_tanh(s1[i])
                r[2 + 3 * n + i] = dv[i] * _clamped_tanh(s2[i])
                r[2 + 4 * n + i] = f[i]
                r[2 + 5 * n + i] = fp[i]
            r[2 + 6 * n] = v3
            r[2 + 6 * n + 1] = dphi1
            rows += 1
        else:
            status = STATUS_SINGULAR

    return status, steps_done, p_acc, t_acc, violations, rows
