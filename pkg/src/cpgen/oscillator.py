"""Core oscillator dynamics.

Two systems live here:

* the unbounded programmable oscillator, a second-order tracking system in
  (s, s_dot) plus a phase state phi whose rate couples to the tracking error;
* the bounded-output oscillator, where the output y = y_avg + dy*tanh(s1)
  and its rate dy/dt = dv*tanh(s2) respect box and rate limits for any finite
  state, and the desired trajectory is pulled back through the inverse maps.

All gain matrices are diagonal and stored as n-vectors, so every matrix
product collapses to componentwise arithmetic.

These are the readable reference implementations; the compiled twins in
``_kernel`` execute long runs and must agree with these to near machine
precision (pinned by tests).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BoundaryViolation, NumericalSingularity
from .trajectory import OutputLimits, PeriodicTrajectory

__all__ = [
    "OscillatorParams",
    "OscillatorState",
    "ShapeDerivatives",
    "TransformedTarget",
    "output_map",
    "output_rate",
    "inverse_transform",
    "sat_hat",
    "transformed_target",
    "bounded_rhs",
    "unbounded_rhs",
]

# tanh rounds to exactly 1.0 in float64 once |x| > ~19, which would put the
# output exactly on its bound; keep it a hair inside.
_TANH_CLAMP = 1.0 - 1e-13
# atanh(1 - 1e-15) is finite (~17.7); inputs are clamped here so rounding at
# the box boundary cannot produce inf.
_ATANH_CLAMP = 1.0 - 1e-15
# Jacobian diagonals below this signal an escaped state (bug trap).
_JAC_FLOOR = 1e-300


def _vec(x, name: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a 1-D vector")
    return arr


@dataclass(frozen=True, eq=False)
class OscillatorParams:
    """Diagonal gains and coupling constants.

    Attributes:
        b, k, d: strictly positive gain diagonals, shape (n,). The pair gate
            k*d > b^2 must hold componentwise (keeps the error quadratic form
            positive definite).
        gamma: phase-coupling gain, >= 0. Zero gives pure time-parameterized
            tracking; large values give limit-cycle tracking.
        sat_sharpness: exponent p >= 1 of the smooth saturation.
    """

    b: np.ndarray
    k: np.ndarray
    d: np.ndarray
    gamma: float = 0.0
    sat_sharpness: float = 100.0

    def __post_init__(self):
        b = _vec(self.b, "b")
        k = _vec(self.k, "k")
        d = _vec(self.d, "d")
        if not (b.shape == k.shape == d.shape):
            raise ValueError("gain vectors must share one shape")
        for name, arr in (("b", b), ("k", k), ("d", d)):
            if not np.all(np.isfinite(arr)) or not np.all(arr > 0):
                raise ValueError(f"{name} must be finite and strictly positive")
        if not np.all(k * d > b**2):
            raise ValueError("gain gate failed: need k*d > b^2 componentwise")
        gamma = float(self.gamma)
        if not (np.isfinite(gamma) and gamma >= 0):
            raise ValueError("gamma must be finite and >= 0")
        p = float(self.sat_sharpness)
        if not (np.isfinite(p) and p >= 1):
            raise ValueError("sat_sharpness must be finite and >= 1")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "sat_sharpness", p)

    @property
    def n(self) -> int:
        return self.b.shape[0]

    @classmethod
    def uniform(
        cls, n: int, b: float, k: float, d: float, gamma: float = 0.0,
        sat_sharpness: float = 100.0,
    ) -> "OscillatorParams":
        """Same scalar gains on every joint."""
        return cls(
            np.full(n, float(b)), np.full(n, float(k)), np.full(n, float(d)),
            gamma, sat_sharpness,
        )


@dataclass(frozen=True, eq=False)
class OscillatorState:
    """Shape states and phase.

    For the bounded oscillator the fields are (s1, s2, phi); for the
    unbounded one the same record carries (s, s_dot, phi).
    """

    s1: np.ndarray
    s2: np.ndarray
    phi: float

    def __post_init__(self):
        s1 = _vec(self.s1, "s1")
        s2 = _vec(self.s2, "s2")
        if s1.shape != s2.shape:
            raise ValueError("s1 and s2 must share one shape")
        phi = float(self.phi)
        if not (np.all(np.isfinite(s1)) and np.all(np.isfinite(s2)) and np.isfinite(phi)):
            raise ValueError("state must be finite")
        object.__setattr__(self, "s1", s1)
        object.__setattr__(self, "s2", s2)
        object.__setattr__(self, "phi", phi)

    @property
    def n(self) -> int:
        return self.s1.shape[0]


@dataclass(frozen=True, eq=False)
class ShapeDerivatives:
    """RHS bundle handed to the integrator."""

    ds1: np.ndarray
    ds2: np.ndarray
    dphi: float


@dataclass(frozen=True, eq=False)
class TransformedTarget:
    """The desired trajectory pulled back into shape space, plus couplings.

    g_p and g_v are the shape-space targets for s1 and s2; psi is the
    velocity target seen through the current s1 (saturated so it exists for
    any box-feasible trajectory); psi_phi and psi_t are its partial rates
    along the phase and the s1 path; g_a is the phase derivative of g_v.
    The J_* vectors are the diagonal Jacobians of the tanh maps at s1, g_p,
    g_v and psi. e1 and e2 are the shape errors s1 - g_p and s2 - psi.
    """

    g_p: np.ndarray
    g_v: np.ndarray
    g_a: np.ndarray
    psi: np.ndarray
    psi_phi: np.ndarray
    psi_t: np.ndarray
    J_s1: np.ndarray
    J_gp: np.ndarray
    J_gv: np.ndarray
    J_psi: np.ndarray
    e1: np.ndarray
    e2: np.ndarray


def output_map(s1: np.ndarray, limits: OutputLimits) -> np.ndarray:
    """Map shape state s1 to a position strictly inside the box."""
    t = np.clip(np.tanh(s1), -_TANH_CLAMP, _TANH_CLAMP)
    return limits.y_avg + limits.delta_y * t


def output_rate(s1: np.ndarray, s2: np.ndarray, limits: OutputLimits) -> np.ndarray:
    """Output rate from s2; strictly inside (-delta_ydot, delta_ydot).

    s1 is accepted for signature symmetry but the closed form depends only
    on s2.
    """
    del s1
    t = np.clip(np.tanh(s2), -_TANH_CLAMP, _TANH_CLAMP)
    return limits.delta_ydot * t


def inverse_transform(f: np.ndarray, fp: np.ndarray, limits: OutputLimits):
    """Pull a desired (position, rate) point back into shape space.

    Returns:
        (g_p, g_v) such that output_map(g_p) == f and output_rate(., g_v)
        == fp up to rounding.

    Raises:
        BoundaryViolation: if any component touches or leaves the open sets.
    """
    f = np.asarray(f, dtype=float)
    fp = np.asarray(fp, dtype=float)
    rp = (f - limits.y_avg) / limits.delta_y
    rv = fp / limits.delta_ydot
    if np.any(np.abs(rp) >= 1.0) or np.any(np.abs(rv) >= 1.0):
        raise BoundaryViolation(
            "desired point is on or outside the output limits"
        )
    rp = np.clip(rp, -_ATANH_CLAMP, _ATANH_CLAMP)
    rv = np.clip(rv, -_ATANH_CLAMP, _ATANH_CLAMP)
    return np.arctanh(rp), np.arctanh(rv)


def sat_hat(x, p: float):
    """Smooth odd saturation x / (1 + |x|^p)^(1/p).

    Strictly increasing, |result| < 1 for all finite x, and approaches the
    hard unit clamp as p grows. Accepts scalars or arrays.
    """
    sigma, _, _ = _sat_hat_full(np.asarray(x, dtype=float), float(p))
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(sigma)
    return sigma


def _sat_hat_full(x: np.ndarray, p: float):
    """sat_hat with its derivative and a cancellation-safe 1 - sigma^2.

    For |x| > 1 the direct power overflows, so both the value and the
    derivative are evaluated through w = |x|^-p:

        sigma  = sign(x) * (1 + w)^(-1/p)
        sigma' = |x|^-(1+p) * (1 + w)^(-(1+p)/p)

    and 1 - |sigma| is computed with expm1/log1p so 1 - sigma^2 keeps its
    leading digits deep into saturation. |sigma| is clamped a hair below 1
    so atanh(sigma) stays finite.
    """
    ax = np.abs(x)
    inner = ax <= 1.0
    # Reciprocal only where used; 1/subnormal overflows on the dead branch.
    w = np.where(inner, ax, np.divide(1.0, np.where(inner, 1.0, ax))) ** p
    base = (1.0 + w) ** (-1.0 / p)          # (2^(-1/p), 1]
    sigma_in = x * base
    one_minus = -np.expm1(np.log1p(w) * (-1.0 / p))   # 1 - base, accurate when tiny
    one_minus = np.maximum(one_minus, 1e-15)           # atanh guard
    sigma_out = np.sign(x) * (1.0 - one_minus)
    sigma = np.where(inner, sigma_in, sigma_out)
    dsig_in = base ** (1.0 + p)
    with np.errstate(under="ignore"):
        dsig_out = np.where(ax > 1.0, ax, 2.0) ** (-(1.0 + p)) * dsig_in
    dsigma = np.where(inner, dsig_in, dsig_out)
    oms2_in = 1.0 - sigma_in**2              # |sigma_in| <= 2^(-1/p), safe
    oms2_out = one_minus * (2.0 - one_minus)
    one_minus_sq = np.where(inner, oms2_in, oms2_out)
    return sigma, dsigma, one_minus_sq


def _sech2(x: np.ndarray) -> np.ndarray:
    """sech^2, identical to 1 - tanh^2 but underflowing at |x|~372, not ~19."""
    e = np.exp(-2.0 * np.abs(x))
    return 4.0 * e / (1.0 + e) ** 2


def transformed_target(
    traj: PeriodicTrajectory,
    limits: OutputLimits,
    params: OscillatorParams,
    state: OscillatorState,
) -> TransformedTarget:
    """Evaluate the shape-space targets and couplings at the current state.

    Raises:
        NumericalSingularity: if any Jacobian diagonal underflows (state
            escaped to extreme magnitude; unreachable for bounded runs).
    """
    f, fp, fpp = traj.evaluate(state.phi)
    dy = limits.delta_y
    dv = limits.delta_ydot
    p = params.sat_sharpness

    t_gp = np.clip((f - limits.y_avg) / dy, -_ATANH_CLAMP, _ATANH_CLAMP)
    t_gv = np.clip(fp / dv, -_ATANH_CLAMP, _ATANH_CLAMP)
    g_p = np.arctanh(t_gp)
    g_v = np.arctanh(t_gv)

    J_s1 = dy * _sech2(state.s1)
    J_gp = dy * (1.0 - t_gp**2)
    J_gv = dv * (1.0 - t_gv**2)
    if np.any(J_s1 < _JAC_FLOOR) or np.any(J_gp < _JAC_FLOOR) or np.any(J_gv < _JAC_FLOOR):
        raise NumericalSingularity(
            f"transform Jacobian underflow at phi={state.phi:.6g}"
        )
    g_a = fpp / J_gv

    t1 = np.tanh(state.s1)
    t2 = np.tanh(state.s2)
    u = J_s1 * t_gv / J_gp
    sigma, dsigma, oms2 = _sat_hat_full(u, p)
    psi = np.arctanh(sigma)
    J_psi = dv * oms2
    if np.any(J_psi < _JAC_FLOOR):
        raise NumericalSingularity(
            f"saturated-coupling Jacobian underflow at phi={state.phi:.6g}"
        )

    # Partial rates of psi = atanh(sat(u)): the chain factor dsigma/(1-sigma^2)
    # carries the saturation; the bracket is d(u)/d(phi) * J_gp / J_s1.
    bracket = J_gv * g_a + 2.0 * dv**2 * t_gv**2 * t_gp / J_gp
    psi_phi = dsigma * J_s1 * bracket / (J_gp * J_psi)
    # s1 moves psi through J_s1; substituting the s1 dynamics collapses the
    # rate to a product of the two tanh states and the velocity target.
    psi_t = -2.0 * dsigma * dv**2 * t1 * t2 * t_gv / (J_psi * J_gp)

    return TransformedTarget(
        g_p=g_p, g_v=g_v, g_a=g_a, psi=psi, psi_phi=psi_phi, psi_t=psi_t,
        J_s1=J_s1, J_gp=J_gp, J_gv=J_gv, J_psi=J_psi,
        e1=state.s1 - g_p, e2=state.s2 - psi,
    )


def bounded_rhs(
    traj: PeriodicTrajectory,
    limits: OutputLimits,
    params: OscillatorParams,
    state: OscillatorState,
) -> ShapeDerivatives:
    """Time derivatives of (s1, s2, phi) for the bounded-output oscillator."""
    tt = transformed_target(traj, limits, params, state)
    dv = limits.delta_ydot
    b, k, d = params.b, params.k, params.d

    t2 = np.tanh(state.s2)
    tpsi = np.tanh(tt.psi)
    ds1 = dv * t2 / tt.J_s1
    ds2 = (
        tt.psi_phi + tt.psi_t
        - b * tt.e1
        - k * tt.e2
        - (d / b) * dv * (t2 - tpsi) / tt.J_s1
    )
    gp_rate = dv * np.tanh(tt.g_v) / tt.J_gp
    dphi = 1.0 + params.gamma * (
        float(np.dot(d * tt.e1 + b * tt.e2, gp_rate))
        + float(np.dot(b * tt.e1 + k * tt.e2, tt.psi_phi))
    )
    return ShapeDerivatives(ds1=ds1, ds2=ds2, dphi=dphi)


def unbounded_rhs(
    traj: PeriodicTrajectory,
    params: OscillatorParams,
    state: OscillatorState,
) -> ShapeDerivatives:
    """Time derivatives for the unbounded oscillator.

    The state record is reinterpreted: s1 holds s, s2 holds s_dot. The
    second-order shape dynamic is flattened with the kinematic identity
    ds = s_dot.
    """
    f, fp, fpp = traj.evaluate(state.phi)
    b, k = params.b, params.k
    es = state.s1 - f
    ev = state.s2 - fp
    ds = state.s2.copy()
    dsdot = fpp - b * ev - k * es
    dphi = 1.0 + params.gamma * (
        float(np.dot(es, k * fp)) + float(np.dot(ev, fpp))
    )
    return ShapeDerivatives(ds1=ds, ds2=dsdot, dphi=dphi)
