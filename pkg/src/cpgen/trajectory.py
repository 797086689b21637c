"""Periodic joint trajectories and their feasibility against output limits.

A desired motion is a truncated Fourier series per joint, all joints sharing
one fundamental period. The series gives exact analytic first and second
derivatives, which the oscillator needs for its feed-forward terms. Constant
postures are the degenerate zero-harmonic case.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import PeriodTooShort, ScenarioError

__all__ = [
    "OutputLimits",
    "PeriodicTrajectory",
    "Feasibility",
    "FeasibilityReport",
    "check_feasibility",
    "min_admissible_period",
    "tempo_rescale",
]

# Margin factor applied to the strict-feasibility inequality; sampling cannot
# certify the open condition exactly at the boundary, so demand a sliver.
_FEAS_MARGIN = 1.0 - 1e-6


def _as_vector(x, name: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


@dataclass(frozen=True, eq=False)
class OutputLimits:
    """Per-joint position box and rate bound.

    Attributes:
        y_min: lower position bounds, shape (n,).
        y_max: upper position bounds, shape (n,), strictly above y_min.
        delta_ydot: rate bounds, shape (n,), strictly positive.
    """

    y_min: np.ndarray
    y_max: np.ndarray
    delta_ydot: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "y_min", _as_vector(self.y_min, "y_min"))
        object.__setattr__(self, "y_max", _as_vector(self.y_max, "y_max"))
        object.__setattr__(
            self, "delta_ydot", _as_vector(self.delta_ydot, "delta_ydot")
        )
        if not (self.y_min.shape == self.y_max.shape == self.delta_ydot.shape):
            raise ValueError("limit vectors must share one shape")
        if not np.all(self.y_min < self.y_max):
            raise ValueError("y_min must be strictly below y_max componentwise")
        if not np.all(self.delta_ydot > 0):
            raise ValueError("delta_ydot must be strictly positive")

    @property
    def n(self) -> int:
        return self.y_min.shape[0]

    @property
    def y_avg(self) -> np.ndarray:
        return 0.5 * (self.y_max + self.y_min)

    @property
    def delta_y(self) -> np.ndarray:
        return 0.5 * (self.y_max - self.y_min)

    def to_json(self) -> dict:
        return {
            "y_min": self.y_min.tolist(),
            "y_max": self.y_max.tolist(),
            "delta_ydot": self.delta_ydot.tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "OutputLimits":
        try:
            return cls(obj["y_min"], obj["y_max"], obj["delta_ydot"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"bad limits object: {exc}") from exc


@dataclass(frozen=True, eq=False)
class PeriodicTrajectory:
    """Truncated Fourier series f(phi) with exact derivatives.

    f_i(phi) = dc_i + sum_k [ a_ik cos(k w phi) + b_ik sin(k w phi) ],
    w = 2 pi / period, harmonics k = 1..K. A constant trajectory has K = 0.

    Attributes:
        dc: mean values, shape (n,).
        cos_coeffs: cosine coefficients, shape (n, K).
        sin_coeffs: sine coefficients, shape (n, K).
        period: fundamental period in seconds, > 0.
    """

    dc: np.ndarray
    cos_coeffs: np.ndarray
    sin_coeffs: np.ndarray
    period: float

    def __post_init__(self):
        dc = _as_vector(self.dc, "dc")
        cos_c = np.atleast_2d(np.asarray(self.cos_coeffs, dtype=float))
        sin_c = np.atleast_2d(np.asarray(self.sin_coeffs, dtype=float))
        n = dc.shape[0]
        if cos_c.size == 0:
            cos_c = cos_c.reshape(n, 0)
        if sin_c.size == 0:
            sin_c = sin_c.reshape(n, 0)
        if cos_c.shape[0] != n or sin_c.shape[0] != n:
            raise ValueError("coefficient rows must match dc length")
        if cos_c.shape != sin_c.shape:
            raise ValueError("cos and sin coefficient arrays must share a shape")
        if not (np.all(np.isfinite(cos_c)) and np.all(np.isfinite(sin_c))):
            raise ValueError("coefficients must be finite")
        period = float(self.period)
        if not (period > 0 and np.isfinite(period)):
            raise ValueError("period must be a positive finite number")
        object.__setattr__(self, "dc", dc)
        object.__setattr__(self, "cos_coeffs", cos_c)
        object.__setattr__(self, "sin_coeffs", sin_c)
        object.__setattr__(self, "period", period)

    @property
    def n(self) -> int:
        return self.dc.shape[0]

    @property
    def harmonics(self) -> int:
        return self.cos_coeffs.shape[1]

    @property
    def is_constant(self) -> bool:
        return self.harmonics == 0 or (
            not np.any(self.cos_coeffs) and not np.any(self.sin_coeffs)
        )

    @classmethod
    def constant(cls, values, period: float = 1.0) -> "PeriodicTrajectory":
        """Constant posture; period is nominal only (f' = f'' = 0)."""
        values = _as_vector(values, "values")
        n = values.shape[0]
        return cls(values, np.zeros((n, 0)), np.zeros((n, 0)), period)

    def evaluate(self, phi: float):
        """Evaluate f, f', f'' at a scalar phase.

        Returns:
            Tuple (f, fp, fpp) of shape-(n,) arrays.
        """
        f, fp, fpp = self.evaluate_many(np.asarray([phi], dtype=float))
        return f[0], fp[0], fpp[0]

    def evaluate_many(self, phis: np.ndarray):
        """Vectorized evaluation on a phase grid.

        Args:
            phis: shape (m,) array of phases.

        Returns:
            Tuple (f, fp, fpp) of shape-(m, n) arrays.
        """
        phis = np.asarray(phis, dtype=float)
        m = phis.shape[0]
        n = self.n
        K = self.harmonics
        if K == 0:
            f = np.broadcast_to(self.dc, (m, n)).copy()
            z = np.zeros((m, n))
            return f, z, z.copy()
        w = 2.0 * np.pi / self.period
        kw = w * np.arange(1, K + 1)               # (K,)
        theta = phis[:, None] * kw[None, :]        # (m, K)
        c, s = np.cos(theta), np.sin(theta)
        a, b = self.cos_coeffs, self.sin_coeffs    # (n, K)
        f = self.dc + c @ a.T + s @ b.T
        fp = (c * kw) @ b.T - (s * kw) @ a.T
        fpp = -(c * kw**2) @ a.T - (s * kw**2) @ b.T
        return f, fp, fpp

    def with_period(self, period: float) -> "PeriodicTrajectory":
        """Same Fourier coefficients with a different fundamental period."""
        return PeriodicTrajectory(self.dc, self.cos_coeffs, self.sin_coeffs, period)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "period": self.period,
            "components": [
                {
                    "dc": float(self.dc[i]),
                    "cos": self.cos_coeffs[i].tolist(),
                    "sin": self.sin_coeffs[i].tolist(),
                }
                for i in range(self.n)
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PeriodicTrajectory":
        """Parse the trajectory file schema.

        Unequal cos/sin list lengths are zero-padded to the longest, so a
        hand-written file may give only the terms it needs.
        """
        try:
            comps = obj["components"]
            period = float(obj["period"])
            n = int(obj.get("n", len(comps)))
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"bad trajectory object: {exc}") from exc
        if n != len(comps):
            raise ScenarioError(
                f"trajectory declares n={n} but has {len(comps)} components"
            )
        if n == 0:
            raise ScenarioError("trajectory needs at least one component")
        dc = []
        cos_lists, sin_lists = [], []
        for i, comp in enumerate(comps):
            if not isinstance(comp, dict) or "dc" not in comp:
                raise ScenarioError(f"component {i} must be an object with 'dc'")
            dc.append(float(comp["dc"]))
            cos_lists.append([float(v) for v in comp.get("cos", [])])
            sin_lists.append([float(v) for v in comp.get("sin", [])])
        K = max(
            max((len(c) for c in cos_lists), default=0),
            max((len(s) for s in sin_lists), default=0),
        )
        cos_c = np.zeros((n, K))
        sin_c = np.zeros((n, K))
        for i in range(n):
            cos_c[i, : len(cos_lists[i])] = cos_lists[i]
            sin_c[i, : len(sin_lists[i])] = sin_lists[i]
        try:
            return cls(np.asarray(dc), cos_c, sin_c, period)
        except ValueError as exc:
            raise ScenarioError(str(exc)) from exc

    @classmethod
    def load(cls, path) -> "PeriodicTrajectory":
        with open(Path(path)) as fh:
            try:
                obj = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ScenarioError(f"{path}: {exc}") from exc
        return cls.from_json(obj)

    def save(self, path) -> None:
        with open(Path(path), "w") as fh:
            json.dump(self.to_json(), fh, indent=2)
            fh.write("\n")


class Feasibility(enum.Enum):
    """Classification of a trajectory against output limits.

    STRICT: the transform argument stays inside the unit interval for every
        phase, so the velocity-target coupling needs no saturation.
    BOX_ONLY: position/rate boxes hold but the strict inequality fails
        somewhere; the saturated coupling handles it.
    INFEASIBLE: the trajectory leaves the open position box or exceeds the
        rate bound; rejected for generation.
    """

    STRICT = "strict"
    BOX_ONLY = "box_only"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class FeasibilityReport:
    """Grid-check outcome for one (trajectory, limits) pair.

    Attributes:
        classification: see Feasibility.
        box_margin: min over the grid of the worst open-box slack
            (positive means strictly inside; position and rate pooled).
        strict_margin: min over the grid of RHS - LHS of the strict
            inequality (positive means strictly satisfiable).
        samples: grid size used.
    """

    classification: Feasibility
    box_margin: float
    strict_margin: float
    samples: int


def _feasibility_margins(traj: PeriodicTrajectory, limits: OutputLimits, samples: int):
    if limits.n != traj.n:
        raise ValueError(f"dimension mismatch: trajectory n={traj.n}, limits n={limits.n}")
    phis = np.linspace(0.0, traj.period, samples, endpoint=False)
    f, fp, _ = traj.evaluate_many(phis)
    dy = limits.delta_y
    dv = limits.delta_ydot
    dev = f - limits.y_avg
    # Open-box slack, normalized per component so joints are comparable.
    pos_slack = (dy - np.abs(dev)) / dy
    rate_slack = (dv - np.abs(fp)) / dv
    box_margin = min(pos_slack.min(), rate_slack.min())
    # Strict condition: dy^2 |f'| <= |dy^2 - dev^2| dv componentwise.
    lhs = dy**2 * np.abs(fp)
    rhs = np.abs(dy**2 - dev**2) * dv
    strict_margin = float((_FEAS_MARGIN * rhs - lhs).min())
    return float(box_margin), strict_margin


def check_feasibility(
    traj: PeriodicTrajectory, limits: OutputLimits, samples: int = 10_000
) -> FeasibilityReport:
    """Classify a trajectory against the output limits on a uniform grid.

    Args:
        traj: candidate desired trajectory.
        limits: output box and rate bounds.
        samples: grid points over one period (>= 100).

    Returns:
        FeasibilityReport with the classification and worst-case margins.
    """
    if samples < 100:
        raise ValueError("samples must be >= 100")
    box_margin, strict_margin = _feasibility_margins(traj, limits, samples)
    if box_margin <= 0:
        cls = Feasibility.INFEASIBLE
    elif strict_margin >= 0:
        cls = Feasibility.STRICT
    else:
        cls = Feasibility.BOX_ONLY
    return FeasibilityReport(cls, box_margin, strict_margin, samples)


def min_admissible_period(
    traj: PeriodicTrajectory, limits: OutputLimits, samples: int = 10_000
) -> float:
    """Smallest period whose rescale keeps every joint rate under its bound.

    The rescaled derivative is f_nom' * (T_nom / T_new), so the bound is
    T_new > T_nom * max_i ( max_phi |f_nom,i'| / delta_ydot_i ), taken
    per component.
    """
    phis = np.linspace(0.0, traj.period, samples, endpoint=False)
    _, fp, _ = traj.evaluate_many(phis)
    peak_ratio = (np.abs(fp) / limits.delta_ydot).max() if fp.size else 0.0
    return float(traj.period * peak_ratio)


def tempo_rescale(
    nominal: PeriodicTrajectory,
    new_period: float,
    limits: OutputLimits,
    samples: int = 10_000,
) -> PeriodicTrajectory:
    """Replay the nominal shape over a different period.

    Coefficients are unchanged; only the fundamental frequency moves, which
    scales f' by T_nom/T_new and f'' by its square.

    Raises:
        PeriodTooShort: if the sped-up derivative would exceed a rate bound;
            carries the minimum admissible period.
    """
    new_period = float(new_period)
    if not (new_period > 0 and np.isfinite(new_period)):
        raise ValueError("new_period must be positive and finite")
    floor = min_admissible_period(nominal, limits, samples)
    if new_period <= floor:
        raise PeriodTooShort(new_period, floor)
    return nominal.with_period(new_period)
