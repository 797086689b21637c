"""Compiled kernel vs the numpy reference implementations.

The reference route defines the semantics; the kernel must reproduce it to
near machine precision, both per evaluation and across whole runs.
"""

import numpy as np
import pytest

from cpgen import IntegratorConfig, bounded_rhs, step
from cpgen._kernel import (
    STATUS_NONFINITE,
    STATUS_OK,
    STATUS_SINGULAR,
    record_width,
    rhs_bounded_once,
    run_bounded,
)
from cpgen.analysis import lyapunov_v3
from cpgen.cpg import _traj_arrays
from cpgen.oscillator import OscillatorState

from helpers import (
    interior_state,
    make_box_only_trajectory,
    make_limits,
    make_strict_trajectory,
    random_params,
)


def _kernel_args(traj, limits, params):
    dc, ca, sa, omega = _traj_arrays(traj)
    return (
        dc, ca, sa, omega,
        limits.y_avg, limits.delta_y, limits.delta_ydot,
        params.b, params.k, params.d, params.gamma, params.sat_sharpness,
    )


def _alloc_records(nsteps, stride, n, emit_final=True):
    if stride <= 0:
        return np.empty((0, record_width(n)))
    rows = (nsteps + stride - 1) // stride + (1 if emit_final else 0)
    return np.empty((rows, record_width(n)))


class TestSingleEvaluation:
    @pytest.mark.parametrize("kind", ["strict", "box_only"])
    def test_matches_reference(self, kind, rng):
        worst = 0.0
        for _ in range(150):
            n = int(rng.integers(1, 5))
            limits = make_limits(rng, n)
            traj = (
                make_strict_trajectory(rng, limits)
                if kind == "strict"
                else make_box_only_trajectory(rng, limits)
            )
            params = random_params(rng, n)
            st = interior_state(rng, limits)
            ds1, ds2, dphi, v3, ok = rhs_bounded_once(
                st.s1, st.s2, st.phi, *_kernel_args(traj, limits, params)
            )
            assert ok
            ref = bounded_rhs(traj, limits, params, st)
            np.testing.assert_allclose(ds1, ref.ds1, rtol=1e-12, atol=1e-12)
            np.testing.assert_allclose(ds2, ref.ds2, rtol=1e-12, atol=1e-12)
            np.testing.assert_allclose(dphi, ref.dphi, rtol=1e-12, atol=1e-12)
            np.testing.assert_allclose(
                v3, lyapunov_v3(traj, limits, params, st), rtol=1e-12, atol=1e-12
            )
            worst = max(worst, float(np.abs(ds2 - ref.ds2).max()))
        assert np.isfinite(worst)

    def test_reports_singular(self, rng):
        limits = make_limits(rng, 1)
        traj = make_strict_trajectory(rng, limits)
        params = random_params(rng, 1)
        *_, ok = rhs_bounded_once(
            np.array([800.0]), np.zeros(1), 0.0, *_kernel_args(traj, limits, params)
        )
        assert not ok


class TestRunLoop:
    @pytest.mark.parametrize("use_euler", [False, True])
    def test_matches_stepwise_reference(self, use_euler, rng):
        n = 2
        limits = make_limits(rng, n)
        traj = make_strict_trajectory(rng, limits)
        params = random_params(rng, n, gamma=4.0)
        st0 = interior_state(rng, limits)
        h = 1e-3
        nsteps = 1000

        s1 = st0.s1.copy()
        s2 = st0.s2.copy()
        status, done, p_acc, t_acc, violations, rows = run_bounded(
            *_kernel_args(traj, limits, params),
            s1, s2, st0.phi, 0.0, h, nsteps, use_euler,
            _alloc_records(nsteps, 0, n), 0, False,
        )
        assert status == STATUS_OK and done == nsteps and violations == 0

        cfg = IntegratorConfig(step_h=h, method="euler" if use_euler else "rk4")
        ref = st0
        t = 0.0
        rhs = lambda state, _t: bounded_rhs(traj, limits, params, state)
        for _ in range(nsteps):
            ref = step(rhs, ref, t, cfg)
            t += h
        np.testing.assert_allclose(s1, ref.s1, rtol=1e-10, atol=1e-10)
        np.testing.assert_allclose(s2, ref.s2, rtol=1e-10, atol=1e-10)
        np.testing.assert_allclose(st0.phi + p_acc, ref.phi, rtol=1e-12, atol=1e-10)
        assert t_acc == pytest.approx(nsteps * h, abs=1e-12)

    def test_record_rows_are_consistent(self, rng):
        n = 3
        limits = make_limits(rng, n)
        traj = make_strict_trajectory(rng, limits)
        params = random_params(rng, n, gamma=2.0)
        st0 = interior_state(rng, limits)
        nsteps, stride = 100, 7
        records = _alloc_records(nsteps, stride, n)
        s1, s2 = st0.s1.copy(), st0.s2.copy()
        status, *_, rows = run_bounded(
            *_kernel_args(traj, limits, params),
            s1, s2, st0.phi, 5.0, 1e-3, nsteps, False,
            records, stride, True,
        )
        assert status == STATUS_OK
        assert rows == int(np.ceil(nsteps / stride)) + 1
        got = records[:rows]
        # Pre-step rows land on the stride grid starting at t0 = 5.
        np.testing.assert_allclose(
            got[:-1, 0], 5.0 + stride * 1e-3 * np.arange(rows - 1), atol=1e-12
        )
        assert got[-1, 0] == pytest.approx(5.0 + nsteps * 1e-3, abs=1e-12)
        for row in got:
            st = OscillatorState(row[2 : 2 + n], row[2 + n : 2 + 2 * n], row[1])
            f, fp, _ = traj.evaluate(st.phi)
            np.testing.assert_allclose(row[2 + 4 * n : 2 + 5 * n], f, atol=1e-12)
            np.testing.assert_allclose(row[2 + 5 * n : 2 + 6 * n], fp, atol=1e-12)
            # y/ydot columns reproduce the output maps of the state columns.
            np.testing.assert_allclose(
                row[2 + 2 * n : 2 + 3 * n],
                limits.y_avg + limits.delta_y * np.tanh(st.s1),
                atol=1e-12,
            )
            np.testing.assert_allclose(
                row[2 + 3 * n : 2 + 4 * n],
                limits.delta_ydot * np.tanh(st.s2),
                atol=1e-12,
            )
            assert row[2 + 6 * n] == pytest.approx(
                lyapunov_v3(traj, limits, params, st), rel=1e-10, abs=1e-12
            )
            assert row[2 + 6 * n + 1] == pytest.approx(
                bounded_rhs(traj, limits, params, st).dphi, rel=1e-10, abs=1e-12
            )

    def test_first_row_is_initial_state(self, rng):
        n = 2
        limits = make_limits(rng, n)
        traj = make_strict_trajectory(rng, limits)
        params = random_params(rng, n)
        st0 = interior_state(rng, limits)
        records = _alloc_records(10, 1, n)
        s1, s2 = st0.s1.copy(), st0.s2.copy()
        run_bounded(
            *_kernel_args(traj, limits, params),
            s1, s2, st0.phi, 0.0, 1e-3, 10, False, records, 1, True,
        )
        np.testing.assert_array_equal(records[0, 2 : 2 + n], st0.s1)
        np.testing.assert_array_equal(records[0, 2 + n : 2 + 2 * n], st0.s2)
        assert records[0, 1] == st0.phi and records[0, 0] == 0.0

    def test_gamma_zero_phase_is_bitwise_time(self, rng):
        n = 2
        limits = make_limits(rng, n)
        traj = make_strict_trajectory(rng, limits)
        params = random_params(rng, n, gamma=0.0)
        st0 = interior_state(rng, limits)
        s1, s2 = st0.s1.copy(), st0.s2.copy()
        status, _, p_acc, t_acc, *_ = run_bounded(
            *_kernel_args(traj, limits, params),
            s1, s2, st0.phi, 0.0, 1e-3, 50_000, False,
            _alloc_records(0, 0, n), 0, False,
        )
        assert status == STATUS_OK
        assert p_acc == t_acc  # identical accumulator arithmetic

    def test_nan_state_reported_nonfinite(self, rng):
        n = 1
        limits = make_limits(rng, n)
        traj = make_strict_trajectory(rng, limits)
        params = random_params(rng, n)
        s1 = np.array([np.nan])
        s2 = np.zeros(1)
        status, done, *_ = run_bounded(
            *_kernel_args(traj, limits, params),
            s1, s2, 0.0, 0.0, 1e-3, 10, False, _alloc_records(0, 0, n), 0, False,
        )
        assert status == STATUS_NONFINITE
        assert done < 10

    def test_escaped_state_reported_singular(self, rng):
        n = 1
        limits = make_limits(rng, n)
        traj = make_strict_trajectory(rng, limits)
        params = random_params(rng, n)
        s1 = np.array([800.0])  # sech^2 underflows past ~372
        s2 = np.zeros(1)
        status, done, *_ = run_bounded(
            *_kernel_args(traj, limits, params),
            s1, s2, 0.0, 0.0, 1e-3, 10, False, _alloc_records(0, 0, n), 0, False,
        )
        assert status == STATUS_SINGULAR
        assert done == 0

    def test_healthy_run_has_zero_violations(self, rng):
        for _ in range(5):
            n = int(rng.integers(1, 4))
            limits = make_limits(rng, n)
            traj = make_strict_trajectory(rng, limits)
            params = random_params(rng, n, gamma=5.0)
            st0 = interior_state(rng, limits)
            s1, s2 = st0.s1.copy(), st0.s2.copy()
            status, _, _, _, violations, _ = run_bounded(
                *_kernel_args(traj, limits, params),
                s1, s2, st0.phi, 0.0, 1e-3, 5000, False,
                _alloc_records(0, 0, n), 0, False,
            )
            assert status == STATUS_OK and violations == 0
