import math

import numpy as np
import pytest

from lanekeep.errors import MisalignedLogsError
from lanekeep.harness.trajlog import TrajectoryLog
from lanekeep.metrics import (
    ComfortConfig,
    PenaltyConfig,
    discomfort,
    evaluate,
    jerk_series,
    lane_penalty,
    lateral_accel,
    marking_distances,
)


class TestMarkingDistances:
    def test_centered(self):
        d_l, d_r = marking_distances(0.0, 3.75, 2.0)
        assert (d_l, d_r) == (0.875, 0.875)

    def test_at_left_marking(self):
        d_l, d_r = marking_distances(0.875, 3.75, 2.0)
        assert d_l == pytest.approx(0.0) and d_r == pytest.approx(1.75)

    def test_crossed(self):
        d_l, _ = marking_distances(1.0, 3.75, 2.0)
        assert d_l == pytest.approx(-0.125)

    def test_vehicle_too_wide(self):
        with pytest.raises(ValueError):
            marking_distances(0.0, 2.0, 2.5)


class TestLanePenalty:
    CFG = PenaltyConfig(w=0.4, beta=0.5)

    def test_crossed_is_one(self):
        assert lane_penalty(-0.1, self.CFG) == 1.0
        assert lane_penalty(-5.0, PenaltyConfig(w=0.875, beta=0.9)) == 1.0

    def test_boundary_zero_at_w(self):
        for beta in (0.25, 0.5, 0.75):
            for w in (0.1, 0.4, 0.875):
                assert lane_penalty(w, PenaltyConfig(w=w, beta=beta)) == pytest.approx(0.0, abs=1e-15)

    def test_value_example(self):
        # (beta*w)^(d/w) - beta*d at beta=0.5, w=0.4, d=0.2: sqrt(0.2) - 0.1
        assert lane_penalty(0.2, self.CFG) == pytest.approx(0.3472136, abs=1e-7)

    def test_limit_at_zero_is_one(self):
        assert lane_penalty(0.0, self.CFG) == pytest.approx(1.0, abs=1e-15)
        assert lane_penalty(1e-12, self.CFG) == pytest.approx(1.0, abs=1e-9)

    def test_zero_width_region(self):
        cfg = PenaltyConfig(w=0.0, beta=0.5)
        assert lane_penalty(-0.01, cfg) == 1.0
        assert lane_penalty(0.0, cfg) == 0.0
        assert lane_penalty(0.01, cfg) == 0.0

    @pytest.mark.parametrize("beta", [0.25, 0.5, 0.75])
    @pytest.mark.parametrize("w", [0.1, 0.4, 0.875])
    def test_monotone_nonincreasing(self, beta, w):
        cfg = PenaltyConfig(w=w, beta=beta)
        d = np.linspace(-0.5, 1.5, 4001)
        p = lane_penalty(d, cfg)
        assert np.all(np.diff(p) <= 1e-15)
        assert np.all((p >= 0) & (p <= 1))


class TestDiscomfort:
    CFG = ComfortConfig(g=1.8)

    def test_zero(self):
        assert discomfort(0.0, self.CFG) == 0.0

    def test_both_branches_equal_one_at_g(self):
        below = discomfort(1.8 - 1e-13, self.CFG)
        at = discomfort(1.8, self.CFG)
        assert at == pytest.approx(1.0, abs=1e-12)
        assert below == pytest.approx(1.0, abs=1e-10)

    def test_double_threshold_value(self):
        # (5/6 + 4/6)^6 = 1.5^6
        assert discomfort(3.6, self.CFG) == pytest.approx(11.390625, abs=1e-9)

    def test_strictly_increasing(self):
        x = np.linspace(0.0, 6.0, 2001)
        y = discomfort(x, self.CFG)
        assert np.all(np.diff(y) > 0)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            discomfort(-0.1, self.CFG)


class TestLateralAccel:
    def test_zero_curvature(self):
        assert lateral_accel(27.78, 0.0) == 0.0

    def test_highway_example(self):
        assert lateral_accel(27.78, 0.0023) == pytest.approx(1.7749, abs=1e-3)
        assert lateral_accel(27.78, 0.0023) < 1.8

    def test_quadratic_in_speed(self):
        assert lateral_accel(20.0, 0.01) == pytest.approx(4 * lateral_accel(10.0, 0.01))


class TestJerkSeries:
    def test_constant_zero(self):
        j = jerk_series(np.full(50, 1.3), 0.05)
        assert np.all(j == 0.0)

    def test_two_sample_ramp_unfiltered(self):
        j = jerk_series(np.array([0.0, 0.18]), 0.1, smooth_window=1)
        assert j == pytest.approx([1.8, 1.8])

    def test_sine_amplitude_raw(self):
        # omega * dt = 0.3: central difference gain sin(x)/x ~ 0.985
        dt, omega = 0.05, 6.0
        t = np.arange(0, 30, dt)
        j = jerk_series(np.sin(omega * t), dt, smooth_window=1)
        assert np.max(np.abs(j)) == pytest.approx(omega, rel=0.05)

    def test_sine_amplitude_filtered(self):
        dt, omega = 0.05, 2.0  # omega * dt = 0.1
        t = np.arange(0, 60, dt)
        j = jerk_series(np.sin(omega * t), dt, smooth_window=5)
        assert np.max(np.abs(j)) == pytest.approx(omega, rel=0.05)

    def test_window_validation(self):
        with pytest.raises(ValueError):
            jerk_series(np.zeros(10), 0.05, smooth_window=4)
        with pytest.raises(ValueError):
            jerk_series(np.zeros(1), 0.05)


def make_log(y_offs, kappas=None, v=19.44, dt=0.05, lane_width=3.75, width=2.0):
    n = len(y_offs)
    y = np.asarray(y_offs, dtype=float)
    kap = np.zeros(n) if kappas is None else np.asarray(kappas, dtype=float)
    margin = (lane_width - width) / 2.0
    return TrajectoryLog(
        t=np.arange(n) * dt,
        x=np.zeros(n),
        y=y,
        psi=np.zeros(n),
        v=np.full(n, v),
        kappa_cmd=kap,
        swa=np.zeros(n),
        y_off=y,
        d_l=margin - y,
        d_r=margin + y,
        a_lat=v**2 * np.abs(kap),
        fault=np.zeros(n, dtype=bool),
        dt=dt,
    )


class TestEvaluate:
    def test_perfectly_centered(self):
        report = evaluate(make_log(np.zeros(100)))
        assert report.good_position_fraction == 1.0
        assert report.mean_lane_penalty == 0.0
        assert report.near_marking_fraction == 0.0

    def test_self_ratio_is_one(self):
        log = make_log(np.zeros(200), kappas=0.002 * np.sin(np.linspace(0, 8, 200)))
        report = evaluate(log, log)
        assert report.accel_discomfort_ratio == pytest.approx(1.0, abs=1e-12)
        assert report.jerk_discomfort_ratio == pytest.approx(1.0, abs=1e-12)

    def test_hand_built_three_tick_log(self):
        # y_off 0.0, 0.6, 1.0 with w=0.4, beta=0.5, margin 0.875:
        # d 0.875/0.875 -> pen 0; d_l 0.275 -> (0.2)^(0.275/0.4) - 0.5*0.275;
        # d_l -0.125 -> pen 1.
        log = make_log([0.0, 0.6, 1.0])
        pcfg = PenaltyConfig(w=0.4, beta=0.5)
        report = evaluate(log, None, pcfg)
        pen1 = 0.2 ** (0.275 / 0.4) - 0.5 * 0.275
        assert report.good_position_fraction == pytest.approx(1 / 3)
        assert report.max_lane_penalty == 1.0
        assert report.mean_lane_penalty == pytest.approx((0.0 + pen1 + 1.0) / 3, abs=1e-12)
        assert report.near_marking_fraction == pytest.approx(2 / 3)

    def test_time_translation_invariance(self):
        kap = 0.003 * np.sin(np.linspace(0, 12, 300))
        log = make_log(np.zeros(300), kap)
        shifted = make_log(np.zeros(300), kap)
        object.__setattr__(shifted, "t", shifted.t + 1000.0)
        a = evaluate(log)
        b = evaluate(shifted)
        assert a == b

    def test_swap_gives_reciprocal_ratios(self):
        rng = np.random.default_rng(0)
        a = make_log(np.zeros(150), 0.004 * rng.standard_normal(150))
        b = make_log(np.zeros(150), 0.002 * rng.standard_normal(150))
        r_ab = evaluate(a, b)
        r_ba = evaluate(b, a)
        assert r_ab.accel_discomfort_ratio * r_ba.accel_discomfort_ratio == pytest.approx(1.0, abs=1e-12)
        assert r_ab.jerk_discomfort_ratio * r_ba.jerk_discomfort_ratio == pytest.approx(1.0, abs=1e-12)

    def test_misaligned_rejected(self):
        with pytest.raises(MisalignedLogsError):
            evaluate(make_log(np.zeros(10)), make_log(np.zeros(11)))
        with pytest.raises(MisalignedLogsError):
            evaluate(make_log(np.zeros(10)), make_log(np.zeros(10), dt=0.1))

    def test_report_shape(self):
        report = evaluate(make_log(np.zeros(50)))
        d = report.as_dict()
        assert 0.0 <= d["good_position_fraction"] <= 1.0
        assert d["accel_discomfort_ratio"] is None
        assert d["penalty_w"] == 0.4 and d["penalty_beta"] == 0.5 and d["comfort_g"] == 1.8
