"""Bilateral coupling laws, gain scheduling, and the mode machine."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gatelab.arm import JointState, default_arm, gravity_torque, integrate
from gatelab.bilateral import (
    ConfigurationError,
    ControlEvent,
    CouplingGains,
    DATA_UTILITY_EVENTS,
    GainProfile,
    Mode,
    compensated_torque,
    follower_torque,
    gains_for_mode,
    leader_torque,
    mirror_torque,
    mode_transition,
)

finite = st.floats(-5.0, 5.0, allow_nan=False)
states = st.builds(
    lambda p1, p2, v1, v2: JointState([p1, p2], [v1, v2]),
    finite, finite, finite, finite)


def make_gains(kp=10.0, kd=0.0, alpha=1.0, beta_d=1.0):
    return CouplingGains(np.full(2, kp), np.full(2, kd), alpha, beta_d)


class TestControlLaws:
    def test_synchronized_arms_zero_torque(self):
        q = JointState([0.3, -0.2], [0.1, 0.0])
        assert np.allclose(leader_torque(q, q.copy(), make_gains()), 0.0)
        assert np.allclose(follower_torque(q, q.copy(), make_gains()), 0.0)

    def test_leader_torque_reference_value(self):
        leader = JointState([0.1, 0.0], [0.0, 0.0])
        follower = JointState([0.2, 0.0], [0.0, 0.0])
        tau = leader_torque(leader, follower, make_gains(alpha=0.5))
        assert np.allclose(tau, [0.5, 0.0])

    def test_follower_torque_reference_value(self):
        leader = JointState([0.2, 0.0], [0.0, 0.0])
        follower = JointState([0.1, 0.0], [0.0, 0.0])
        tau = follower_torque(leader, follower, make_gains())
        assert np.allclose(tau, [1.0, 0.0])

    def test_reflection_disabled(self):
        leader = JointState([0.9, -0.4], [1.0, 2.0])
        follower = JointState([-0.3, 0.8], [-1.0, 0.5])
        tau = leader_torque(leader, follower,
                            make_gains(kd=3.0, alpha=0.0, beta_d=0.0))
        assert np.allclose(tau, 0.0)

    @given(leader=states, follower=states)
    @settings(max_examples=100, deadline=None)
    def test_antisymmetry_at_unit_scaling(self, leader, follower):
        gains = make_gains(kp=13.0, kd=4.0, alpha=1.0, beta_d=1.0)
        tl = leader_torque(leader, follower, gains)
        tf = follower_torque(leader, follower, gains)
        assert np.array_equal(tl, -tf)

    @given(leader=states, follower=states,
           alpha=st.floats(0, 1), beta_d=st.floats(0, 1))
    @settings(max_examples=100, deadline=None)
    def test_linear_scaling_decomposition(self, leader, follower, alpha, beta_d):
        unit = make_gains(kp=13.0, kd=4.0)
        pos_term = leader_torque(leader, follower,
                                 make_gains(kp=13.0, kd=0.0))
        vel_term = leader_torque(leader, follower,
                                 make_gains(kp=0.0, kd=4.0))
        scaled = leader_torque(leader, follower,
                               make_gains(kp=13.0, kd=4.0,
                                          alpha=alpha, beta_d=beta_d))
        assert np.allclose(scaled, alpha * pos_term + beta_d * vel_term,
                           atol=1e-12)

    def test_gain_validation(self):
        with pytest.raises(ConfigurationError):
            CouplingGains(np.array([-1.0, 1.0]), np.zeros(2), 1.0, 1.0)
        with pytest.raises(ConfigurationError):
            CouplingGains(np.ones(2), np.zeros(2), 1.5, 1.0)


class TestModeMachine:
    def test_takeover_entry(self):
        assert mode_transition(Mode.AUTONOMOUS, ControlEvent.HUMAN_GRAB) \
            is Mode.TAKEOVER

    def test_grab_outside_autonomous_is_noop(self):
        assert mode_transition(Mode.TELEOP, ControlEvent.HUMAN_GRAB) \
            is Mode.TELEOP

    def test_release_returns_to_autonomous(self):
        assert mode_transition(Mode.TAKEOVER, ControlEvent.HUMAN_RELEASE) \
            is Mode.AUTONOMOUS

    def test_total_and_takeover_only_from_autonomous_grab(self):
        for mode in Mode:
            for event in ControlEvent:
                new = mode_transition(mode, event)
                assert isinstance(new, Mode)
                if new is Mode.TAKEOVER and mode is not Mode.TAKEOVER:
                    assert mode is Mode.AUTONOMOUS
                    assert event is ControlEvent.HUMAN_GRAB

    def test_data_utilities_never_change_mode(self):
        for mode in Mode:
            for event in DATA_UTILITY_EVENTS:
                assert mode_transition(mode, event) is mode

    def test_stop_always_idles(self):
        for mode in Mode:
            assert mode_transition(mode, ControlEvent.STOP) is Mode.IDLE


class TestGainScheduling:
    def test_autonomous_is_stiff(self):
        gains = gains_for_mode(Mode.AUTONOMOUS, GainProfile(), default_arm())
        assert np.allclose(gains.kp, 40.0)
        assert gains.alpha == 1.0 and gains.beta_d == 1.0

    def test_teleop_is_soft(self):
        gains = gains_for_mode(Mode.TELEOP, GainProfile(), default_arm())
        assert np.allclose(gains.kp, 10.0)
        assert gains.alpha == 0.3

    def test_idle_is_zero(self):
        gains = gains_for_mode(Mode.IDLE, GainProfile(), default_arm())
        assert np.allclose(gains.kp, 0.0) and np.allclose(gains.kd, 0.0)

    def test_missing_profile_rejected(self):
        with pytest.raises(ConfigurationError):
            gains_for_mode(Mode.TELEOP, None, default_arm())


class TestCompensation:
    def test_pointing_down_zero(self):
        arm = default_arm()
        q = JointState([-np.pi / 2, 0.0], [0.0, 0.0])
        assert np.allclose(compensated_torque(np.zeros(2), arm, q), 0.0,
                           atol=1e-12)

    def test_horizontal_reference(self):
        arm = default_arm()
        q = JointState([0.0, 0.0], [0.0, 0.0])
        tau = compensated_torque(np.zeros(2), arm, q)
        # m=(1.0, 0.8), l=(1.0, _), lc=(0.5, 0.4):
        # tau1 = g*((m1*lc1 + m2*l1) + m2*lc2) = 9.81*(1.3 + 0.32)
        # tau2 = g*(m2*lc2) = 9.81*0.32
        assert np.allclose(tau, [15.8922, 3.1392])

    def test_exact_cancellation(self):
        arm = default_arm()
        q = JointState([0.4, 1.1], [0.0, 0.0])
        tau = compensated_torque(-gravity_torque(arm, q), arm, q)
        assert np.allclose(tau, 0.0, atol=1e-12)


class TestCoupledConvergence:
    def test_half_radian_offset_converges_within_two_seconds(self):
        arm = default_arm()
        profile = GainProfile()
        gains = gains_for_mode(Mode.AUTONOMOUS, profile, arm)
        leader = JointState([0.5, 0.0], [0.0, 0.0])
        follower = JointState([0.0, 0.0], [0.0, 0.0])
        dt = 0.01
        for _ in range(200):  # 2 simulated seconds
            tl = compensated_torque(
                leader_torque(leader, follower, gains), arm, leader)
            tf = compensated_torque(
                follower_torque(leader, follower, gains), arm, follower)
            leader = integrate(arm, leader, tl, dt)
            follower = integrate(arm, follower, tf, dt)
        gap = np.max(np.abs(leader.positions - follower.positions))
        assert gap < 0.01

    def test_mirror_torque_swaps_roles(self):
        leader = JointState([0.2, 0.1], [0.0, 0.0])
        follower = JointState([0.5, -0.1], [0.0, 0.0])
        gains = make_gains(kp=7.0, kd=2.0)
        assert np.array_equal(mirror_torque(leader, follower, gains),
                              follower_torque(follower, leader, gains))
