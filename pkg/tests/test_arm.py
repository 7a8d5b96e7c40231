"""Simulation core: kinematics, gravity, and the integrator."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gatelab.arm import (
    ArmModel,
    DimensionError,
    JointState,
    default_arm,
    forward_kinematics,
    gravity_torque,
    gravity_torque_jacobian,
    integrate,
    inverse_kinematics,
    jacobian,
    kinetic_energy,
    potential_energy,
)

WIDE = ((-10.0, 10.0), (-10.0, 10.0))


def make_arm(lengths, masses=None, com=None, **kw):
    masses = masses or tuple(1.0 for _ in lengths)
    com = com or tuple(l / 2 for l in lengths)
    kw.setdefault("joint_limits", tuple(WIDE[0] for _ in lengths))
    return ArmModel(tuple(lengths), tuple(masses), tuple(com), **kw)


angles = st.floats(-3.0, 3.0, allow_nan=False)


class TestForwardKinematics:
    def test_fully_extended(self):
        arm = make_arm([1.0, 1.0])
        ee = forward_kinematics(arm, JointState([0.0, 0.0], [0.0, 0.0]))
        assert np.allclose(ee, [2.0, 0.0])

    def test_rotated_to_plus_y(self):
        arm = make_arm([1.0, 1.0])
        ee = forward_kinematics(arm, JointState([np.pi / 2, 0.0], [0.0, 0.0]))
        assert np.allclose(ee, [0.0, 2.0], atol=1e-12)

    def test_mixed_lengths_quarter_turns(self):
        arm = make_arm([1.0, 0.5])
        ee = forward_kinematics(arm, JointState([np.pi / 4, np.pi / 4],
                                                [0.0, 0.0]))
        assert np.allclose(ee, [0.7071, 1.2071], atol=5e-5)

    def test_dimension_mismatch(self):
        arm = make_arm([1.0, 1.0])
        with pytest.raises(DimensionError):
            forward_kinematics(arm, JointState([0.0], [0.0]))

    @given(q1=angles, q2=angles)
    @settings(max_examples=50, deadline=None)
    def test_reach_bounded_by_link_lengths(self, q1, q2):
        arm = make_arm([1.0, 0.8])
        ee = forward_kinematics(arm, JointState([q1, q2], [0.0, 0.0]))
        assert np.linalg.norm(ee) <= 1.8 + 1e-12

    @given(q1=angles, q2=angles)
    @settings(max_examples=25, deadline=None)
    def test_jacobian_matches_finite_differences(self, q1, q2):
        arm = make_arm([1.0, 0.8])
        q = np.array([q1, q2])
        J = jacobian(arm, JointState(q, np.zeros(2)))
        h = 1e-6
        for k in range(2):
            dq = np.zeros(2)
            dq[k] = h
            fd = (forward_kinematics(arm, JointState(q + dq, np.zeros(2)))
                  - forward_kinematics(arm, JointState(q - dq, np.zeros(2)))) / (2 * h)
            assert np.allclose(J[:, k], fd, atol=1e-8)


class TestGravityTorque:
    def test_pointing_straight_down(self):
        arm = make_arm([1.0, 1.0])
        tau = gravity_torque(arm, JointState([-np.pi / 2, 0.0], [0.0, 0.0]))
        assert np.allclose(tau, [0.0, 0.0], atol=1e-12)

    def test_horizontal_reference_values(self):
        arm = make_arm([1.0, 1.0], masses=[1.0, 1.0], com=[0.5, 0.5])
        tau = gravity_torque(arm, JointState([0.0, 0.0], [0.0, 0.0]))
        assert np.allclose(tau, [19.62, 4.905])

    @given(q1=angles, q2=angles)
    @settings(max_examples=25, deadline=None)
    def test_zero_gravity_gives_zero_torque(self, q1, q2):
        arm = make_arm([1.0, 0.8], gravity=0.0)
        tau = gravity_torque(arm, JointState([q1, q2], [0.0, 0.0]))
        assert np.allclose(tau, 0.0)

    @given(q1=angles, q2=angles)
    @settings(max_examples=25, deadline=None)
    def test_gradient_matches_finite_differences(self, q1, q2):
        arm = default_arm()
        q = np.array([q1, q2])
        G = gravity_torque_jacobian(arm, JointState(q, np.zeros(2)))
        h = 1e-6
        for k in range(2):
            dq = np.zeros(2)
            dq[k] = h
            fd = (gravity_torque(arm, JointState(q + dq, np.zeros(2)))
                  - gravity_torque(arm, JointState(q - dq, np.zeros(2)))) / (2 * h)
            denom = np.maximum(np.abs(G[:, k]), 1.0)
            assert np.all(np.abs(G[:, k] - fd) / denom < 1e-5)


class TestIntegrate:
    def test_gravity_cancellation_is_exact(self):
        arm = default_arm()
        q = JointState([0.7, -0.3], [0.0, 0.0])
        for _ in range(10):
            q = integrate(arm, q, gravity_torque(arm, q), 0.01)
        assert np.allclose(q.positions, [0.7, -0.3], atol=1e-12)
        assert np.allclose(q.velocities, 0.0, atol=1e-12)

    def test_free_drift(self):
        arm = make_arm([1.0, 1.0], gravity=0.0, damping=(0.0, 0.0))
        q = integrate(arm, JointState([0.0, 0.0], [1.0, 0.0]),
                      np.zeros(2), 0.01)
        assert np.isclose(q.positions[0], 0.01)

    def test_single_euler_step_by_hand(self):
        arm = make_arm([1.0, 1.0], gravity=0.0, damping=(0.0, 0.0),
                       inertia=(1.0, 1.0))
        q = integrate(arm, JointState([0.0, 0.0], [0.0, 0.0]),
                      np.array([1.0, 0.0]), 0.01)
        assert np.allclose(q.velocities, [0.01, 0.0])

    def test_energy_non_increasing_unactuated(self):
        arm = default_arm()
        q = JointState([1.2, -0.4], [0.0, 0.0])
        energy = potential_energy(arm, q) + kinetic_energy(arm, q)
        for _ in range(1000):
            q = integrate(arm, q, np.zeros(2), 0.01)
            new_energy = potential_energy(arm, q) + kinetic_energy(arm, q)
            assert new_energy <= energy + 1e-9
            energy = new_energy

    def test_gravity_compensation_residual(self):
        arm = default_arm()
        q = JointState([0.9, 0.4], [0.0, 0.0])
        for _ in range(1000):
            q = integrate(arm, q, gravity_torque(arm, q), 0.01)
            assert np.max(np.abs(q.velocities)) < 1e-9

    def test_joint_limit_clamps_and_zeroes_velocity(self):
        arm = make_arm([1.0, 1.0], gravity=0.0,
                       joint_limits=((-0.1, 0.1), (-0.1, 0.1)))
        q = JointState([0.09, 0.0], [50.0, 0.0])
        q = integrate(arm, q, np.zeros(2), 0.01)
        assert q.positions[0] == 0.1
        assert q.velocities[0] == 0.0

    def test_determinism(self):
        arm = default_arm()
        runs = []
        for _ in range(2):
            q = JointState([0.5, -0.5], [0.1, 0.2])
            traj = []
            for i in range(200):
                q = integrate(arm, q, np.array([np.sin(i * 0.1), 0.3]), 0.01)
                traj.append(q.positions.copy())
            runs.append(np.array(traj))
        assert np.array_equal(runs[0], runs[1])


class TestInverseKinematics:
    def test_round_trip_through_forward_kinematics(self):
        arm = make_arm([1.0, 0.8])
        rng = np.random.Generator(np.random.Philox(key=4))
        for _ in range(100):
            q_true = rng.uniform(-2.5, 2.5, 2)
            target = forward_kinematics(arm, JointState(q_true, np.zeros(2)))
            q = inverse_kinematics(arm, target, q_true + rng.uniform(-0.2, 0.2, 2))
            ee = forward_kinematics(arm, JointState(q, np.zeros(2)))
            assert np.allclose(ee, target, atol=1e-6)

    def test_nearest_branch_preferred(self):
        arm = make_arm([1.0, 1.0])
        target = np.array([1.0, 1.0])  # reachable with elbow up or down
        up = inverse_kinematics(arm, target, np.array([0.0, 1.0]))
        down = inverse_kinematics(arm, target, np.array([1.5, -1.0]))
        assert up[1] > 0 and down[1] < 0

    def test_unreachable_projected_onto_annulus(self):
        arm = make_arm([1.0, 0.8])
        q = inverse_kinematics(arm, np.array([10.0, 0.0]), np.zeros(2))
        ee = forward_kinematics(arm, JointState(q, np.zeros(2)))
        assert np.hypot(*ee) == pytest.approx(1.8, abs=1e-6)

    def test_two_link_only(self):
        arm = make_arm([1.0, 1.0, 1.0])
        with pytest.raises(DimensionError):
            inverse_kinematics(arm, np.array([1.0, 0.0]), np.zeros(3))
