"""Two arms, one virtual spring: a tour of the bilateral coupling laws.

Couples a leader and follower arm with the PD laws from gatelab.bilateral,
shows how the follower tracks a moving leader, and how the force-reflection
scaling alpha changes what the leader "feels" without affecting tracking.
"""

import numpy as np

from gatelab.arm import JointState, default_arm, integrate
from gatelab.bilateral import (
    CouplingGains,
    GainProfile,
    Mode,
    compensated_torque,
    follower_torque,
    gains_for_mode,
    leader_torque,
)

DT = 0.01


def simulate(alpha: float, seconds: float = 3.0):
    """Leader sweeps a slow sine; follower is coupled. Returns histories.

    ``alpha`` scales both reflection terms so 0.0 means a fully numb leader.
    """
    arm = default_arm()
    profile = GainProfile()
    base = gains_for_mode(Mode.TELEOP, profile, arm)
    gains = CouplingGains(base.kp, base.kd, alpha, alpha)

    leader = JointState([0.0, 0.0], [0.0, 0.0])
    follower = JointState([0.0, 0.0], [0.0, 0.0])
    gaps, felt = [], []
    for k in range(int(seconds / DT)):
        # The human hand: drive the leader along a reference trajectory.
        target = 0.6 * np.sin(2 * np.pi * 0.3 * k * DT)
        leader = JointState([target, 0.5 * target], leader.velocities)

        tau_l = leader_torque(leader, follower, gains)
        tau_f = compensated_torque(
            follower_torque(leader, follower, gains), arm, follower)
        follower = integrate(arm, follower, tau_f, DT)

        gaps.append(np.max(np.abs(leader.positions - follower.positions)))
        felt.append(np.max(np.abs(tau_l)))
    return np.array(gaps), np.array(felt)


def main():
    print("alpha   tracking gap (rad)   reflected torque (N*m)")
    for alpha in (0.0, 0.3, 1.0):
        gaps, felt = simulate(alpha)
        print(f"{alpha:5.1f}   {gaps[-100:].mean():18.4f}"
              f"   {felt[-100:].mean():22.4f}")
    print()
    print("Tracking is one-directional (follower chases leader), so the gap")
    print("is unchanged by alpha -- only the torque fed back to the leader")
    print("scales. At alpha=0 the operator feels nothing; at alpha=1 the")
    print("leader and follower torques are exact mirror images.")


if __name__ == "__main__":
    main()
