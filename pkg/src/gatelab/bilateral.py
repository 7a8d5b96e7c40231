"""Bilateral leader-follower coupling, mode machine, and gain scheduling.

The leader device feels a scaled reflection of the follower tracking error
(alpha scales the stiffness term, beta_d the damping term); the follower
tracks the leader at full gains. Gravity compensation is injected on top of
either raw torque.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .arm import ArmModel, DimensionError, JointState, gravity_torque


class Mode(Enum):
    IDLE = "IDLE"
    TELEOP = "TELEOP"
    AUTONOMOUS = "AUTONOMOUS"
    TAKEOVER = "TAKEOVER"


class ControlEvent(Enum):
    ENGAGE_TELEOP = "ENGAGE_TELEOP"
    START_POLICY = "START_POLICY"
    HUMAN_GRAB = "HUMAN_GRAB"
    HUMAN_RELEASE = "HUMAN_RELEASE"
    STOP = "STOP"
    SAVE = "SAVE"
    RESET = "RESET"
    DISCARD = "DISCARD"


DATA_UTILITY_EVENTS = frozenset({ControlEvent.SAVE, ControlEvent.RESET,
                                 ControlEvent.DISCARD})


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class CouplingGains:
    kp: np.ndarray
    kd: np.ndarray
    alpha: float
    beta_d: float

    def __post_init__(self):
        object.__setattr__(self, "kp", np.asarray(self.kp, dtype=np.float64))
        object.__setattr__(self, "kd", np.asarray(self.kd, dtype=np.float64))
        if np.any(self.kp < 0) or np.any(self.kd < 0):
            raise ConfigurationError("gains must be non-negative")
        if not (0.0 <= self.alpha <= 1.0 and 0.0 <= self.beta_d <= 1.0):
            raise ConfigurationError("alpha and beta_d must be in [0, 1]")


@dataclass(frozen=True)
class GainProfile:
    """Per-mode gain table; values are per-joint stiffness magnitudes."""
    kp_stiff: float = 40.0
    kp_soft: float = 10.0
    alpha_teleop: float = 0.3
    beta_d_teleop: float = 0.3
    # In AUTONOMOUS the leader mirrors the follower at full reflection.
    alpha_autonomous: float = 1.0
    beta_d_autonomous: float = 1.0
    grab_threshold: float = 0.15  # rad deviation that triggers takeover


def _critical_kd(kp: np.ndarray, arm: ArmModel) -> np.ndarray:
    return 2.0 * np.sqrt(kp * np.asarray(arm.inertia))


def _check_pair(leader: JointState, follower: JointState):
    if leader.positions.shape != follower.positions.shape:
        raise DimensionError("leader/follower dimensions do not match")


def leader_torque(leader: JointState, follower: JointState,
                  gains: CouplingGains) -> np.ndarray:
    """Reflected torque on the leader: alpha*Kp*(qF-qL) + beta_d*Kd*(vF-vL)."""
    _check_pair(leader, follower)
    return (gains.alpha * gains.kp * (follower.positions - leader.positions)
            + gains.beta_d * gains.kd * (follower.velocities - leader.velocities))


def follower_torque(leader: JointState, follower: JointState,
                    gains: CouplingGains) -> np.ndarray:
    """Tracking torque on the follower: Kp*(qL-qF) + Kd*(vL-vF)."""
    _check_pair(leader, follower)
    return (gains.kp * (leader.positions - follower.positions)
            + gains.kd * (leader.velocities - follower.velocities))


_TRANSITIONS = {
    (Mode.IDLE, ControlEvent.ENGAGE_TELEOP): Mode.TELEOP,
    (Mode.IDLE, ControlEvent.START_POLICY): Mode.AUTONOMOUS,
    (Mode.TELEOP, ControlEvent.START_POLICY): Mode.AUTONOMOUS,
    (Mode.AUTONOMOUS, ControlEvent.HUMAN_GRAB): Mode.TAKEOVER,
    (Mode.TAKEOVER, ControlEvent.HUMAN_RELEASE): Mode.AUTONOMOUS,
}


def mode_transition(mode: Mode, event: ControlEvent) -> Mode:
    """Total transition function; unlisted pairs leave the mode unchanged."""
    if event is ControlEvent.STOP:
        return Mode.IDLE
    if event in DATA_UTILITY_EVENTS:
        return mode
    return _TRANSITIONS.get((mode, event), mode)


def gains_for_mode(mode: Mode, profile: GainProfile, arm: ArmModel) -> CouplingGains:
    """Mode-scheduled gains: stiff mirroring in AUTONOMOUS, soft in TELEOP/TAKEOVER."""
    if profile is None:
        raise ConfigurationError("gain profile required")
    n = arm.dof
    if mode is Mode.IDLE:
        return CouplingGains(np.zeros(n), np.zeros(n), 0.0, 0.0)
    if mode is Mode.AUTONOMOUS:
        kp = np.full(n, profile.kp_stiff)
        return CouplingGains(kp, _critical_kd(kp, arm),
                             profile.alpha_autonomous, profile.beta_d_autonomous)
    if mode in (Mode.TELEOP, Mode.TAKEOVER):
        kp = np.full(n, profile.kp_soft)
        return CouplingGains(kp, _critical_kd(kp, arm),
                             profile.alpha_teleop, profile.beta_d_teleop)
    raise ConfigurationError(f"no gain entry for mode {mode}")


def compensated_torque(raw: np.ndarray, arm: ArmModel, q: JointState) -> np.ndarray:
    """Raw torque plus active gravity compensation."""
    raw = np.asarray(raw, dtype=np.float64)
    if raw.shape[0] != arm.dof:
        raise DimensionError("torque dimension does not match arm DOF")
    return raw + gravity_torque(arm, q)


def mirror_torque(leader: JointState, follower: JointState,
                  gains: CouplingGains) -> np.ndarray:
    """Torque driving the leader toward the follower during autonomous rollout.

    The leader-follower roles are swapped: the leader becomes the tracking
    side, using the follower-side control law.
    """
    return follower_torque(follower, leader, gains)
