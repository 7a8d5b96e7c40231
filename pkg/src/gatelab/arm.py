"""Planar n-link arm model: kinematics, gravity torque, torque-level dynamics.

Angles are absolute-relative: joint i rotates link i relative to link i-1,
link angles in the world frame are the cumulative sums of the joint angles.
Gravity acts along -y.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DimensionError(ValueError):
    """Raised when a joint-space quantity does not match the arm DOF."""


@dataclass(frozen=True)
class ArmModel:
    link_lengths: tuple[float, ...]
    link_masses: tuple[float, ...]
    com_offsets: tuple[float, ...]
    joint_limits: tuple[tuple[float, float], ...]
    gravity: float = 9.81
    # Dynamics plumbing: diagonal constant inertia and viscous damping per joint.
    inertia: tuple[float, ...] = ()
    damping: tuple[float, ...] = ()

    def __post_init__(self):
        n = len(self.link_lengths)
        if not (len(self.link_masses) == len(self.com_offsets) == len(self.joint_limits) == n):
            raise ValueError("arm parameter sequences must have equal length")
        if any(l <= 0 for l in self.link_lengths) or any(m <= 0 for m in self.link_masses):
            raise ValueError("link lengths and masses must be strictly positive")
        for lc, l in zip(self.com_offsets, self.link_lengths):
            if not (0 < lc <= l):
                raise ValueError("com offset must lie on the link")
        for lo, hi in self.joint_limits:
            if not lo < hi:
                raise ValueError("joint limit min must be < max")
        if not self.inertia:
            object.__setattr__(
                self, "inertia",
                tuple(m * l * l for m, l in zip(self.link_masses, self.link_lengths)))
        if not self.damping:
            object.__setattr__(self, "damping", tuple(0.8 for _ in self.link_lengths))

    @property
    def dof(self) -> int:
        return len(self.link_lengths)


@dataclass
class JointState:
    positions: np.ndarray
    velocities: np.ndarray

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=np.float64)
        self.velocities = np.asarray(self.velocities, dtype=np.float64)
        if self.positions.shape != self.velocities.shape:
            raise DimensionError("positions and velocities must have equal length")

    def copy(self) -> "JointState":
        return JointState(self.positions.copy(), self.velocities.copy())


def default_arm(gravity: float = 9.81) -> ArmModel:
    """Two-link desk-scale arm used by every built-in task."""
    return ArmModel(
        link_lengths=(1.0, 0.8),
        link_masses=(1.0, 0.8),
        com_offsets=(0.5, 0.4),
        joint_limits=((-3.1, 3.1), (-3.1, 3.1)),
        gravity=gravity,
    )


def _check_dim(arm: ArmModel, q: JointState):
    if q.positions.shape[0] != arm.dof:
        raise DimensionError(
            f"joint state has {q.positions.shape[0]} joints, arm has {arm.dof}")


def forward_kinematics(arm: ArmModel, q: JointState) -> np.ndarray:
    """End-effector position (x, y) in the arm base frame."""
    _check_dim(arm, q)
    ang = np.cumsum(q.positions)
    lengths = np.asarray(arm.link_lengths)
    return np.array([np.dot(lengths, np.cos(ang)), np.dot(lengths, np.sin(ang))])


def inverse_kinematics(arm: ArmModel, target: np.ndarray,
                       reference: np.ndarray) -> np.ndarray:
    """Joint angles placing a two-link end effector at ``target``.

    Unreachable targets are projected onto the reach annulus. Of the two
    elbow branches the one closer to ``reference`` wins; the result is
    clamped to the joint limits.
    """
    if arm.dof != 2:
        raise DimensionError("analytic IK is defined for two-link arms only")
    l1, l2 = arm.link_lengths
    target = np.asarray(target, dtype=np.float64)
    r = float(np.hypot(target[0], target[1]))
    r = np.clip(r, abs(l1 - l2) + 1e-9, l1 + l2 - 1e-9)
    phi = np.arctan2(target[1], target[0])
    cos_elbow = (r ** 2 - l1 ** 2 - l2 ** 2) / (2 * l1 * l2)
    elbow = np.arccos(np.clip(cos_elbow, -1.0, 1.0))
    best = None
    for q2 in (elbow, -elbow):
        q1 = phi - np.arctan2(l2 * np.sin(q2), l1 + l2 * np.cos(q2))
        q = np.array([q1, q2])
        if best is None or np.sum((q - reference) ** 2) \
                < np.sum((best - reference) ** 2):
            best = q
    lo = np.array([lim[0] for lim in arm.joint_limits])
    hi = np.array([lim[1] for lim in arm.joint_limits])
    return np.clip(best, lo, hi)


def jacobian(arm: ArmModel, q: JointState) -> np.ndarray:
    """2 x dof end-effector Jacobian d(ee)/d(theta)."""
    _check_dim(arm, q)
    ang = np.cumsum(q.positions)
    lengths = np.asarray(arm.link_lengths)
    n = arm.dof
    jac = np.zeros((2, n))
    for k in range(n):
        jac[0, k] = -np.dot(lengths[k:], np.sin(ang[k:]))
        jac[1, k] = np.dot(lengths[k:], np.cos(ang[k:]))
    return jac


def _gravity_coeffs(arm: ArmModel) -> np.ndarray:
    # Coefficient of cos(cumulative angle i) in the gravity torque: the link's
    # own CoM term plus every distal mass hanging off link i.
    m = np.asarray(arm.link_masses)
    l = np.asarray(arm.link_lengths)
    lc = np.asarray(arm.com_offsets)
    distal = np.concatenate([np.cumsum(m[::-1])[::-1][1:], [0.0]])
    return m * lc + distal * l


def gravity_torque(arm: ArmModel, q: JointState) -> np.ndarray:
    """Torque that exactly holds the arm against gravity (the g(theta) term)."""
    _check_dim(arm, q)
    ang = np.cumsum(q.positions)
    a = _gravity_coeffs(arm)
    terms = arm.gravity * a * np.cos(ang)
    # tau_k = sum over links at or distal to joint k
    return np.cumsum(terms[::-1])[::-1]


def gravity_torque_jacobian(arm: ArmModel, q: JointState) -> np.ndarray:
    """Analytic d(gravity_torque)/d(theta), dof x dof."""
    _check_dim(arm, q)
    ang = np.cumsum(q.positions)
    a = _gravity_coeffs(arm)
    n = arm.dof
    jac = np.zeros((n, n))
    for k in range(n):
        for m_ in range(n):
            i0 = max(k, m_)
            jac[k, m_] = -arm.gravity * np.dot(a[i0:], np.sin(ang[i0:]))
    return jac


def potential_energy(arm: ArmModel, q: JointState) -> float:
    ang = np.cumsum(q.positions)
    a = _gravity_coeffs(arm)
    return float(arm.gravity * np.dot(a, np.sin(ang)))


def kinetic_energy(arm: ArmModel, q: JointState) -> float:
    inertia = np.asarray(arm.inertia)
    return float(0.5 * np.dot(inertia, q.velocities ** 2))


def integrate(arm: ArmModel, q: JointState, torque: np.ndarray, dt: float) -> JointState:
    """One semi-implicit Euler step of I*qdd = tau - g(q) - D*qd.

    Joint limits are enforced by clamping the position and zeroing the
    offending velocity component.
    """
    _check_dim(arm, q)
    torque = np.asarray(torque, dtype=np.float64)
    if torque.shape[0] != arm.dof:
        raise DimensionError("torque dimension does not match arm DOF")
    inertia = np.asarray(arm.inertia)
    damping = np.asarray(arm.damping)
    acc = (torque - gravity_torque(arm, q) - damping * q.velocities) / inertia
    vel = q.velocities + dt * acc
    pos = q.positions + dt * vel
    lo = np.array([lim[0] for lim in arm.joint_limits])
    hi = np.array([lim[1] for lim in arm.joint_limits])
    clamped = np.clip(pos, lo, hi)
    vel = np.where(clamped != pos, 0.0, vel)
    return JointState(clamped, vel)
