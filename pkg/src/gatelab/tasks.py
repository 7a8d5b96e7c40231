"""Task catalogue: 2D manipulation tasks with subtask predicates and layouts.

Four tasks share one two-link arm model:
  reach2d       - drive the end-effector to a random goal point
  pickplace2d   - grasp a random object and carry it to a random goal
  bitransport2d - two arms on a translating base carry a beam to a far goal
  kitchen_lite  - three chained subtasks: open-lid, pick-ball, place-in-pot
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .arm import ArmModel, default_arm

TASK_IDS = ("reach2d", "pickplace2d", "bitransport2d", "kitchen_lite")

# Fixed scene anchors for kitchen_lite (the pot position is randomized a little
# around POT_CENTER; the lid park spot is where the expert drops the lid).
POT_CENTER = (-0.9, 0.6)
LID_PARK = (1.3, 0.2)
LID_OPEN_DIST = 0.25
BEAM_HALF = 0.3
ARM_MOUNT_SEP = 0.8


@dataclass(frozen=True)
class TaskSpec:
    task_id: str
    subtask_names: tuple[str, ...]
    horizon: int
    dt: float
    randomization: dict[str, tuple[float, float]]
    tolerance: float
    arm: ArmModel = field(default_factory=default_arm)
    n_arms: int = 1
    mobile: bool = False
    # One max action step moves the end-effector ~0.09 m at full extension;
    # the attach radius must not be sub-action-resolution.
    grasp_radius: float = 0.06
    max_joint_delta: float = 0.05
    max_base_delta: float = 0.02
    obs_dim: int = 0
    act_dim: int = 0

    def __post_init__(self):
        if self.horizon <= 0 or self.dt <= 0:
            raise ValueError("horizon and dt must be positive")
        if self.task_id == "kitchen_lite" and len(self.subtask_names) < 3:
            raise ValueError("kitchen_lite needs at least 3 subtasks")

    @property
    def n_subtasks(self) -> int:
        return len(self.subtask_names)

    def arm_mounts(self, base_x: float) -> list[np.ndarray]:
        """World-frame (x, y) of each arm base."""
        if self.n_arms == 1:
            return [np.array([base_x, 0.0])]
        half = ARM_MOUNT_SEP / 2
        return [np.array([base_x - half, 0.0]), np.array([base_x + half, 0.0])]


def make_task_spec(task_id: str, dt: float = 0.01) -> TaskSpec:
    if task_id == "reach2d":
        return TaskSpec(
            task_id=task_id,
            subtask_names=("reach",),
            horizon=150,
            dt=dt,
            randomization={
                "goal_radius": (0.5, 1.7),
                "goal_angle": (0.1, 3.04),
            },
            tolerance=0.05,
            obs_dim=4,
            act_dim=2,
        )
    if task_id == "pickplace2d":
        return TaskSpec(
            task_id=task_id,
            subtask_names=("place",),
            horizon=250,
            dt=dt,
            randomization={
                "obj_radius": (0.8, 1.5),
                "obj_angle": (0.45, 1.35),
                "goal_radius": (0.8, 1.5),
                "goal_angle": (1.8, 2.7),
            },
            tolerance=0.06,
            obs_dim=7,
            act_dim=3,
        )
    if task_id == "bitransport2d":
        return TaskSpec(
            task_id=task_id,
            subtask_names=("transport",),
            horizon=350,
            dt=dt,
            randomization={
                "beam_x": (0.2, 0.8),
                "beam_y": (0.5, 0.9),
                "goal_x": (3.0, 3.6),
            },
            tolerance=0.15,
            n_arms=2,
            mobile=True,
            grasp_radius=0.08,
            obs_dim=9,
            act_dim=7,
        )
    if task_id == "kitchen_lite":
        return TaskSpec(
            task_id=task_id,
            subtask_names=("open-lid", "pick-ball", "place-in-pot"),
            horizon=400,
            dt=dt,
            randomization={
                "ball_radius": (0.9, 1.4),
                "ball_angle": (0.35, 1.2),
                "pot_dx": (-0.08, 0.08),
                "pot_dy": (-0.05, 0.05),
            },
            tolerance=0.06,
            obs_dim=10,
            act_dim=3,
        )
    raise ValueError(f"unknown task_id {task_id!r}, expected one of {TASK_IDS}")
