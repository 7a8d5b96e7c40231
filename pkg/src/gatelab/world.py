"""World state, deterministic reset, stepping, and success evaluation.

Two stepping paths share the same grasp and subtask bookkeeping:

  * ``step``         - torque-level semi-implicit Euler dynamics, used by the
                       bilateral control stack and the teleop session loop.
  * ``apply_action`` - kinematic joint-delta action channel used by policy and
                       expert rollouts (actions are bounded joint deltas).

Both are pure value-in/value-out; the same (spec, seed, action sequence)
always yields a bit-identical trajectory.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .arm import DimensionError, JointState, forward_kinematics, integrate
from .tasks import (
    BEAM_HALF,
    LID_OPEN_DIST,
    POT_CENTER,
    TaskSpec,
)

GRIP_CLOSE_THRESHOLD = 0.5  # normalized gripper command < 0.5 means "closed"


@dataclass
class ObjectState:
    name: str
    position: np.ndarray
    held_by: int | None = None

    def copy(self) -> "ObjectState":
        return ObjectState(self.name, self.position.copy(), self.held_by)


@dataclass
class WorldState:
    arms: list[JointState]
    grips: list[float]
    base_x: float
    objects: list[ObjectState]
    goal: dict[str, float]
    subtask_index: int
    step_count: int
    dt: float

    @property
    def time(self) -> float:
        return self.step_count * self.dt

    def copy(self) -> "WorldState":
        return WorldState(
            arms=[a.copy() for a in self.arms],
            grips=list(self.grips),
            base_x=self.base_x,
            objects=[o.copy() for o in self.objects],
            goal=dict(self.goal),
            subtask_index=self.subtask_index,
            step_count=self.step_count,
            dt=self.dt,
        )

    def find_object(self, name: str) -> ObjectState:
        for o in self.objects:
            if o.name == name:
                return o
        raise KeyError(name)


def ee_positions(world: WorldState, spec: TaskSpec) -> list[np.ndarray]:
    """World-frame end-effector position of each arm."""
    mounts = spec.arm_mounts(world.base_x)
    return [m + forward_kinematics(spec.arm, q) for m, q in zip(mounts, world.arms)]


def _polar(radius: float, angle: float) -> np.ndarray:
    return np.array([radius * np.cos(angle), radius * np.sin(angle)])


def reset(spec: TaskSpec, seed: int, overrides: dict[str, float] | None = None) -> WorldState:
    """Initial world for ``seed``. Same seed gives a bit-identical state.

    ``overrides`` replaces individual randomization draws by key (used by the
    fixed evaluation grids and by intelligent resets from the cockpit).
    """
    rng = np.random.Generator(np.random.Philox(key=seed))
    draws: dict[str, float] = {}
    for key in sorted(spec.randomization):
        lo, hi = spec.randomization[key]
        draws[key] = float(rng.uniform(lo, hi))
    if overrides:
        unknown = set(overrides) - set(draws)
        if unknown:
            raise KeyError(f"unknown randomization keys: {sorted(unknown)}")
        draws.update({k: float(v) for k, v in overrides.items()})

    q0 = JointState(np.array([1.4, -0.6]), np.zeros(2))
    arms = [q0.copy() for _ in range(spec.n_arms)]
    grips = [1.0] * spec.n_arms
    objects: list[ObjectState] = []
    goal: dict[str, float] = {}

    if spec.task_id == "reach2d":
        g = _polar(draws["goal_radius"], draws["goal_angle"])
        goal = {"x": float(g[0]), "y": float(g[1])}
    elif spec.task_id == "pickplace2d":
        obj = _polar(draws["obj_radius"], draws["obj_angle"])
        g = _polar(draws["goal_radius"], draws["goal_angle"])
        objects = [ObjectState("obj", obj)]
        goal = {"x": float(g[0]), "y": float(g[1])}
    elif spec.task_id == "bitransport2d":
        beam = np.array([draws["beam_x"], draws["beam_y"]])
        objects = [ObjectState("beam", beam)]
        goal = {"x": draws["goal_x"], "y": float(beam[1])}
    elif spec.task_id == "kitchen_lite":
        pot = np.array(POT_CENTER) + np.array([draws["pot_dx"], draws["pot_dy"]])
        ball = _polar(draws["ball_radius"], draws["ball_angle"])
        objects = [
            ObjectState("lid", pot.copy()),
            ObjectState("ball", ball),
        ]
        goal = {"x": float(pot[0]), "y": float(pot[1])}
    else:
        raise ValueError(f"unknown task {spec.task_id!r}")

    return WorldState(
        arms=arms,
        grips=grips,
        base_x=0.0,
        objects=objects,
        goal=goal,
        subtask_index=0,
        step_count=0,
        dt=spec.dt,
    )


def is_done(world: WorldState, spec: TaskSpec) -> bool:
    return world.step_count >= spec.horizon


# ---------------------------------------------------------------------------
# Subtask predicates (evaluated in order; progression is monotone)
# ---------------------------------------------------------------------------

def _goal_point(world: WorldState) -> np.ndarray:
    return np.array([world.goal["x"], world.goal["y"]])


def _subtask_predicates(spec: TaskSpec):
    if spec.task_id == "reach2d":
        return [lambda w: np.linalg.norm(ee_positions(w, spec)[0] - _goal_point(w))
                <= spec.tolerance]
    if spec.task_id == "pickplace2d":
        return [lambda w: np.linalg.norm(w.find_object("obj").position - _goal_point(w))
                <= spec.tolerance]
    if spec.task_id == "bitransport2d":
        return [lambda w: np.linalg.norm(w.find_object("beam").position - _goal_point(w))
                <= spec.tolerance]
    if spec.task_id == "kitchen_lite":
        return [
            lambda w: np.linalg.norm(w.find_object("lid").position - _goal_point(w))
            >= LID_OPEN_DIST,
            lambda w: w.find_object("ball").held_by is not None,
            lambda w: np.linalg.norm(w.find_object("ball").position - _goal_point(w))
            <= spec.tolerance,
        ]
    raise ValueError(spec.task_id)


def _advance_subtasks(world: WorldState, spec: TaskSpec):
    preds = _subtask_predicates(spec)
    while world.subtask_index < len(preds) and preds[world.subtask_index](world):
        world.subtask_index += 1


def success(world: WorldState, spec: TaskSpec) -> list[bool]:
    """Per-subtask success flags with cascading failure.

    Subtask k counts only if its predicate held after all predecessors had
    already succeeded, so the output never contains True after a False.
    """
    return [k < world.subtask_index for k in range(spec.n_subtasks)]


# ---------------------------------------------------------------------------
# Grasp / release and held-object kinematics
# ---------------------------------------------------------------------------

def _update_grasps(world: WorldState, spec: TaskSpec):
    ees = ee_positions(world, spec)
    if spec.task_id == "bitransport2d":
        beam = world.find_object("beam")
        ends = [beam.position - np.array([BEAM_HALF, 0.0]),
                beam.position + np.array([BEAM_HALF, 0.0])]
        closed = [g < GRIP_CLOSE_THRESHOLD for g in world.grips]
        if beam.held_by is None:
            near = [np.linalg.norm(ees[i] - ends[i]) <= spec.grasp_radius for i in range(2)]
            if all(closed) and all(near):
                beam.held_by = 0
        elif not all(closed):
            beam.held_by = None
        if beam.held_by is not None:
            beam.position = 0.5 * (ees[0] + ees[1])
        return

    for i in range(spec.n_arms):
        closed = world.grips[i] < GRIP_CLOSE_THRESHOLD
        held = [o for o in world.objects if o.held_by == i]
        if held and not closed:
            for o in held:
                o.held_by = None
            held = []
        if closed and not held:
            free = [o for o in world.objects if o.held_by is None]
            if free:
                dists = [np.linalg.norm(o.position - ees[i]) for o in free]
                j = int(np.argmin(dists))
                if dists[j] <= spec.grasp_radius:
                    free[j].held_by = i
                    held = [free[j]]
        for o in held:
            o.position = ees[i].copy()


def _finish_step(world: WorldState, spec: TaskSpec):
    _update_grasps(world, spec)
    _advance_subtasks(world, spec)
    world.step_count += 1


# ---------------------------------------------------------------------------
# Stepping
# ---------------------------------------------------------------------------

def step(world: WorldState, spec: TaskSpec, arm_torques: list[np.ndarray],
         dt: float | None = None, grips: list[float] | None = None,
         base_delta: float = 0.0) -> WorldState:
    """Torque-level step. Returns the world unchanged once the horizon is hit."""
    if is_done(world, spec):
        return world
    if len(arm_torques) != spec.n_arms:
        raise DimensionError("one torque vector per arm required")
    dt = spec.dt if dt is None else dt
    out = world.copy()
    out.arms = [integrate(spec.arm, q, tau, dt)
                for q, tau in zip(world.arms, arm_torques)]
    if grips is not None:
        out.grips = [float(np.clip(g, 0.0, 1.0)) for g in grips]
    if spec.mobile:
        out.base_x += float(np.clip(base_delta, -spec.max_base_delta, spec.max_base_delta))
    _finish_step(out, spec)
    return out


def split_action(spec: TaskSpec, action: np.ndarray):
    """Decompose a flat action vector into (per-arm deltas, per-arm grips, base delta).

    Layout per arm: dof joint deltas, then one gripper command for tasks with
    objects; a trailing base delta for mobile tasks.
    """
    action = np.asarray(action, dtype=np.float64)
    if action.shape[0] != spec.act_dim:
        raise DimensionError(f"action has {action.shape[0]} dims, task needs {spec.act_dim}")
    dof = spec.arm.dof
    has_grip = bool(spec.task_id != "reach2d")
    per_arm = dof + (1 if has_grip else 0)
    deltas, grips = [], []
    for i in range(spec.n_arms):
        seg = action[i * per_arm:(i + 1) * per_arm]
        deltas.append(np.clip(seg[:dof], -spec.max_joint_delta, spec.max_joint_delta))
        grips.append(float(np.clip(seg[dof], 0.0, 1.0)) if has_grip else 1.0)
    base_delta = float(np.clip(action[-1], -spec.max_base_delta, spec.max_base_delta)) \
        if spec.mobile else 0.0
    return deltas, grips, base_delta


def apply_action(world: WorldState, spec: TaskSpec, action: np.ndarray) -> WorldState:
    """Kinematic joint-delta step used by policy/expert rollouts."""
    if is_done(world, spec):
        return world
    deltas, grips, base_delta = split_action(spec, action)
    out = world.copy()
    lo = np.array([lim[0] for lim in spec.arm.joint_limits])
    hi = np.array([lim[1] for lim in spec.arm.joint_limits])
    for i in range(spec.n_arms):
        new_pos = np.clip(world.arms[i].positions + deltas[i], lo, hi)
        vel = (new_pos - world.arms[i].positions) / spec.dt
        out.arms[i] = JointState(new_pos, vel)
    out.grips = grips
    out.base_x = world.base_x + base_delta
    _finish_step(out, spec)
    return out


# ---------------------------------------------------------------------------
# Observations
# ---------------------------------------------------------------------------

def observe(world: WorldState, spec: TaskSpec) -> np.ndarray:
    """Flat observation vector (task-specific layout, documented per task)."""
    g = _goal_point(world)
    if spec.task_id == "reach2d":
        q = world.arms[0].positions
        return np.concatenate([q, g])
    if spec.task_id == "pickplace2d":
        q = world.arms[0].positions
        obj = world.find_object("obj")
        return np.concatenate([
            q, obj.position,
            [1.0 if obj.held_by is not None else 0.0], g,
        ])
    if spec.task_id == "bitransport2d":
        beam = world.find_object("beam")
        return np.concatenate([
            world.arms[0].positions, world.arms[1].positions,
            [world.base_x],
            beam.position, [1.0 if beam.held_by is not None else 0.0],
            [world.goal["x"]],
        ])
    if spec.task_id == "kitchen_lite":
        q = world.arms[0].positions
        lid = world.find_object("lid")
        ball = world.find_object("ball")
        return np.concatenate([
            q,
            lid.position, [1.0 if lid.held_by is not None else 0.0],
            ball.position, [1.0 if ball.held_by is not None else 0.0],
            g,
        ])
    raise ValueError(spec.task_id)
