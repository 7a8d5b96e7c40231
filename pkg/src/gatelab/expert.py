"""Scripted waypoint expert used as the stand-in demonstrator.

The expert tracks an ordered waypoint plan with damped-least-squares
end-effector control. Waypoint selection is re-derived from the world every
step, so the controller is a pure function of the world state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .tasks import BEAM_HALF, LID_OPEN_DIST, LID_PARK, TaskSpec
from .world import WorldState, ee_positions


@dataclass(frozen=True)
class Waypoint:
    name: str
    subtask: int
    # (world, spec) -> (per-arm ee targets, per-arm grips, base target or None)
    command: Callable
    done: Callable  # (world, spec) -> bool


@dataclass(frozen=True)
class ScriptedExpert:
    task_id: str
    waypoints: tuple[Waypoint, ...]
    ik_damping: float = 0.05
    # Close the gripper through the whole final approach (a multiple of the
    # attach radius) so closing is a learnable function of proximity, not a
    # single-step event.
    close_fraction: float = 3.0


def _goal(world: WorldState) -> np.ndarray:
    return np.array([world.goal["x"], world.goal["y"]])


def _near(a: np.ndarray, b: np.ndarray, r: float) -> bool:
    return bool(np.linalg.norm(a - b) <= r)


def _grab_command(obj_name: str):
    def command(world, spec, expert):
        ee = ee_positions(world, spec)[0]
        obj = world.find_object(obj_name).position
        close = _near(ee, obj, expert.close_fraction * spec.grasp_radius)
        return [obj], [0.0 if close else 1.0], None
    return command


def make_expert(spec: TaskSpec) -> ScriptedExpert:
    task = spec.task_id
    if task == "reach2d":
        wps = (
            Waypoint(
                "reach", 0,
                lambda w, s, e: ([_goal(w)], [1.0], None),
                lambda w, s: _near(ee_positions(w, s)[0], _goal(w), 0.8 * s.tolerance)),
        )
    elif task == "pickplace2d":
        wps = (
            Waypoint("grab-obj", 0, _grab_command("obj"),
                     lambda w, s: w.find_object("obj").held_by is not None),
            Waypoint(
                "carry-to-goal", 0,
                lambda w, s, e: ([_goal(w)], [0.0], None),
                lambda w, s: _near(w.find_object("obj").position, _goal(w),
                                   0.7 * s.tolerance)),
        )
    elif task == "kitchen_lite":
        def lid_open(w, s):
            lid = w.find_object("lid")
            return lid.held_by is None and not _near(lid.position, _goal(w),
                                                     LID_OPEN_DIST)

        def park_command(w, s, e):
            lid = w.find_object("lid")
            release = _near(lid.position, np.array(LID_PARK), 0.05)
            return [np.array(LID_PARK)], [1.0 if release else 0.0], None

        wps = (
            Waypoint("grab-lid", 0, _grab_command("lid"),
                     lambda w, s: w.find_object("lid").held_by is not None
                     or lid_open(w, s)),
            Waypoint("park-lid", 0, park_command, lid_open),
            Waypoint("grab-ball", 1, _grab_command("ball"),
                     lambda w, s: w.find_object("ball").held_by is not None),
            Waypoint(
                "to-pot", 2,
                lambda w, s, e: ([_goal(w)], [0.0], None),
                lambda w, s: _near(w.find_object("ball").position, _goal(w),
                                   0.7 * s.tolerance)),
        )
    elif task == "bitransport2d":
        def beam_ends(w):
            c = w.find_object("beam").position
            off = np.array([BEAM_HALF, 0.0])
            return [c - off, c + off]

        def grasp_command(w, s, e):
            ends = beam_ends(w)
            ees = ee_positions(w, s)
            near = max(np.linalg.norm(ees[i] - ends[i]) for i in range(2))
            close = near <= e.close_fraction * s.grasp_radius
            g = 0.0 if close else 1.0
            return ends, [g, g], w.find_object("beam").position[0]

        wps = (
            Waypoint("grasp-beam", 0, grasp_command,
                     lambda w, s: w.find_object("beam").held_by is not None),
            Waypoint(
                "carry-to-goal", 0,
                lambda w, s, e: (None, [0.0, 0.0], w.goal["x"]
                                 + (w.base_x - w.find_object("beam").position[0])),
                lambda w, s: _near(w.find_object("beam").position, _goal(w),
                                   0.7 * s.tolerance)),
        )
    else:
        raise ValueError(f"no expert for task {task!r}")
    return ScriptedExpert(task_id=task, waypoints=wps)


def ik_two_link(spec: TaskSpec, target: np.ndarray,
                current: np.ndarray) -> np.ndarray:
    """Analytic 2-link IK; picks the in-limit elbow branch nearest ``current``.

    Out-of-reach targets are clamped to the reachable annulus.
    """
    l1, l2 = spec.arm.link_lengths
    r = float(np.linalg.norm(target))
    r = float(np.clip(r, abs(l1 - l2) + 1e-9, l1 + l2 - 1e-9))
    phi = float(np.arctan2(target[1], target[0]))
    c2 = (r * r - l1 * l1 - l2 * l2) / (2 * l1 * l2)
    q2 = float(np.arccos(np.clip(c2, -1.0, 1.0)))
    solutions = []
    for elbow in (q2, -q2):
        q1 = phi - float(np.arctan2(l2 * np.sin(elbow), l1 + l2 * np.cos(elbow)))
        # wrap q1 into (-pi, pi] so limit checks are meaningful
        q1 = float(np.arctan2(np.sin(q1), np.cos(q1)))
        solutions.append(np.array([q1, elbow]))
    lo = np.array([lim[0] for lim in spec.arm.joint_limits])
    hi = np.array([lim[1] for lim in spec.arm.joint_limits])
    valid = [s for s in solutions if np.all(s >= lo) & np.all(s <= hi)]
    pool = valid if valid else [np.clip(s, lo, hi) for s in solutions]
    dists = [np.linalg.norm(s - current) for s in pool]
    return pool[int(np.argmin(dists))]


def _track(spec: TaskSpec, world: WorldState, arm_idx: int,
           target: np.ndarray, damping: float) -> np.ndarray:
    """Proportional joint-space step moving arm ``arm_idx`` toward ``target``."""
    q = world.arms[arm_idx].positions
    mount = spec.arm_mounts(world.base_x)[arm_idx]
    q_target = ik_two_link(spec, target - mount, q)
    return np.clip(q_target - q, -spec.max_joint_delta, spec.max_joint_delta)


def expert_action(expert: ScriptedExpert, world: WorldState,
                  spec: TaskSpec) -> np.ndarray:
    """Deterministic action toward the first unfinished waypoint.

    Returns the zero action once every waypoint is done (grippers keep their
    last meaningful command so held objects stay held).
    """
    if expert.task_id != spec.task_id:
        raise ValueError("expert/task mismatch")
    current = None
    for wp in expert.waypoints:
        if not wp.done(world, spec):
            current = wp
            break

    dof = spec.arm.dof
    has_grip = spec.task_id != "reach2d"
    if current is None:
        # Hold position; keep grippers as commanded last step.
        parts = []
        for i in range(spec.n_arms):
            parts.append(np.zeros(dof))
            if has_grip:
                parts.append([world.grips[i]])
        if spec.mobile:
            parts.append([0.0])
        return np.concatenate(parts)

    targets, grips, base_target = current.command(world, spec, expert)
    parts = []
    for i in range(spec.n_arms):
        if targets is None:
            parts.append(np.zeros(dof))
        else:
            parts.append(_track(spec, world, i, targets[i], expert.ik_damping))
        if has_grip:
            parts.append([grips[i]])
    if spec.mobile:
        bd = 0.0 if base_target is None else float(
            np.clip(base_target - world.base_x, -spec.max_base_delta,
                    spec.max_base_delta))
        parts.append([bd])
    return np.concatenate(parts)
