"""Teleoperation session service: live environment over a message channel.

A single physics-loop owner mutates SessionState. Client events are applied
in arrival order at tick boundaries only. In TELEOP/TAKEOVER the human drives
a virtual leader arm which couples to the follower through the bilateral
control laws; in AUTONOMOUS the policy drives the follower while the leader
mirrors it with the stiff profile, so a takeover never injects a
discontinuity. Transitions recorded in TELEOP/TAKEOVER carry source HUMAN;
AUTONOMOUS transitions carry source POLICY.

The wire protocol is line-delimited JSON frames (one WireMessage per line);
``--record`` captures the event transcript, ``run_transcript`` replays it
deterministically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .arm import JointState, integrate, inverse_kinematics
from .bilateral import (
    ControlEvent,
    GainProfile,
    Mode,
    compensated_torque,
    follower_torque,
    gains_for_mode,
    leader_torque,
    mirror_torque,
    mode_transition,
)
from .data import HUMAN, POLICY, Transition, save_dataset
from .policy import Policy, predict
from .tasks import TaskSpec
from .world import WorldState, observe, reset, step, success

PROTOCOL_VERSION = 1
PHYSICS_HZ = 100
SNAPSHOT_EVERY = 5  # physics ticks per broadcast (100 Hz -> 20 Hz)
EVENT_QUEUE_CAPACITY = 256
# Deviation-triggered takeover only arms after the leader has had time to
# converge onto the follower; explicit HUMAN_GRAB events work immediately.
DEVIATION_GRACE_TICKS = 50

CLIENT_EVENT_TYPES = frozenset({
    "HUMAN_GRAB", "HUMAN_RELEASE", "DRIVE", "SAVE", "RESET", "DISCARD",
    "START_POLICY", "ENGAGE_TELEOP", "STOP",
})
_MODE_EVENTS = {name: ControlEvent(name) for name in (
    "HUMAN_GRAB", "HUMAN_RELEASE", "SAVE", "RESET", "DISCARD",
    "START_POLICY", "ENGAGE_TELEOP", "STOP")}


class ProtocolError(ValueError):
    """Malformed client frame; the session is unaffected."""


@dataclass
class ClientEvent:
    type: str
    payload: dict = field(default_factory=dict)
    last_seen_tick: int = -1

    @classmethod
    def from_frame(cls, line: str) -> "ClientEvent":
        try:
            d = json.loads(line)
        except json.JSONDecodeError as e:
            raise ProtocolError(f"invalid JSON frame: {e}") from e
        if not isinstance(d, dict) or d.get("type") not in CLIENT_EVENT_TYPES:
            raise ProtocolError(f"unknown client event {d!r}")
        return cls(d["type"], d.get("payload", {}),
                   int(d.get("last_seen_tick", -1)))

    def to_frame(self) -> str:
        return json.dumps({"type": self.type, "payload": self.payload,
                           "last_seen_tick": self.last_seen_tick},
                          sort_keys=True)


@dataclass
class SessionState:
    spec: TaskSpec
    world: WorldState
    leader: list[JointState]
    policy: Policy | None
    gains: GainProfile
    mode: Mode = Mode.IDLE
    tick_count: int = 0
    recording: list[Transition] = field(default_factory=list)
    episode_index: int = 0
    reset_seed: int = 0
    drive_deltas: list[np.ndarray] | None = None
    drive_targets: list[np.ndarray | None] | None = None
    drive_grips: list[float] | None = None
    drive_base: float = 0.0
    autonomous_ticks: int = 0
    dropped_events: int = 0
    unsaved: bool = False
    save_dir: Path | None = None
    saved_batches: list[list[Transition]] = field(default_factory=list)


def make_session(spec: TaskSpec, policy: Policy | None = None,
                 gains: GainProfile | None = None, seed: int = 0,
                 save_dir: str | Path | None = None) -> SessionState:
    world = reset(spec, seed)
    leader = [a.copy() for a in world.arms]
    return SessionState(spec=spec, world=world, leader=leader, policy=policy,
                        gains=gains or GainProfile(), reset_seed=seed,
                        save_dir=Path(save_dir) if save_dir else None)


def _apply_event(session: SessionState, event: ClientEvent) -> bool:
    """Apply one event at a tick boundary; True if the mode changed."""
    if event.type == "DRIVE":
        payload = event.payload
        deltas = payload.get("deltas")
        if deltas is not None:
            if len(deltas) != session.spec.n_arms:
                raise ProtocolError("DRIVE needs one delta vector per arm")
            session.drive_deltas = [
                np.clip(np.asarray(d, dtype=np.float64),
                        -session.spec.max_joint_delta,
                        session.spec.max_joint_delta)
                for d in deltas]
            session.drive_targets = None
        targets = payload.get("ee_targets")
        if targets is not None:
            if len(targets) != session.spec.n_arms:
                raise ProtocolError("DRIVE needs one ee target per arm")
            session.drive_targets = [
                None if t is None else np.asarray(t, dtype=np.float64)
                for t in targets]
            session.drive_deltas = None
        if "grips" in payload:
            session.drive_grips = [float(g) for g in payload["grips"]]
        if "base_delta" in payload:
            session.drive_base = float(np.clip(
                payload["base_delta"], -session.spec.max_base_delta,
                session.spec.max_base_delta))
        return False

    control = _MODE_EVENTS[event.type]
    if control is ControlEvent.SAVE:
        _flush_recording(session)
        return False
    if control is ControlEvent.DISCARD:
        session.recording.clear()
        session.unsaved = False
        return False
    if control is ControlEvent.RESET:
        session.reset_seed += 1
        session.world = reset(session.spec, session.reset_seed)
        session.leader = [a.copy() for a in session.world.arms]
        session.episode_index += 1
        session.drive_deltas = None
        session.drive_targets = None
        session.drive_grips = None
        session.drive_base = 0.0
        return False
    new_mode = mode_transition(session.mode, control)
    changed = new_mode is not session.mode
    if changed and new_mode is Mode.AUTONOMOUS:
        session.autonomous_ticks = 0
    session.mode = new_mode
    return changed


def _flush_recording(session: SessionState) -> None:
    if not session.recording:
        return
    batch = list(session.recording)
    session.saved_batches.append(batch)
    if session.save_dir is not None:
        path = session.save_dir / f"session_{len(session.saved_batches):03d}.jsonl"
        save_dataset(path, batch, session.spec, seeds=[session.reset_seed])
    session.recording.clear()
    session.unsaved = False


def _step_teleop(session: SessionState) -> Transition:
    spec = session.spec
    world = session.world
    deltas = session.drive_deltas or [np.zeros(spec.arm.dof)
                                      for _ in range(spec.n_arms)]
    if session.drive_targets is not None:
        # Pointer control: the server runs IK for the two-link leader and
        # walks it toward the target at the per-tick joint-delta bound.
        deltas = []
        for i, target in enumerate(session.drive_targets):
            if target is None:
                deltas.append(np.zeros(spec.arm.dof))
                continue
            goal = inverse_kinematics(spec.arm, target,
                                      session.leader[i].positions)
            deltas.append(np.clip(goal - session.leader[i].positions,
                                  -spec.max_joint_delta,
                                  spec.max_joint_delta))
    grips = session.drive_grips if session.drive_grips is not None \
        else list(world.grips)
    # The human's inputs move the virtual leader; the follower tracks it
    # through the soft bilateral coupling.
    lo = np.array([lim[0] for lim in spec.arm.joint_limits])
    hi = np.array([lim[1] for lim in spec.arm.joint_limits])
    for i, d in enumerate(deltas):
        q = np.clip(session.leader[i].positions + d, lo, hi)
        v = (q - session.leader[i].positions) / spec.dt
        session.leader[i] = JointState(q, v)
    gains = gains_for_mode(session.mode, session.gains, spec.arm)
    torques = [compensated_torque(
        follower_torque(session.leader[i], world.arms[i], gains),
        spec.arm, world.arms[i]) for i in range(spec.n_arms)]
    obs = observe(world, spec)
    new_world = step(world, spec, torques, grips=grips,
                     base_delta=session.drive_base if spec.mobile else 0.0)
    action = _executed_action(spec, world, new_world, grips)
    session.world = new_world
    return Transition(session.episode_index, world.step_count, spec.task_id,
                      obs, action, HUMAN, session.mode.value)


def _executed_action(spec: TaskSpec, old: WorldState, new: WorldState,
                     grips: list[float]) -> np.ndarray:
    parts = []
    for i in range(spec.n_arms):
        parts.append(new.arms[i].positions - old.arms[i].positions)
        if spec.task_id != "reach2d":
            parts.append([grips[i]])
    if spec.mobile:
        parts.append([new.base_x - old.base_x])
    return np.concatenate(parts)


def _step_autonomous(session: SessionState) -> Transition:
    spec = session.spec
    world = session.world
    obs = observe(world, spec)
    if session.policy is not None:
        action = predict(session.policy, obs)
    else:
        action = np.zeros(spec.act_dim)
    from .world import apply_action
    session.world = apply_action(world, spec, action)
    # The leader mirrors the follower with the stiff profile so a takeover
    # starts from wherever the leader already is (no discontinuity).
    gains = gains_for_mode(Mode.AUTONOMOUS, session.gains, spec.arm)
    for i in range(spec.n_arms):
        tau = compensated_torque(
            mirror_torque(session.leader[i], session.world.arms[i], gains),
            spec.arm, session.leader[i])
        session.leader[i] = integrate(spec.arm, session.leader[i], tau, spec.dt)
    return Transition(session.episode_index, world.step_count, spec.task_id,
                      obs, action, POLICY, session.mode.value)


def _deviation_grab(session: SessionState) -> bool:
    """Leader-follower deviation beyond the grab threshold in AUTONOMOUS."""
    if session.mode is not Mode.AUTONOMOUS \
            or session.autonomous_ticks < DEVIATION_GRACE_TICKS:
        return False
    dev = max(float(np.max(np.abs(l.positions - f.positions)))
              for l, f in zip(session.leader, session.world.arms))
    return dev > session.gains.grab_threshold


def snapshot(session: SessionState) -> dict:
    spec = session.spec
    world = session.world
    gains = gains_for_mode(session.mode, session.gains, spec.arm)
    cue = [leader_torque(session.leader[i], world.arms[i], gains).tolist()
           for i in range(spec.n_arms)]
    return {
        "type": "snapshot",
        "tick": session.tick_count,
        "mode": session.mode.value,
        "arms": [{"positions": a.positions.tolist(),
                  "velocities": a.velocities.tolist()} for a in world.arms],
        "leader": [{"positions": a.positions.tolist(),
                    "velocities": a.velocities.tolist()}
                   for a in session.leader],
        "grips": list(world.grips),
        "base_x": world.base_x,
        "objects": [{"name": o.name, "position": o.position.tolist(),
                     "held": o.held_by is not None} for o in world.objects],
        "goal": dict(world.goal),
        "subtask_flags": [bool(b) for b in success(world, spec)],
        "intervention": session.mode is Mode.TAKEOVER,
        "leader_torque": cue,
        "dropped_events": session.dropped_events,
        "unsaved": session.unsaved,
    }


def tick(session: SessionState, events: list[ClientEvent]) -> dict | None:
    """One physics tick: apply queued events, step, maybe emit a snapshot.

    Returns the snapshot dict when this tick broadcasts (every
    SNAPSHOT_EVERY ticks, and immediately after any mode change).
    """
    mode_changed = False
    for event in events:
        mode_changed |= _apply_event(session, event)
    if _deviation_grab(session):
        mode_changed |= _apply_event(session, ClientEvent("HUMAN_GRAB"))

    if session.mode in (Mode.TELEOP, Mode.TAKEOVER):
        session.recording.append(_step_teleop(session))
        session.unsaved = True
    elif session.mode is Mode.AUTONOMOUS:
        session.recording.append(_step_autonomous(session))
        session.autonomous_ticks += 1
        session.unsaved = True

    session.tick_count += 1
    if mode_changed or session.tick_count % SNAPSHOT_EVERY == 0:
        return snapshot(session)
    return None


# ---------------------------------------------------------------------------
# Transcripts: record and deterministic replay
# ---------------------------------------------------------------------------

def save_transcript(path: str | Path,
                    entries: list[tuple[int, ClientEvent]]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(json.dumps({"kind": "transcript",
                            "version": PROTOCOL_VERSION}) + "\n")
        for t, event in entries:
            f.write(json.dumps({"tick": t, "frame": json.loads(event.to_frame())},
                               sort_keys=True) + "\n")


def load_transcript(path: str | Path) -> list[tuple[int, ClientEvent]]:
    entries = []
    with open(path, encoding="utf-8") as f:
        header = json.loads(f.readline())
        if header.get("kind") != "transcript":
            raise ValueError(f"{path}: not a transcript file")
        for line in f:
            if line.strip():
                d = json.loads(line)
                entries.append((int(d["tick"]),
                                ClientEvent.from_frame(json.dumps(d["frame"]))))
    return entries


def run_transcript(session: SessionState,
                   entries: list[tuple[int, ClientEvent]],
                   extra_ticks: int = 0):
    """Replay a transcript tick-exactly; returns (transitions, snapshots).

    Events recorded at tick T are applied at the boundary of tick T, in
    arrival order, exactly as the live loop does, so the transition log is
    reproduced byte-for-byte.
    """
    by_tick: dict[int, list[ClientEvent]] = {}
    for t, event in entries:
        by_tick.setdefault(t, []).append(event)
    last = max(by_tick) if by_tick else -1
    transitions: list[Transition] = []
    snapshots: list[dict] = []
    mark = len(session.recording)
    for t in range(last + 1 + extra_ticks):
        snap = tick(session, by_tick.get(t, []))
        if snap is not None:
            snapshots.append(snap)
        transitions.extend(session.recording[mark:])
        mark = len(session.recording)
    return transitions, snapshots


def transition_log_bytes(transitions: list[Transition]) -> bytes:
    return "".join(t.to_json() + "\n" for t in transitions).encode("utf-8")


# ---------------------------------------------------------------------------
# Network service (websockets); one operator per session
# ---------------------------------------------------------------------------

def serve_forever(config, host: str = "127.0.0.1", port: int = 8765,
                  policy_path: str | None = None, record: str | None = None,
                  replay: str | None = None) -> None:
    from .policy import load_policy
    spec = config.task_spec()
    policy = load_policy(policy_path) if policy_path else None
    out_dir = Path(config.output.directory)

    if replay:
        session = make_session(spec, policy, config.gains,
                               seed=config.regime.master_seed,
                               save_dir=out_dir)
        transitions, snapshots = run_transcript(session,
                                                load_transcript(replay))
        log_path = out_dir / "replay_transitions.jsonl"
        log_path.parent.mkdir(parents=True, exist_ok=True)
        log_path.write_bytes(transition_log_bytes(transitions))
        print(f"replayed {replay}: {len(transitions)} transitions, "
              f"{len(snapshots)} snapshots -> {log_path}")
        return

    import asyncio

    import websockets

    async def main() -> None:
        session = make_session(spec, policy, config.gains,
                               seed=config.regime.master_seed,
                               save_dir=out_dir)
        queue: list[ClientEvent] = []
        transcript: list[tuple[int, ClientEvent]] = []
        client_lock = {"client": None}

        async def handler(ws) -> None:
            if client_lock["client"] is not None:
                await ws.send(json.dumps({"type": "busy"}))
                await ws.close()
                return
            client_lock["client"] = ws
            await ws.send(json.dumps({
                "type": "hello", "protocol_version": PROTOCOL_VERSION,
                "task_id": spec.task_id, "snapshot_every": SNAPSHOT_EVERY,
                "physics_hz": PHYSICS_HZ}))
            try:
                async for line in ws:
                    try:
                        event = ClientEvent.from_frame(line)
                    except ProtocolError as e:
                        await ws.send(json.dumps({"type": "error",
                                                  "message": str(e)}))
                        continue
                    if len(queue) >= EVENT_QUEUE_CAPACITY:
                        queue.pop(0)
                        session.dropped_events += 1
                    queue.append(event)
                    transcript.append((session.tick_count, event))
            finally:
                client_lock["client"] = None
                # Operator gone: pause in IDLE, keep unsaved buffer flagged.
                session.mode = Mode.IDLE

        async def physics_loop() -> None:
            interval = 1.0 / PHYSICS_HZ
            while True:
                events, queue[:] = list(queue), []
                snap = tick(session, events)
                ws = client_lock["client"]
                if snap is not None and ws is not None:
                    try:
                        await ws.send(json.dumps(snap))
                    except websockets.ConnectionClosed:
                        pass
                await asyncio.sleep(interval)

        async with websockets.serve(handler, host, port):
            print(f"serving {spec.task_id} on ws://{host}:{port}")
            try:
                await physics_loop()
            finally:
                if record and transcript:
                    save_transcript(record, transcript)
                if session.unsaved:
                    _flush_recording(session)

    asyncio.run(main())
