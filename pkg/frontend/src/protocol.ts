/** Wire protocol shared with the teleop server: newline-free JSON frames. */

export const PROTOCOL_VERSION = 1;

export type ClientEventType =
  | "HUMAN_GRAB"
  | "HUMAN_RELEASE"
  | "DRIVE"
  | "SAVE"
  | "RESET"
  | "DISCARD"
  | "START_POLICY"
  | "ENGAGE_TELEOP"
  | "STOP";

export interface ArmState {
  positions: number[];
  velocities: number[];
}

export interface Snapshot {
  type: "snapshot";
  tick: number;
  mode: "IDLE" | "TELEOP" | "AUTONOMOUS" | "TAKEOVER";
  arms: ArmState[];
  leader: ArmState[];
  grips: number[];
  base_x: number;
  objects: { name: string; position: number[]; held: boolean }[];
  goal: Record<string, number>;
  subtask_flags: boolean[];
  intervention: boolean;
  leader_torque: number[][];
  dropped_events: number;
  unsaved: boolean;
}

export interface HelloFrame {
  type: "hello";
  protocol_version: number;
  task_id: string;
  snapshot_every: number;
  physics_hz: number;
}

export interface BusyFrame {
  type: "busy";
}

export interface ErrorFrame {
  type: "error";
  message: string;
}

export type ServerFrame = Snapshot | HelloFrame | BusyFrame | ErrorFrame;

export class ProtocolError extends Error {}

const MODES = new Set(["IDLE", "TELEOP", "AUTONOMOUS", "TAKEOVER"]);

function isArmState(a: unknown): a is ArmState {
  const arm = a as ArmState;
  return (
    typeof a === "object" &&
    a !== null &&
    Array.isArray(arm.positions) &&
    Array.isArray(arm.velocities) &&
    arm.positions.every((x) => typeof x === "number" && isFinite(x)) &&
    arm.velocities.every((x) => typeof x === "number" && isFinite(x))
  );
}

/** Parse and validate one server frame; throws ProtocolError on junk. */
export function parseServerFrame(line: string): ServerFrame {
  let raw: unknown;
  try {
    raw = JSON.parse(line);
  } catch (e) {
    throw new ProtocolError(`invalid JSON frame: ${e}`);
  }
  if (typeof raw !== "object" || raw === null) {
    throw new ProtocolError("frame is not an object");
  }
  const frame = raw as Record<string, unknown>;
  switch (frame.type) {
    case "hello":
      if (typeof frame.protocol_version !== "number") {
        throw new ProtocolError("hello frame missing protocol_version");
      }
      return frame as unknown as HelloFrame;
    case "busy":
      return { type: "busy" };
    case "error":
      return frame as unknown as ErrorFrame;
    case "snapshot": {
      if (
        typeof frame.tick !== "number" ||
        !MODES.has(frame.mode as string) ||
        !Array.isArray(frame.arms) ||
        !Array.isArray(frame.leader) ||
        !frame.arms.every(isArmState) ||
        !frame.leader.every(isArmState) ||
        !Array.isArray(frame.subtask_flags) ||
        typeof frame.intervention !== "boolean"
      ) {
        throw new ProtocolError("snapshot frame failed schema validation");
      }
      return frame as unknown as Snapshot;
    }
    default:
      throw new ProtocolError(`unknown server frame type ${frame.type}`);
  }
}

/** Serialize one client event exactly the way the server parses it. */
export function makeEventFrame(
  type: ClientEventType,
  payload: Record<string, unknown> = {},
  lastSeenTick = -1,
): string {
  return JSON.stringify({
    type,
    payload,
    last_seen_tick: lastSeenTick,
  });
}
