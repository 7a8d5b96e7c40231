/** Keyboard/pointer sampling with strict edge triggering.
 *
 * The tracker is sampled once per animation frame with the currently held
 * keys and any pointer drag since the last frame, and returns the wire
 * frames to send. Momentary commands fire exactly once per key press:
 * a held key never repeats, and HUMAN_RELEASE requires the opposite edge.
 */

import { makeEventFrame } from "./protocol.js";
import { dragToDelta } from "./view.js";

export interface KeyMap {
  grab: string;
  gripperOpen: string;
  gripperClose: string;
  save: string;
  reset: string;
  discard: string;
  startPolicy: string;
  engageTeleop: string;
}

export const DEFAULT_KEYMAP: KeyMap = {
  grab: " ",
  gripperOpen: "q",
  gripperClose: "e",
  save: "s",
  reset: "r",
  discard: "x",
  startPolicy: "p",
  engageTeleop: "t",
};

export interface FrameInput {
  /** Keys currently held down. */
  keys: Set<string>;
  /** Pointer drag since the previous frame, in pixels, or null. */
  dragPx: { dx: number; dy: number } | null;
  /** Tick of the latest snapshot, for latency accounting. */
  lastSeenTick: number;
  /** False while disconnected or stale; suppresses all output. */
  connected: boolean;
}

const MOMENTARY: [keyof KeyMap, string][] = [
  ["save", "SAVE"],
  ["reset", "RESET"],
  ["discard", "DISCARD"],
  ["startPolicy", "START_POLICY"],
  ["engageTeleop", "ENGAGE_TELEOP"],
];

export class InputTracker {
  private prevKeys = new Set<string>();
  private lastDriveTick = -1;
  private grip = 0;

  constructor(
    private keymap: KeyMap = DEFAULT_KEYMAP,
    private armCount = 1,
  ) {}

  /** Sample one frame; returns the wire frames to send, in order. */
  sample(input: FrameInput): string[] {
    const frames: string[] = [];
    const rising = (key: string) =>
      input.keys.has(key) && !this.prevKeys.has(key);
    const falling = (key: string) =>
      !input.keys.has(key) && this.prevKeys.has(key);

    if (input.connected) {
      if (rising(this.keymap.grab)) {
        frames.push(makeEventFrame("HUMAN_GRAB", {}, input.lastSeenTick));
      }
      if (falling(this.keymap.grab)) {
        frames.push(makeEventFrame("HUMAN_RELEASE", {}, input.lastSeenTick));
      }
      for (const [action, type] of MOMENTARY) {
        if (rising(this.keymap[action])) {
          frames.push(
            makeEventFrame(type as never, {}, input.lastSeenTick),
          );
        }
      }

      if (input.keys.has(this.keymap.gripperClose)) this.grip = 1;
      if (input.keys.has(this.keymap.gripperOpen)) this.grip = 0;

      // Drive commands are rate-limited to the snapshot rate: at most one
      // per server tick we have actually seen.
      if (input.dragPx !== null && input.lastSeenTick > this.lastDriveTick) {
        const deltas: number[][] = [];
        for (let i = 0; i < this.armCount; i++) {
          deltas.push(
            i === 0
              ? [dragToDelta(input.dragPx.dx), dragToDelta(-input.dragPx.dy)]
              : [0, 0],
          );
        }
        const grips = new Array(this.armCount).fill(this.grip);
        frames.push(
          makeEventFrame("DRIVE", { deltas, grips }, input.lastSeenTick),
        );
        this.lastDriveTick = input.lastSeenTick;
      }
    }

    // Edge state advances even while suppressed so a key held across a
    // reconnect does not retroactively fire.
    this.prevKeys = new Set(input.keys);
    return frames;
  }
}
