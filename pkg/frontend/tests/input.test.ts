import { describe, expect, it } from "vitest";

import { DEFAULT_KEYMAP, InputTracker } from "../src/input.js";

function frame(
  tracker: InputTracker,
  keys: string[],
  opts: { drag?: { dx: number; dy: number }; tick?: number; connected?: boolean } = {},
): string[] {
  return tracker.sample({
    keys: new Set(keys),
    dragPx: opts.drag ?? null,
    lastSeenTick: opts.tick ?? 0,
    connected: opts.connected ?? true,
  });
}

function types(frames: string[]): string[] {
  return frames.map((f) => JSON.parse(f).type);
}

describe("edge triggering", () => {
  it("emits exactly one HUMAN_GRAB while the grab key is held", () => {
    const tracker = new InputTracker();
    const all: string[] = [];
    for (let i = 0; i < 10; i++) {
      all.push(...frame(tracker, [DEFAULT_KEYMAP.grab], { tick: i }));
    }
    expect(types(all)).toEqual(["HUMAN_GRAB"]);
  });

  it("emits one HUMAN_RELEASE on the falling edge", () => {
    const tracker = new InputTracker();
    const all: string[] = [];
    all.push(...frame(tracker, [DEFAULT_KEYMAP.grab]));
    all.push(...frame(tracker, []));
    all.push(...frame(tracker, []));
    expect(types(all)).toEqual(["HUMAN_GRAB", "HUMAN_RELEASE"]);
  });

  it("never emits a command twice without the opposite edge", () => {
    const tracker = new InputTracker();
    const all: string[] = [];
    const pattern = [true, true, false, true, true, true, false, false, true];
    for (const held of pattern) {
      all.push(...frame(tracker, held ? [DEFAULT_KEYMAP.grab] : []));
    }
    const seq = types(all);
    for (let i = 1; i < seq.length; i++) {
      expect(seq[i]).not.toEqual(seq[i - 1]);
    }
    expect(seq[0]).toEqual("HUMAN_GRAB");
  });

  it("momentary keys fire once per press", () => {
    const tracker = new InputTracker();
    const all: string[] = [];
    for (let i = 0; i < 5; i++) {
      all.push(...frame(tracker, [DEFAULT_KEYMAP.save]));
    }
    all.push(...frame(tracker, []));
    all.push(...frame(tracker, [DEFAULT_KEYMAP.save]));
    expect(types(all)).toEqual(["SAVE", "SAVE"]);
  });
});

describe("drive commands", () => {
  it("scales a 100 px drag to 0.2 rad, clamped to the per-tick bound", () => {
    const tracker = new InputTracker();
    const frames = frame(tracker, [], { drag: { dx: 100, dy: 0 }, tick: 5 });
    expect(frames).toHaveLength(1);
    const payload = JSON.parse(frames[0]).payload;
    // 100 px * 0.002 rad/px = 0.2 rad, clamped to 0.05 per tick.
    expect(payload.deltas[0][0]).toBeCloseTo(0.05, 12);
  });

  it("small drags pass through unclamped", () => {
    const tracker = new InputTracker();
    const frames = frame(tracker, [], { drag: { dx: 10, dy: -5 }, tick: 5 });
    const payload = JSON.parse(frames[0]).payload;
    expect(payload.deltas[0][0]).toBeCloseTo(0.02, 12);
    expect(payload.deltas[0][1]).toBeCloseTo(0.01, 12);
  });

  it("rate-limits DRIVE to one per observed snapshot tick", () => {
    const tracker = new InputTracker();
    const all: string[] = [];
    for (let i = 0; i < 4; i++) {
      all.push(...frame(tracker, [], { drag: { dx: 5, dy: 0 }, tick: 7 }));
    }
    all.push(...frame(tracker, [], { drag: { dx: 5, dy: 0 }, tick: 12 }));
    expect(types(all)).toEqual(["DRIVE", "DRIVE"]);
  });

  it("carries the gripper state from the last gripper key", () => {
    const tracker = new InputTracker();
    frame(tracker, [DEFAULT_KEYMAP.gripperClose], { tick: 1 });
    const frames = frame(tracker, [], { drag: { dx: 1, dy: 0 }, tick: 2 });
    expect(JSON.parse(frames[0]).payload.grips).toEqual([1]);
  });
});

describe("suppression", () => {
  it("emits nothing while disconnected", () => {
    const tracker = new InputTracker();
    const frames = frame(tracker, [DEFAULT_KEYMAP.grab], {
      drag: { dx: 50, dy: 0 },
      connected: false,
    });
    expect(frames).toEqual([]);
  });

  it("a key held across a reconnect does not fire retroactively", () => {
    const tracker = new InputTracker();
    frame(tracker, [DEFAULT_KEYMAP.grab], { connected: false });
    const frames = frame(tracker, [DEFAULT_KEYMAP.grab], { connected: true });
    expect(frames).toEqual([]);
  });

  it("events carry the last seen tick for latency accounting", () => {
    const tracker = new InputTracker();
    const frames = frame(tracker, [DEFAULT_KEYMAP.grab], { tick: 42 });
    expect(JSON.parse(frames[0]).last_seen_tick).toEqual(42);
  });
});
