/** Server-authoritative cockpit state: the latest snapshot and liveness. */

import {
  HelloFrame,
  ProtocolError,
  ServerFrame,
  Snapshot,
  parseServerFrame,
} from "./protocol.js";

/** A snapshot older than this is treated as a lost connection. */
export const STALE_MS = 500;

export type ConnectionStatus = "connected" | "stale" | "disconnected";

export class CockpitViewModel {
  snapshot: Snapshot | null = null;
  hello: HelloFrame | null = null;
  errorBanner: string | null = null;
  busy = false;
  private lastSnapshotAtMs = -Infinity;
  private socketOpen = false;

  onOpen(): void {
    this.socketOpen = true;
    this.errorBanner = null;
  }

  onClose(): void {
    this.socketOpen = false;
  }

  /** Ingest one raw server frame; malformed input raises a banner only. */
  ingest(line: string, nowMs: number): ServerFrame | null {
    let frame: ServerFrame;
    try {
      frame = parseServerFrame(line);
    } catch (e) {
      if (e instanceof ProtocolError) {
        this.errorBanner = e.message;
        return null;
      }
      throw e;
    }
    switch (frame.type) {
      case "hello":
        this.hello = frame;
        break;
      case "busy":
        this.busy = true;
        break;
      case "error":
        this.errorBanner = frame.message;
        break;
      case "snapshot":
        this.snapshot = frame;
        this.lastSnapshotAtMs = nowMs;
        this.errorBanner = null;
        break;
    }
    return frame;
  }

  status(nowMs: number): ConnectionStatus {
    if (!this.socketOpen) return "disconnected";
    if (nowMs - this.lastSnapshotAtMs > STALE_MS) return "stale";
    return "connected";
  }

  /** Commands are suppressed unless we hold a live, fresh connection. */
  canSend(nowMs: number): boolean {
    return this.status(nowMs) === "connected" && !this.busy;
  }

  lastSeenTick(): number {
    return this.snapshot === null ? -1 : this.snapshot.tick;
  }

  /** Magnitude of the reflected leader torque (the haptic stand-in). */
  forceCueMagnitude(): number {
    if (this.snapshot === null) return 0;
    let worst = 0;
    for (const arm of this.snapshot.leader_torque) {
      for (const tau of arm) {
        worst = Math.max(worst, Math.abs(tau));
      }
    }
    return worst;
  }
}
