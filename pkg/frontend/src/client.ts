/** Socket wiring between the view model and the input tracker.
 *
 * The socket is injected behind a minimal interface so the pipeline can be
 * exercised in tests without a browser or a live server.
 */

import { FrameInput, InputTracker } from "./input.js";
import { CockpitViewModel } from "./viewmodel.js";

export interface CockpitSocket {
  send(data: string): void;
  close(): void;
}

export class CockpitClient {
  readonly vm = new CockpitViewModel();
  readonly sent: string[] = [];
  private socket: CockpitSocket | null = null;

  constructor(private tracker: InputTracker) {}

  attach(socket: CockpitSocket): void {
    this.socket = socket;
    this.vm.onOpen();
  }

  detach(): void {
    this.socket = null;
    this.vm.onClose();
  }

  onMessage(line: string, nowMs: number): void {
    this.vm.ingest(line, nowMs);
  }

  /** One animation frame: sample inputs and send whatever they produce. */
  pump(
    keys: Set<string>,
    dragPx: { dx: number; dy: number } | null,
    nowMs: number,
  ): string[] {
    const input: FrameInput = {
      keys,
      dragPx,
      lastSeenTick: this.vm.lastSeenTick(),
      connected: this.vm.canSend(nowMs),
    };
    const frames = this.tracker.sample(input);
    for (const frame of frames) {
      this.sent.push(frame);
      if (this.socket !== null) {
        this.socket.send(frame);
      }
    }
    return frames;
  }
}
