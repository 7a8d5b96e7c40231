/** Canvas rendering: a pure consumer of the view model.
 *
 * Rendering never touches the socket or the input tracker, so disabling it
 * cannot change a single byte sent to the server.
 */

import { DEFAULT_LINK_LENGTHS, linkPoints } from "./kinematics.js";
import { CockpitViewModel } from "./viewmodel.js";
import { ViewTransform, worldToPixel } from "./view.js";

/** The subset of CanvasRenderingContext2D the cockpit draws with. */
export interface DrawContext {
  canvas: { width: number; height: number };
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  fillText(text: string, x: number, y: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  stroke(): void;
  fill(): void;
}

const MODE_COLORS: Record<string, string> = {
  IDLE: "#888888",
  TELEOP: "#2e7dd1",
  AUTONOMOUS: "#3aa655",
  TAKEOVER: "#d14b2e",
};

/** Saturation point of the force cue arc, in N*m. */
export const FORCE_CUE_FULL_SCALE = 5.0;

function drawArm(
  ctx: DrawContext,
  view: ViewTransform,
  positions: number[],
  baseX: number,
  color: string,
  width: number,
): void {
  const points = linkPoints(DEFAULT_LINK_LENGTHS, positions);
  ctx.strokeStyle = color;
  ctx.lineWidth = width;
  ctx.beginPath();
  const [x0, y0] = worldToPixel(view, baseX, 0);
  ctx.moveTo(x0, y0);
  for (let i = 1; i < points.length; i++) {
    const [px, py] = worldToPixel(view, points[i][0] + baseX, points[i][1]);
    ctx.lineTo(px, py);
  }
  ctx.stroke();
}

export function render(
  ctx: DrawContext,
  vm: CockpitViewModel,
  view: ViewTransform,
  nowMs: number,
): void {
  const w = ctx.canvas.width;
  const h = ctx.canvas.height;
  ctx.clearRect(0, 0, w, h);
  ctx.font = "14px monospace";

  if (vm.busy) {
    ctx.fillStyle = "#d14b2e";
    ctx.fillText("session busy: another operator is connected", 10, 20);
    return;
  }
  if (vm.errorBanner !== null) {
    ctx.fillStyle = "#d14b2e";
    ctx.fillText(`protocol error: ${vm.errorBanner}`, 10, 20);
    return;
  }
  if (vm.status(nowMs) !== "connected") {
    ctx.fillStyle = "#d14b2e";
    ctx.fillRect(0, 0, w, 28);
    ctx.fillStyle = "#ffffff";
    ctx.fillText("DISCONNECTED - commands suppressed", 10, 19);
  }
  const snap = vm.snapshot;
  if (snap === null) {
    ctx.fillStyle = "#888888";
    ctx.fillText("waiting for first snapshot...", 10, 48);
    return;
  }

  // Scene: goal, objects, follower arms, ghosted leader.
  ctx.fillStyle = "#caa53d";
  for (const key of ["goal_x", "x"]) {
    if (key in snap.goal) {
      const [gx, gy] = worldToPixel(
        view,
        snap.goal[key],
        snap.goal[key === "goal_x" ? "goal_y" : "y"] ?? 0,
      );
      ctx.beginPath();
      ctx.arc(gx, gy, 6, 0, 2 * Math.PI);
      ctx.fill();
      break;
    }
  }
  ctx.fillStyle = "#7a5cc4";
  for (const obj of snap.objects) {
    const [ox, oy] = worldToPixel(view, obj.position[0], obj.position[1]);
    ctx.beginPath();
    ctx.arc(ox, oy, obj.held ? 4 : 6, 0, 2 * Math.PI);
    ctx.fill();
  }
  for (let i = 0; i < snap.arms.length; i++) {
    const baseX = i === 0 ? snap.base_x : snap.base_x + 0.8;
    drawArm(ctx, view, snap.leader[i].positions, baseX, "#bbbbbb", 2);
    drawArm(
      ctx,
      view,
      snap.arms[i].positions,
      baseX,
      MODE_COLORS[snap.mode],
      4,
    );
  }

  // HUD: mode badge, intervention flag, force cue arc, counters.
  ctx.fillStyle = MODE_COLORS[snap.mode];
  ctx.fillRect(10, h - 34, 110, 24);
  ctx.fillStyle = "#ffffff";
  ctx.fillText(snap.mode, 16, h - 17);
  if (snap.intervention) {
    ctx.fillStyle = "#d14b2e";
    ctx.fillText("INTERVENTION", 130, h - 17);
  }
  const cue = Math.min(1, vm.forceCueMagnitude() / FORCE_CUE_FULL_SCALE);
  ctx.strokeStyle = "#d14b2e";
  ctx.lineWidth = 5;
  ctx.beginPath();
  ctx.arc(w - 40, h - 40, 18, -Math.PI / 2, -Math.PI / 2 + cue * 2 * Math.PI);
  ctx.stroke();
  ctx.fillStyle = "#555555";
  ctx.fillText(
    `tick ${snap.tick}  dropped ${snap.dropped_events}` +
      (snap.unsaved ? "  UNSAVED" : ""),
    10,
    h - 44,
  );
}
