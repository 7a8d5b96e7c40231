/** The documented view transform and input scaling constants. */

/** Pointer drag to leader joint delta: 0.002 rad per pixel. */
export const DRAG_SCALE_RAD_PER_PX = 0.002;

/** The server clamps joint deltas to this per tick; mirror it client-side. */
export const MAX_JOINT_DELTA_RAD = 0.05;

export interface ViewTransform {
  /** Pixels per meter. */
  scale: number;
  /** Pixel coordinates of the world origin. */
  originX: number;
  originY: number;
}

export function defaultView(width: number, height: number): ViewTransform {
  // Fit a 4 m wide workspace with the arm base slightly below center.
  return { scale: width / 4, originX: width / 2, originY: height * 0.7 };
}

/** World meters to canvas pixels (y flips: canvas y grows downward). */
export function worldToPixel(
  view: ViewTransform,
  x: number,
  y: number,
): [number, number] {
  return [view.originX + x * view.scale, view.originY - y * view.scale];
}

/** Canvas pixels back to world meters; inverse of worldToPixel. */
export function pixelToWorld(
  view: ViewTransform,
  px: number,
  py: number,
): [number, number] {
  return [(px - view.originX) / view.scale, (view.originY - py) / view.scale];
}

/** One pointer-drag axis to a clamped per-tick joint delta. */
export function dragToDelta(dragPx: number): number {
  const raw = dragPx * DRAG_SCALE_RAD_PER_PX;
  return Math.max(-MAX_JOINT_DELTA_RAD, Math.min(MAX_JOINT_DELTA_RAD, raw));
}
