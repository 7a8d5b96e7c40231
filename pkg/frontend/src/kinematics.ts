/** Display-only forward kinematics, duplicated from the simulator.
 *
 * The cockpit never runs physics; this exists purely to turn the joint
 * angles in a snapshot into line segments on the canvas.
 */

/** Link lengths of the default two-link arm (meters). */
export const DEFAULT_LINK_LENGTHS = [1.0, 0.8];

/** Joint positions of each link endpoint, base first, in the arm frame. */
export function linkPoints(
  lengths: number[],
  positions: number[],
): [number, number][] {
  const points: [number, number][] = [[0, 0]];
  let angle = 0;
  let x = 0;
  let y = 0;
  for (let i = 0; i < lengths.length; i++) {
    angle += positions[i];
    x += lengths[i] * Math.cos(angle);
    y += lengths[i] * Math.sin(angle);
    points.push([x, y]);
  }
  return points;
}

/** End-effector position (x, y) in the arm frame. */
export function forwardKinematics(
  lengths: number[],
  positions: number[],
): [number, number] {
  const points = linkPoints(lengths, positions);
  return points[points.length - 1];
}
