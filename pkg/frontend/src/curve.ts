/** Model for editing a distance->color curve as draggable control points.
 *
 * Stops are [t, [r, g, b]] with t strictly increasing from 0 to 1 and the
 * final stop fixed at black; edits are clamped so the result always
 * satisfies those constraints.
 */

import type { CurveBody, CurveStop } from "./types.js";

const MIN_GAP = 1e-3;

export function curveIntensity(stop: CurveStop): number {
  const [, [r, g, b]] = stop;
  return (r + g + b) / 3;
}

/** Clamp a dragged (t, intensity) for stop `index` into the legal region. */
export function clampDrag(
  curve: CurveBody,
  index: number,
  t: number,
  intensity: number,
): { t: number; intensity: number } {
  const stops = curve.control_points;
  const last = stops.length - 1;
  if (index < 0 || index > last) throw new Error("stop index out of range");
  let lo = 0;
  let hi = 1;
  if (index === 0) hi = 0; // first stop pinned at t=0
  else if (index === last) lo = 1; // last stop pinned at t=1
  else {
    lo = stops[index - 1]![0] + MIN_GAP;
    hi = stops[index + 1]![0] - MIN_GAP;
  }
  const clampedT = Math.min(hi, Math.max(lo, t));
  let clamped = Math.min(1, Math.max(0, intensity));
  if (index === last) clamped = 0; // curve must fade to zero
  return { t: clampedT, intensity: clamped };
}

/** Apply a drag, scaling the stop's color to the target mean intensity. */
export function moveStop(
  curve: CurveBody,
  index: number,
  t: number,
  intensity: number,
): CurveBody {
  const { t: ct, intensity: ci } = clampDrag(curve, index, t, intensity);
  const stops = curve.control_points.map(
    (s) => [s[0], [...s[1]]] as CurveStop,
  );
  const stop = stops[index]!;
  const current = curveIntensity(stop);
  const rgb = stop[1];
  if (current <= 0) {
    stop[1] = [ci, ci, ci];
  } else {
    const k = ci / current;
    stop[1] = [rgb[0] * k, rgb[1] * k, rgb[2] * k].map((v) =>
      Math.min(1, Math.max(0, v)),
    ) as [number, number, number];
  }
  stop[0] = ct;
  return { control_points: stops };
}

/** Insert a new stop at t, interpolating the color of its neighbors. */
export function insertStop(curve: CurveBody, t: number): CurveBody {
  const stops = curve.control_points;
  if (t <= MIN_GAP || t >= 1 - MIN_GAP) throw new Error("t must be interior");
  const after = stops.findIndex((s) => s[0] >= t);
  if (after <= 0) throw new Error("curve must span [0, 1]");
  const [t0, c0] = stops[after - 1]!;
  const [t1, c1] = stops[after]!;
  if (t - t0 < MIN_GAP || t1 - t < MIN_GAP) {
    throw new Error("too close to an existing stop");
  }
  const f = (t - t0) / (t1 - t0);
  const color = c0.map((v, i) => v + f * (c1[i]! - v)) as [
    number,
    number,
    number,
  ];
  const next = stops.map((s) => [s[0], [...s[1]]] as CurveStop);
  next.splice(after, 0, [t, color]);
  return { control_points: next };
}

export function removeStop(curve: CurveBody, index: number): CurveBody {
  const stops = curve.control_points;
  if (index === 0 || index === stops.length - 1) {
    throw new Error("endpoint stops cannot be removed");
  }
  const next = stops
    .filter((_, i) => i !== index)
    .map((s) => [s[0], [...s[1]]] as CurveStop);
  return { control_points: next };
}

/** True when the stops satisfy every curve constraint. */
export function isValidCurve(curve: CurveBody): boolean {
  const stops = curve.control_points;
  if (stops.length < 2) return false;
  if (stops[0]![0] !== 0 || stops[stops.length - 1]![0] !== 1) return false;
  for (let i = 1; i < stops.length; i++) {
    if (stops[i]![0] <= stops[i - 1]![0]) return false;
  }
  if (curveIntensity(stops[stops.length - 1]!) !== 0) return false;
  return stops.every((s) => s[1].every((v) => v >= 0 && v <= 1));
}
