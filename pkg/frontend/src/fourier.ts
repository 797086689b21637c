import type { MotionComponent } from "./types";

export interface CurvePoint {
  f: number;
  fp: number;
}

// Coefficient lists may have unequal lengths; missing harmonics are zero.
export function evaluateComponent(
  c: MotionComponent,
  period: number,
  phi: number,
): CurvePoint {
  const w = (2 * Math.PI) / period;
  const harmonics = Math.max(c.cos.length, c.sin.length);
  let f = c.dc;
  let fp = 0;
  for (let k = 1; k <= harmonics; k++) {
    const a = c.cos[k - 1] ?? 0;
    const b = c.sin[k - 1] ?? 0;
    const kw = k * w;
    const cos = Math.cos(kw * phi);
    const sin = Math.sin(kw * phi);
    f += a * cos + b * sin;
    fp += kw * (b * cos - a * sin);
  }
  return { f, fp };
}

// One closed loop: m intervals, m+1 points, last point wraps back to the first.
export function sampleCurve(
  c: MotionComponent,
  period: number,
  m: number,
): { f: Float64Array; fp: Float64Array } {
  const f = new Float64Array(m + 1);
  const fp = new Float64Array(m + 1);
  for (let i = 0; i < m; i++) {
    const p = evaluateComponent(c, period, (i * period) / m);
    f[i] = p.f;
    fp[i] = p.fp;
  }
  f[m] = f[0];
  fp[m] = fp[0];
  return { f, fp };
}
