import { evaluateComponent, sampleCurve } from "./fourier";
import type { SessionBuffers } from "./buffers";
import type { LimitsJson, MotionComponent, StateMessage } from "./types";

export interface LinScale {
  (v: number): number;
  invert(px: number): number;
}

export function linScale(
  d0: number,
  d1: number,
  r0: number,
  r1: number,
): LinScale {
  const k = (r1 - r0) / (d1 - d0);
  const scale = ((v: number) => r0 + (v - d0) * k) as LinScale;
  scale.invert = (px: number) => d0 + (px - r0) / k;
  return scale;
}

export interface Extents {
  x0: number;
  x1: number;
  y0: number;
  y1: number;
}

// Plot area for one joint's phase plane: the limit box plus a margin so the
// bound guides sit inside the canvas instead of on its edge.
export function phasePlaneExtents(
  limits: LimitsJson,
  joint: number,
  padFrac = 0.15,
): Extents {
  const width = limits.y_max[joint] - limits.y_min[joint];
  const dv = limits.delta_ydot[joint];
  return {
    x0: limits.y_min[joint] - padFrac * width,
    x1: limits.y_max[joint] + padFrac * width,
    y0: -dv * (1 + 2 * padFrac),
    y1: dv * (1 + 2 * padFrac),
  };
}

export const JOINT_COLORS = [
  "#5ab4e5",
  "#e5a25a",
  "#7ed491",
  "#d47ec4",
  "#e5e05a",
  "#8d7ee5",
  "#5ae5d0",
  "#e57a6a",
];

const BG = "#14161b";
const GRID = "#262a33";
const TEXT = "#8f96a3";
const GUIDE = "#c3564e";
const CURVE = "#6b7280";
const CURVE_SAMPLES = 256;
const PAD = { l: 34, r: 8, t: 8, b: 20 };

function prepare(canvas: HTMLCanvasElement): CanvasRenderingContext2D {
  const dpr = window.devicePixelRatio || 1;
  const w = Math.max(1, Math.floor(canvas.clientWidth * dpr));
  const h = Math.max(1, Math.floor(canvas.clientHeight * dpr));
  if (canvas.width !== w || canvas.height !== h) {
    canvas.width = w;
    canvas.height = h;
  }
  const ctx = canvas.getContext("2d")!;
  ctx.setTransform(dpr, 0, 0, dpr, 0, 0);
  return ctx;
}

export class PhasePlane {
  private curve: { f: Float64Array; fp: Float64Array } | null = null;
  private curveKey = "";

  constructor(
    private canvas: HTMLCanvasElement,
    readonly joint: number,
    private limits: LimitsJson,
  ) {}

  setCurve(component: MotionComponent, period: number, key: string): void {
    if (key === this.curveKey) return;
    this.curve = sampleCurve(component, period, CURVE_SAMPLES);
    this.curveKey = key;
  }

  render(
    buffers: SessionBuffers,
    last: StateMessage | null,
    component: MotionComponent | null,
  ): void {
    const ctx = prepare(this.canvas);
    const w = this.canvas.clientWidth;
    const h = this.canvas.clientHeight;
    const i = this.joint;
    const ext = phasePlaneExtents(this.limits, i);
    const sx = linScale(ext.x0, ext.x1, PAD.l, w - PAD.r);
    const sy = linScale(ext.y0, ext.y1, h - PAD.b, PAD.t);

    ctx.fillStyle = BG;
    ctx.fillRect(0, 0, w, h);

    ctx.strokeStyle = GRID;
    ctx.lineWidth = 1;
    ctx.strokeRect(PAD.l, PAD.t, w - PAD.l - PAD.r, h - PAD.t - PAD.b);

    // Hard-bound guides: the trace must never reach these lines.
    ctx.strokeStyle = GUIDE;
    ctx.setLineDash([5, 4]);
    for (const gx of [this.limits.y_min[i], this.limits.y_max[i]]) {
      ctx.beginPath();
      ctx.moveTo(sx(gx), PAD.t);
      ctx.lineTo(sx(gx), h - PAD.b);
      ctx.stroke();
    }
    const dv = this.limits.delta_ydot[i];
    for (const gy of [-dv, dv]) {
      ctx.beginPath();
      ctx.moveTo(PAD.l, sy(gy));
      ctx.lineTo(w - PAD.r, sy(gy));
      ctx.stroke();
    }
    ctx.setLineDash([]);

    if (this.curve) {
      ctx.strokeStyle = CURVE;
      ctx.lineWidth = 1.2;
      ctx.beginPath();
      for (let k = 0; k <= CURVE_SAMPLES; k++) {
        const px = sx(this.curve.f[k]);
        const py = sy(this.curve.fp[k]);
        if (k === 0) ctx.moveTo(px, py);
        else ctx.lineTo(px, py);
      }
      ctx.stroke();
    }

    const color = JOINT_COLORS[i % JOINT_COLORS.length];
    const m = buffers.length;
    if (m > 1) {
      ctx.strokeStyle = color;
      ctx.lineWidth = 1.4;
      ctx.beginPath();
      for (let k = 0; k < m; k++) {
        const px = sx(buffers.y[k][i]);
        const py = sy(buffers.ydot[k][i]);
        if (k === 0) ctx.moveTo(px, py);
        else ctx.lineTo(px, py);
      }
      ctx.stroke();
    }

    if (last) {
      ctx.fillStyle = color;
      ctx.beginPath();
      ctx.arc(sx(last.y[i]), sy(last.ydot[i]), 3.5, 0, 2 * Math.PI);
      ctx.fill();
      if (component) {
        const target = evaluateComponent(component, last.period, last.phi);
        ctx.strokeStyle = "#e8e8e8";
        ctx.lineWidth = 1;
        const tx = sx(target.f);
        const ty = sy(target.fp);
        ctx.beginPath();
        ctx.moveTo(tx - 5, ty);
        ctx.lineTo(tx + 5, ty);
        ctx.moveTo(tx, ty - 5);
        ctx.lineTo(tx, ty + 5);
        ctx.stroke();
      }
    }

    ctx.fillStyle = TEXT;
    ctx.font = "11px system-ui, sans-serif";
    ctx.fillText(`joint ${i + 1}`, PAD.l + 6, PAD.t + 14);
    ctx.fillText("y", w - PAD.r - 12, h - 6);
    ctx.save();
    ctx.translate(10, PAD.t + 24);
    ctx.rotate(-Math.PI / 2);
    ctx.fillText("dy/dt", -30, 0);
    ctx.restore();
  }
}

// All joints against time: measured output solid, desired value dashed.
// Convergence shows up as each pair of lines merging.
export class SeriesChart {
  constructor(
    private canvas: HTMLCanvasElement,
    private limits: LimitsJson,
  ) {}

  render(buffers: SessionBuffers): void {
    const ctx = prepare(this.canvas);
    const w = this.canvas.clientWidth;
    const h = this.canvas.clientHeight;

    ctx.fillStyle = BG;
    ctx.fillRect(0, 0, w, h);
    ctx.strokeStyle = GRID;
    ctx.strokeRect(PAD.l, PAD.t, w - PAD.l - PAD.r, h - PAD.t - PAD.b);

    const m = buffers.length;
    const n = this.limits.y_min.length;
    if (m < 2) return;

    const tEnd = buffers.t[m - 1];
    const sx = linScale(
      Math.max(buffers.t[0], tEnd - buffers.windowSeconds),
      tEnd,
      PAD.l,
      w - PAD.r,
    );
    const lo = Math.min(...this.limits.y_min);
    const hi = Math.max(...this.limits.y_max);
    const pad = 0.08 * (hi - lo);
    const sy = linScale(lo - pad, hi + pad, h - PAD.b, PAD.t);

    for (let i = 0; i < n; i++) {
      const color = JOINT_COLORS[i % JOINT_COLORS.length];
      ctx.strokeStyle = color;
      ctx.lineWidth = 1.3;
      ctx.beginPath();
      for (let k = 0; k < m; k++) {
        const px = sx(buffers.t[k]);
        const py = sy(buffers.y[k][i]);
        if (k === 0) ctx.moveTo(px, py);
        else ctx.lineTo(px, py);
      }
      ctx.stroke();

      ctx.setLineDash([3, 4]);
      ctx.globalAlpha = 0.7;
      ctx.beginPath();
      for (let k = 0; k < m; k++) {
        const px = sx(buffers.t[k]);
        const py = sy(buffers.f[k][i]);
        if (k === 0) ctx.moveTo(px, py);
        else ctx.lineTo(px, py);
      }
      ctx.stroke();
      ctx.setLineDash([]);
      ctx.globalAlpha = 1;
    }

    ctx.fillStyle = TEXT;
    ctx.font = "11px system-ui, sans-serif";
    ctx.fillText("y (solid) vs desired (dashed)", PAD.l + 6, PAD.t + 14);
    ctx.fillText(`t = ${tEnd.toFixed(1)} s`, w - PAD.r - 80, h - 6);
  }
}
