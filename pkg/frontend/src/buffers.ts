import type { LimitsJson, StateMessage } from "./types";

// Rolling window of streamed samples. Gaps are fine (entries keep their own
// timestamps); a backwards jump in t means the server restarted or was
// replaced, so the history no longer belongs to this run and is dropped.
export class SessionBuffers {
  t: number[] = [];
  y: number[][] = [];
  ydot: number[][] = [];
  f: number[][] = [];

  constructor(readonly windowSeconds: number = 30) {}

  get length(): number {
    return this.t.length;
  }

  span(): number {
    if (this.t.length < 2) return 0;
    return this.t[this.t.length - 1] - this.t[0];
  }

  clear(): void {
    this.t.length = 0;
    this.y.length = 0;
    this.ydot.length = 0;
    this.f.length = 0;
  }

  push(msg: StateMessage): void {
    const last = this.t[this.t.length - 1];
    if (last !== undefined && msg.t < last) this.clear();

    this.t.push(msg.t);
    this.y.push(msg.y);
    this.ydot.push(msg.ydot);
    this.f.push(msg.f);

    const cutoff = msg.t - this.windowSeconds;
    let drop = 0;
    while (drop < this.t.length && this.t[drop] < cutoff) drop++;
    if (drop > 0) {
      this.t.splice(0, drop);
      this.y.splice(0, drop);
      this.ydot.splice(0, drop);
      this.f.splice(0, drop);
    }
  }
}

// Worst excursion past any position or rate bound over the whole window.
// Negative means every sample stayed strictly inside; zero or positive is a
// violation of the service's hard-bound guarantee.
export function boundExcursion(buf: SessionBuffers, limits: LimitsJson): number {
  let worst = -Infinity;
  for (let i = 0; i < buf.length; i++) {
    const y = buf.y[i];
    const ydot = buf.ydot[i];
    for (let j = 0; j < y.length; j++) {
      worst = Math.max(
        worst,
        y[j] - limits.y_max[j],
        limits.y_min[j] - y[j],
        Math.abs(ydot[j]) - limits.delta_ydot[j],
      );
    }
  }
  return worst;
}
