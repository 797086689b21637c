import { describe, expect, it } from "vitest";
import { boundExcursion, SessionBuffers } from "../src/buffers";
import type { LimitsJson, StateMessage } from "../src/types";

function msg(t: number, y = [0], ydot = [0]): StateMessage {
  return {
    type: "state",
    t,
    phi: t,
    y,
    ydot,
    f: y.map(() => 0),
    motion: "m",
    period: 1,
    v3: 0,
    dphi: 1,
    gamma: 0,
  };
}

describe("SessionBuffers", () => {
  it("never holds more than the window", () => {
    const buf = new SessionBuffers(30);
    for (let i = 0; i <= 2000; i++) buf.push(msg(i * 0.05));
    const tEnd = buf.t[buf.length - 1];
    expect(tEnd).toBeCloseTo(100, 9);
    expect(buf.span()).toBeLessThanOrEqual(30);
    expect(buf.t[0]).toBeGreaterThanOrEqual(tEnd - 30);
  });

  it("keeps everything while the window is not full", () => {
    const buf = new SessionBuffers(30);
    for (let t = 0; t <= 10; t += 1) buf.push(msg(t));
    expect(buf.length).toBe(11);
    expect(buf.t[0]).toBe(0);
  });

  it("survives a gap larger than the window", () => {
    const buf = new SessionBuffers(30);
    buf.push(msg(0));
    buf.push(msg(1));
    buf.push(msg(2));
    buf.push(msg(100));
    expect(buf.length).toBe(1);
    expect(buf.t).toEqual([100]);
  });

  it("drops stale history when time runs backwards", () => {
    const buf = new SessionBuffers(30);
    buf.push(msg(10));
    buf.push(msg(11));
    buf.push(msg(3));
    expect(buf.t).toEqual([3]);
  });

  it("keeps the parallel arrays aligned", () => {
    const buf = new SessionBuffers(5);
    for (let t = 0; t <= 20; t += 0.5) buf.push(msg(t, [t], [2 * t]));
    expect(buf.y.length).toBe(buf.length);
    expect(buf.ydot.length).toBe(buf.length);
    expect(buf.f.length).toBe(buf.length);
    const k = buf.length - 1;
    expect(buf.y[k][0]).toBe(20);
    expect(buf.ydot[k][0]).toBe(40);
  });
});

describe("boundExcursion", () => {
  const limits: LimitsJson = {
    y_min: [-1, -2],
    y_max: [1, 2],
    delta_ydot: [2, 3],
  };

  it("is negative when every sample is strictly inside", () => {
    const buf = new SessionBuffers(30);
    buf.push(msg(0, [0.5, -1.0], [1.0, 2.0]));
    buf.push(msg(1, [-0.9, 1.9], [-1.9, -2.9]));
    const worst = boundExcursion(buf, limits);
    expect(worst).toBeLessThan(0);
    expect(worst).toBeCloseTo(-0.1, 12);
  });

  it("measures a position overshoot", () => {
    const buf = new SessionBuffers(30);
    buf.push(msg(0, [1.5, 0], [0, 0]));
    expect(boundExcursion(buf, limits)).toBeCloseTo(0.5, 12);
  });

  it("measures a rate overshoot on either sign", () => {
    const buf = new SessionBuffers(30);
    buf.push(msg(0, [0, 0], [0, -3.25]));
    expect(boundExcursion(buf, limits)).toBeCloseTo(0.25, 12);
  });
});
