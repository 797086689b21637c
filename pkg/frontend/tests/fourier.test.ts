import { describe, expect, it } from "vitest";
import { evaluateComponent, sampleCurve } from "../src/fourier";

const sine = { dc: 0, cos: [], sin: [0.4] };

describe("evaluateComponent", () => {
  it("matches the closed form for a single sine", () => {
    const w = (2 * Math.PI) / 4;
    expect(evaluateComponent(sine, 4, 0).f).toBeCloseTo(0, 12);
    expect(evaluateComponent(sine, 4, 0).fp).toBeCloseTo(0.4 * w, 12);
    expect(evaluateComponent(sine, 4, 1).f).toBeCloseTo(0.4, 12);
    expect(evaluateComponent(sine, 4, 1).fp).toBeCloseTo(0, 12);
  });

  it("zero-pads unequal coefficient lists", () => {
    const c = { dc: 1, cos: [0.3], sin: [0, 0.2] };
    const period = 5;
    const w = (2 * Math.PI) / period;
    const phi = 1.37;
    const f = 1 + 0.3 * Math.cos(w * phi) + 0.2 * Math.sin(2 * w * phi);
    const fp =
      -0.3 * w * Math.sin(w * phi) + 0.4 * w * Math.cos(2 * w * phi);
    const got = evaluateComponent(c, period, phi);
    expect(got.f).toBeCloseTo(f, 12);
    expect(got.fp).toBeCloseTo(fp, 12);
  });

  it("derivative matches a central finite difference", () => {
    const c = { dc: -0.2, cos: [0.31, -0.11, 0.07], sin: [-0.23, 0.05, 0.02] };
    const period = 7.3;
    const h = 1e-6;
    for (const phi of [0.0, 0.91, 2.44, 5.0, 7.1]) {
      const fd =
        (evaluateComponent(c, period, phi + h).f -
          evaluateComponent(c, period, phi - h).f) /
        (2 * h);
      expect(evaluateComponent(c, period, phi).fp).toBeCloseTo(fd, 6);
    }
  });

  it("repeats after one period", () => {
    const c = { dc: 0.5, cos: [0.2, 0.1], sin: [0.3] };
    for (const phi of [0.1, 1.9, 3.3]) {
      const a = evaluateComponent(c, 2.5, phi);
      const b = evaluateComponent(c, 2.5, phi + 2.5);
      expect(b.f).toBeCloseTo(a.f, 12);
      expect(b.fp).toBeCloseTo(a.fp, 12);
    }
  });

  it("constant component has zero derivative everywhere", () => {
    const c = { dc: 0.7, cos: [], sin: [] };
    for (const phi of [-3, 0, 12.8]) {
      const got = evaluateComponent(c, 1, phi);
      expect(got.f).toBe(0.7);
      expect(got.fp).toBe(0);
    }
  });
});

describe("sampleCurve", () => {
  it("returns m+1 points with an exactly closed loop", () => {
    const { f, fp } = sampleCurve(sine, 4, 64);
    expect(f.length).toBe(65);
    expect(fp.length).toBe(65);
    expect(f[64]).toBe(f[0]);
    expect(fp[64]).toBe(fp[0]);
  });

  it("samples the analytic curve", () => {
    const { f, fp } = sampleCurve(sine, 4, 8);
    const at = (i: number) => evaluateComponent(sine, 4, (i * 4) / 8);
    for (let i = 0; i < 8; i++) {
      expect(f[i]).toBeCloseTo(at(i).f, 12);
      expect(fp[i]).toBeCloseTo(at(i).fp, 12);
    }
  });
});
