import { describe, expect, it } from "vitest";
import { relaxAngles } from "../src/views/loadings";

const TWO_PI = Math.PI * 2;

function circularGaps(angles: number[]): number[] {
  const sorted = [...angles].sort((a, b) => a - b);
  const gaps = sorted.slice(1).map((a, i) => a - sorted[i]);
  gaps.push(sorted[0] + TWO_PI - sorted[sorted.length - 1]);
  return gaps;
}

describe("relaxAngles", () => {
  it("leaves well-spread labels untouched", () => {
    const angles = [0, Math.PI / 2, Math.PI, (3 * Math.PI) / 2];
    const out = relaxAngles(angles, 0.1);
    out.forEach((a, i) => expect(a).toBeCloseTo(angles[i], 9));
  });

  it("spreads a tight cluster to at least the minimum gap", () => {
    const minGap = 0.15;
    const angles = [1.0, 1.01, 1.02, 1.03, 1.04];
    const out = relaxAngles(angles, minGap);
    for (const gap of circularGaps(out).slice(0, -1)) {
      expect(gap).toBeGreaterThanOrEqual(minGap - 1e-6);
    }
  });

  it("preserves the angular order of labels", () => {
    const angles = [0.2, 0.21, 0.22, 2.5, 4.0];
    const out = relaxAngles(angles, 0.1);
    const order = (xs: number[]) => [...xs.keys()].sort((a, b) => xs[a] - xs[b]);
    expect(order(out)).toEqual(order(angles));
  });

  it("caps the gap when too many labels must share the circle", () => {
    const n = 80;
    const angles = Array.from({ length: n }, () => 1.0 + Math.random() * 0.01);
    const out = relaxAngles(angles, 0.5); // 80 * 0.5 > 2 pi, must shrink
    expect(out.length).toBe(n);
    for (const a of out) {
      expect(Number.isFinite(a)).toBe(true);
    }
  });

  it("terminates within the iteration budget on adversarial input", () => {
    const angles = Array.from({ length: 40 }, (_v, i) => (i % 2) * 1e-6);
    const out = relaxAngles(angles, 0.05, 100);
    expect(out.length).toBe(40);
  });
});
