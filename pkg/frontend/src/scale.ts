// Rendering-only color helpers. Cell values arrive from the service; this
// maps them onto the blue (negative) / yellow (zero) / red (positive) ramp
// the service documents, clamped at +-cmax.

function lerp(a: [number, number, number], b: [number, number, number], t: number): string {
  const ch = (i: number) => Math.round(a[i] + (b[i] - a[i]) * t);
  return `rgb(${ch(0)},${ch(1)},${ch(2)})`;
}

const BLUE: [number, number, number] = [0, 0, 255];
const YELLOW: [number, number, number] = [255, 255, 0];
const RED: [number, number, number] = [255, 0, 0];

export function divergingColor(value: number, cmax: number): string {
  const v = Math.max(-cmax, Math.min(cmax, value));
  return v < 0 ? lerp(YELLOW, BLUE, -v / cmax) : lerp(YELLOW, RED, v / cmax);
}
