// Feature-loadings biplot. Each feature is a vector from the origin; labels
// sit on an outer circle at their vector's angle, spread apart by a 1D
// angular relaxation so they stay readable. Clicking a vector tip or label
// toggles the feature in the global selection; dragging a rectangle selects
// every feature whose tip falls inside it.

import { select } from "d3-selection";
import type { LoadingsRecord } from "../api.js";
import { isFeatureActive, type UiState } from "../state.js";

export interface LoadingsHandlers {
  onFeatureClick?: (feature: string) => void;
  onBrush?: (features: string[]) => void;
}

/**
 * Spread angles (radians) so adjacent labels keep at least minGap between
 * them, iterating pairwise pushes to a fixed point or maxIter rounds.
 * Order is preserved; angles wrap on the circle.
 */
export function relaxAngles(angles: number[], minGap: number, maxIter = 100): number[] {
  const TWO_PI = Math.PI * 2;
  const n = angles.length;
  if (n < 2 || minGap <= 0) return angles.slice();
  if (minGap * n > TWO_PI) minGap = TWO_PI / n; // cannot fit otherwise

  const order = angles
    .map((angle, index) => ({ angle: ((angle % TWO_PI) + TWO_PI) % TWO_PI, index }))
    .sort((a, b) => a.angle - b.angle);

  for (let iter = 0; iter < maxIter; iter += 1) {
    let moved = false;
    for (let i = 0; i < n; i += 1) {
      const a = order[i];
      const b = order[(i + 1) % n];
      const gap = i + 1 < n ? b.angle - a.angle : b.angle + TWO_PI - a.angle;
      if (gap < minGap - 1e-9) {
        const push = (minGap - gap) / 2;
        a.angle -= push;
        b.angle += push;
        moved = true;
      }
    }
    if (!moved) break;
  }
  const out = new Array<number>(n);
  for (const entry of order) out[entry.index] = ((entry.angle % TWO_PI) + TWO_PI) % TWO_PI;
  return out;
}

export function renderLoadings(
  svgEl: SVGSVGElement,
  record: LoadingsRecord,
  state: UiState,
  handlers: LoadingsHandlers = {},
  size = 300,
): void {
  const center = size / 2;
  const radius = size / 2 - 46;
  const maxLen = Math.max(1e-12, ...record.vectors.map(([x, y]) => Math.hypot(x, y)));
  const sx = (v: number) => center + (v / maxLen) * radius;
  const sy = (v: number) => center - (v / maxLen) * radius;

  const svg = select(svgEl).attr("width", size).attr("height", size).attr("viewBox", `0 0 ${size} ${size}`);
  svg.selectAll("*").remove();

  svg
    .append("circle")
    .attr("class", "label-ring")
    .attr("cx", center)
    .attr("cy", center)
    .attr("r", radius + 14)
    .attr("fill", "none")
    .attr("stroke", "#e4e4e4");

  svg
    .selectAll("line.loading-vector")
    .data(record.vectors)
    .join("line")
    .attr("class", (_v, i) =>
      `loading-vector${isFeatureActive(state, record.features[i]) ? "" : " inactive"}`,
    )
    .attr("data-feature", (_v, i) => record.features[i])
    .attr("x1", center)
    .attr("y1", center)
    .attr("x2", ([x]) => sx(x))
    .attr("y2", ([, y]) => sy(y))
    .attr("stroke", (_v, i) => (isFeatureActive(state, record.features[i]) ? "#3c6090" : "#cfcfcf"))
    .attr("stroke-width", 1.2);

  svg
    .selectAll("circle.loading-tip")
    .data(record.vectors)
    .join("circle")
    .attr("class", "loading-tip")
    .attr("data-feature", (_v, i) => record.features[i])
    .attr("cx", ([x]) => sx(x))
    .attr("cy", ([, y]) => sy(y))
    .attr("r", 3)
    .attr("fill", (_v, i) => (isFeatureActive(state, record.features[i]) ? "#3c6090" : "#cfcfcf"))
    .style("cursor", "pointer")
    .on("click", (_event, _v) => {
      const target = _event.currentTarget as SVGCircleElement;
      const feature = target.getAttribute("data-feature");
      if (feature) handlers.onFeatureClick?.(feature);
    });

  const rawAngles = record.vectors.map(([x, y]) => Math.atan2(y, x));
  const spread = relaxAngles(rawAngles, (8 * Math.PI) / 180);
  svg
    .selectAll("text.feature-label")
    .data(record.features)
    .join("text")
    .attr("class", (f) => `feature-label${isFeatureActive(state, f) ? "" : " inactive"}`)
    .attr("data-feature", (f) => f)
    .attr("x", (_f, i) => center + Math.cos(spread[i]) * (radius + 18))
    .attr("y", (_f, i) => center - Math.sin(spread[i]) * (radius + 18))
    .attr("text-anchor", (_f, i) => (Math.cos(spread[i]) < -0.1 ? "end" : Math.cos(spread[i]) > 0.1 ? "start" : "middle"))
    .attr("font-size", 9)
    .text((f) => f)
    .on("click", (_event, f) => handlers.onFeatureClick?.(f));

  attachBrush(svgEl, record, { sx, sy }, handlers);
}

function attachBrush(
  svgEl: SVGSVGElement,
  record: LoadingsRecord,
  scale: { sx: (v: number) => number; sy: (v: number) => number },
  handlers: LoadingsHandlers,
): void {
  let start: [number, number] | null = null;
  let rect: SVGRectElement | null = null;

  const pixel = (event: MouseEvent): [number, number] => {
    const bounds = svgEl.getBoundingClientRect();
    return [event.clientX - bounds.left, event.clientY - bounds.top];
  };

  svgEl.addEventListener("mousedown", (event) => {
    start = pixel(event);
    rect = document.createElementNS("http://www.w3.org/2000/svg", "rect");
    rect.setAttribute("class", "brush-rect");
    rect.setAttribute("fill", "rgba(90,130,190,0.15)");
    rect.setAttribute("stroke", "#5a82be");
    svgEl.appendChild(rect);
  });
  svgEl.addEventListener("mousemove", (event) => {
    if (!start || !rect) return;
    const [x, y] = pixel(event);
    rect.setAttribute("x", String(Math.min(x, start[0])));
    rect.setAttribute("y", String(Math.min(y, start[1])));
    rect.setAttribute("width", String(Math.abs(x - start[0])));
    rect.setAttribute("height", String(Math.abs(y - start[1])));
  });
  svgEl.addEventListener("mouseup", (event) => {
    if (!start || !rect) return;
    const [x, y] = pixel(event);
    const x0 = Math.min(x, start[0]);
    const x1 = Math.max(x, start[0]);
    const y0 = Math.min(y, start[1]);
    const y1 = Math.max(y, start[1]);
    rect.remove();
    rect = null;
    start = null;
    if (x1 - x0 < 3 && y1 - y0 < 3) return; // treat as a click, not a brush
    const hit = record.features.filter((_f, i) => {
      const px = scale.sx(record.vectors[i][0]);
      const py = scale.sy(record.vectors[i][1]);
      return px >= x0 && px <= x1 && py >= y0 && py <= y1;
    });
    if (hit.length) handlers.onBrush?.(hit);
  });
}
