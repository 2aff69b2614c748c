// PCA projection scatterplot with the two-click divider-line input.
// First click anchors the line, second click sets its direction; the normal
// is the direction rotated 90° counter-clockwise, so "positive" is the left
// half-plane. Confirmation is a separate action wired by the app shell.

import { scaleLinear, type ScaleLinear } from "d3-scale";
import { select } from "d3-selection";
import type { ProjectionRecord, OverlayRecord, LineBody } from "../api.js";
import type { UiState } from "../state.js";

export interface ProjectionHandlers {
  onPlaneClick?: (dataPoint: [number, number]) => void;
}

export interface ProjectionScales {
  x: ScaleLinear<number, number>;
  y: ScaleLinear<number, number>;
}

export function draftLine(draft: UiState["draft"]): LineBody | null {
  if (!draft.anchor || !draft.second) return null;
  const [ax, ay] = draft.anchor;
  const [bx, by] = draft.second;
  const dx = bx - ax;
  const dy = by - ay;
  const norm = Math.hypot(dx, dy);
  if (norm === 0) return null;
  return { point: [ax, ay], normal: [-dy / norm, dx / norm] };
}

export function renderProjection(
  svgEl: SVGSVGElement,
  record: ProjectionRecord,
  state: UiState,
  overlay: OverlayRecord | null,
  handlers: ProjectionHandlers = {},
  size = 360,
): ProjectionScales {
  const margin = 24;
  const xs = record.coords.map(([x]) => x);
  const ys = record.coords.map(([, y]) => y);
  const pad = (lo: number, hi: number): [number, number] => {
    const span = hi - lo || 1;
    return [lo - span * 0.05, hi + span * 0.05];
  };
  const xScale = scaleLinear().domain(pad(Math.min(...xs), Math.max(...xs))).range([margin, size - margin]);
  const yScale = scaleLinear().domain(pad(Math.min(...ys), Math.max(...ys))).range([size - margin, margin]);

  const svg = select(svgEl).attr("width", size).attr("height", size).attr("viewBox", `0 0 ${size} ${size}`);
  svg.selectAll("*").remove();

  svg
    .append("rect")
    .attr("class", "plane")
    .attr("x", 0)
    .attr("y", 0)
    .attr("width", size)
    .attr("height", size)
    .attr("fill", "#fff")
    .on("click", (event: MouseEvent) => {
      const rect = svgEl.getBoundingClientRect();
      const px = event.clientX - rect.left;
      const py = event.clientY - rect.top;
      handlers.onPlaneClick?.([xScale.invert(px), yScale.invert(py)]);
    });

  const colorFor = (index: number): string => {
    const sample = record.samples[index];
    if (state.overlayOn && overlay) return overlay.colors[sample] ?? "#999";
    if (state.colorBySelection && record.colors) return record.colors[index];
    return "#5677a3";
  };

  svg
    .append("g")
    .selectAll("circle.point")
    .data(record.coords)
    .join("circle")
    .attr("class", "point")
    .attr("data-sample", (_d, i) => record.samples[i])
    .attr("cx", ([x]) => xScale(x))
    .attr("cy", ([, y]) => yScale(y))
    .attr("r", 3)
    .attr("fill", (_d, i) => colorFor(i))
    .attr("fill-opacity", 0.8)
    .style("pointer-events", "none");

  svg
    .append("text")
    .attr("class", "axis-caption")
    .attr("x", size / 2)
    .attr("y", size - 4)
    .attr("text-anchor", "middle")
    .attr("font-size", 10)
    .attr("fill", "#777")
    .text(`PC${record.pc_x + 1} (var ${record.explained_variance[record.pc_x]?.toPrecision(3) ?? "?"})`);
  svg
    .append("text")
    .attr("class", "axis-caption")
    .attr("transform", `translate(10, ${size / 2}) rotate(-90)`)
    .attr("text-anchor", "middle")
    .attr("font-size", 10)
    .attr("fill", "#777")
    .text(`PC${record.pc_y + 1} (var ${record.explained_variance[record.pc_y]?.toPrecision(3) ?? "?"})`);

  drawDraft(svgEl, state, { x: xScale, y: yScale }, size);
  return { x: xScale, y: yScale };
}

export function drawDraft(
  svgEl: SVGSVGElement,
  state: UiState,
  scales: ProjectionScales,
  size = 360,
): void {
  const svg = select(svgEl);
  svg.selectAll(".draft").remove();
  const { anchor, second } = state.draft;
  if (anchor) {
    svg
      .append("circle")
      .attr("class", "draft draft-anchor")
      .attr("cx", scales.x(anchor[0]))
      .attr("cy", scales.y(anchor[1]))
      .attr("r", 4)
      .attr("fill", "none")
      .attr("stroke", "#d2691e");
  }
  const body = draftLine(state.draft);
  if (anchor && second && body) {
    const [ax, ay] = anchor;
    const dx = second[0] - ax;
    const dy = second[1] - ay;
    const len = Math.hypot(dx, dy);
    const reach = 1e3; // long enough to cross the viewport in data units
    const ux = (dx / len) * reach;
    const uy = (dy / len) * reach;
    svg
      .append("line")
      .attr("class", "draft draft-line")
      .attr("x1", scales.x(ax - ux))
      .attr("y1", scales.y(ay - uy))
      .attr("x2", scales.x(ax + ux))
      .attr("y2", scales.y(ay + uy))
      .attr("stroke", "#d2691e")
      .attr("stroke-width", 1.5)
      .attr("clip-path", `inset(0 0 0 0)`);
    // short arrow marking the positive side
    const mx = scales.x(ax);
    const my = scales.y(ay);
    const nx = scales.x(ax + body.normal[0] * (len || 1)) - mx;
    const ny = scales.y(ay + body.normal[1] * (len || 1)) - my;
    const nLen = Math.hypot(nx, ny) || 1;
    svg
      .append("line")
      .attr("class", "draft draft-normal")
      .attr("x1", mx)
      .attr("y1", my)
      .attr("x2", mx + (nx / nLen) * 18)
      .attr("y2", my + (ny / nLen) * 18)
      .attr("stroke", "#d2691e")
      .attr("stroke-dasharray", "3 2");
  }
  void size;
}
