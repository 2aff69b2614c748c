// Survival view: one step curve per cluster in the cluster's color, plus the
// dotted gray whole-dataset baseline.

import { axisBottom, axisLeft } from "d3-axis";
import { scaleLinear } from "d3-scale";
import { select } from "d3-selection";
import { curveStepAfter, line } from "d3-shape";
import type { SurvivalRecord } from "../api.js";

export function renderSurvival(svgEl: SVGSVGElement, record: SurvivalRecord, width = 620, height = 220): void {
  const margin = { top: 8, right: 12, bottom: 22, left: 34 };
  const svg = select(svgEl).attr("width", width).attr("height", height).attr("viewBox", `0 0 ${width} ${height}`);
  svg.selectAll("*").remove();

  const allSteps = [
    ...record.baseline.steps,
    ...record.curves.flatMap((c) => c.steps ?? []),
  ];
  const tMax = Math.max(1, ...allSteps.map(([t]) => t));
  const xScale = scaleLinear().domain([0, tMax]).range([margin.left, width - margin.right]);
  const yScale = scaleLinear().domain([0, 1]).range([height - margin.bottom, margin.top]);

  const path = line<[number, number]>()
    .curve(curveStepAfter)
    .x(([t]) => xScale(t))
    .y(([, p]) => yScale(p));

  const extend = (steps: [number, number][]): [number, number][] =>
    steps.length ? [...steps, [tMax, steps[steps.length - 1][1]]] : [];

  svg
    .append("g")
    .attr("transform", `translate(0, ${height - margin.bottom})`)
    .call(axisBottom(xScale).ticks(6));
  svg.append("g").attr("transform", `translate(${margin.left}, 0)`).call(axisLeft(yScale).ticks(5));

  svg
    .append("path")
    .attr("class", "curve-baseline")
    .attr("d", path(extend(record.baseline.steps)) ?? "");

  svg
    .selectAll("path.curve")
    .data(record.curves.filter((c) => c.steps !== null))
    .join("path")
    .attr("class", "curve")
    .attr("data-cluster", (c) => c.cluster)
    .attr("fill", "none")
    .attr("stroke", (c) => c.color_hex)
    .attr("stroke-width", 1.8)
    .attr("d", (c) => path(extend(c.steps as [number, number][])) ?? "");

  const skipped = record.curves.reduce((total, c) => total + c.skipped, 0);
  if (skipped > 0) {
    svg
      .append("text")
      .attr("class", "skip-note")
      .attr("x", width - margin.right)
      .attr("y", margin.top + 8)
      .attr("text-anchor", "end")
      .attr("font-size", 10)
      .attr("fill", "#888")
      .text(`${skipped} samples without clinical data`);
  }
}
