// Heatmap overview: samples as columns grouped into leaf bands, features as
// rows grouped into per-split bands. Cells paint onto a canvas (skipped when
// no 2D context exists, e.g. under jsdom); band structure renders as SVG so
// it stays testable and crisp.

import { select } from "d3-selection";
import type { HeatmapRecord } from "../api.js";
import { divergingColor } from "../scale.js";

export interface HeatmapDom {
  header: SVGSVGElement;
  canvas: HTMLCanvasElement;
  rows: SVGSVGElement;
}

export function renderHeatmap(dom: HeatmapDom, record: HeatmapRecord): void {
  const width = 620;
  const headerHeight = 14;
  const cellHeight = Math.max(3, Math.min(10, Math.floor(240 / Math.max(record.features.length, 1))));
  const height = record.features.length * cellHeight;
  const colWidth = width / Math.max(record.samples.length, 1);

  const header = select(dom.header)
    .attr("width", width)
    .attr("height", headerHeight)
    .attr("viewBox", `0 0 ${width} ${headerHeight}`);
  header.selectAll("*").remove();
  let x = 0;
  for (const band of record.column_bands) {
    header
      .append("rect")
      .attr("class", "band-header")
      .attr("data-leaf", band.leaf)
      .attr("data-count", band.count)
      .attr("x", x)
      .attr("y", 0)
      .attr("width", band.count * colWidth)
      .attr("height", headerHeight - 2)
      .attr("fill", band.color_hex);
    x += band.count * colWidth;
  }

  dom.canvas.width = width;
  dom.canvas.height = height;
  const ctx = dom.canvas.getContext ? dom.canvas.getContext("2d") : null;
  if (ctx) {
    ctx.clearRect(0, 0, width, height);
    for (let r = 0; r < record.values.length; r += 1) {
      const row = record.values[r];
      for (let c = 0; c < row.length; c += 1) {
        ctx.fillStyle = divergingColor(row[c], record.cmax);
        ctx.fillRect(c * colWidth, r * cellHeight, Math.ceil(colWidth), cellHeight);
      }
    }
  }

  // row-band separators and band tags
  const rows = select(dom.rows)
    .attr("width", 120)
    .attr("height", height)
    .attr("viewBox", `0 0 120 ${height}`);
  rows.selectAll("*").remove();
  let rowIndex = 0;
  for (const band of record.feature_bands) {
    if (band.features.length === 0) continue;
    const y0 = rowIndex * cellHeight;
    rows
      .append("text")
      .attr("class", "row-band-tag")
      .attr("data-split", band.split ?? "residual")
      .attr("x", 2)
      .attr("y", y0 + 9)
      .attr("font-size", 9)
      .attr("fill", band.split ? "#333" : "#999")
      .text(band.split ? `split ${band.split}: ${band.features.slice(0, 2).join(", ")}` : "other features");
    rowIndex += band.features.length;
    rows
      .append("line")
      .attr("class", "row-band-divider")
      .attr("x1", 0)
      .attr("x2", 120)
      .attr("y1", rowIndex * cellHeight)
      .attr("y2", rowIndex * cellHeight)
      .attr("stroke", "#aaa");
  }
}
