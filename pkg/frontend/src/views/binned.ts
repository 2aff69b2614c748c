// Aligned binned heatmaps for the projection axes. The bottom heatmap has
// bins as columns and features as rows; the right-hand one is transposed.
// Empty bins render as gray outlined boxes. Feature labels carry their raw
// eigenvector entry and are click targets for the global feature selection.

import { select } from "d3-selection";
import type { BinnedRecord } from "../api.js";
import { divergingColor } from "../scale.js";
import { isFeatureActive, type UiState } from "../state.js";

export interface BinnedHandlers {
  onFeatureClick?: (feature: string) => void;
}

const CELL = 11;
const LABEL_SPACE = 118;

export function renderBinned(
  svgEl: SVGSVGElement,
  record: BinnedRecord,
  state: UiState,
  cmax: number,
  handlers: BinnedHandlers = {},
): void {
  const nBins = record.counts.length;
  const nFeatures = record.features.length;
  const horizontal = record.axis === "x"; // bins run along x
  const width = horizontal ? nBins * CELL + LABEL_SPACE : nFeatures * CELL + LABEL_SPACE;
  const height = horizontal ? nFeatures * CELL : nBins * CELL;

  const svg = select(svgEl)
    .attr("width", width)
    .attr("height", Math.max(height, CELL))
    .attr("viewBox", `0 0 ${width} ${Math.max(height, CELL)}`);
  svg.selectAll("*").remove();

  const cells: { bin: number; feature: number; value: number | null }[] = [];
  record.means.forEach((row, featureIdx) => {
    row.forEach((value, binIdx) => cells.push({ bin: binIdx, feature: featureIdx, value }));
  });

  const originX = horizontal ? LABEL_SPACE : 0;
  svg
    .append("g")
    .selectAll("rect.cell")
    .data(cells)
    .join("rect")
    .attr("class", (c) => (c.value === null ? "cell empty-bin" : "cell"))
    .attr("x", (c) => originX + (horizontal ? c.bin : c.feature) * CELL)
    .attr("y", (c) => (horizontal ? c.feature : c.bin) * CELL)
    .attr("width", CELL - 1)
    .attr("height", CELL - 1)
    .attr("fill", (c) => (c.value === null ? "none" : divergingColor(c.value, cmax)))
    .attr("fill-opacity", (c) =>
      c.value !== null && !isFeatureActive(state, record.features[c.feature]) ? 0.25 : 1,
    );

  const labels = svg
    .append("g")
    .selectAll<SVGTextElement, string>("text.feature-label")
    .data(record.features)
    .join("text")
    .attr("class", (f) => `feature-label${isFeatureActive(state, f) ? "" : " inactive"}`)
    .attr("data-feature", (f) => f)
    .attr("font-size", 9)
    .text((f, i) => `${f} (${record.eigenvector[i].toFixed(2)})`)
    .on("click", (_event, f) => handlers.onFeatureClick?.(f));

  if (horizontal) {
    labels
      .attr("x", LABEL_SPACE - 4)
      .attr("y", (_f, i) => i * CELL + CELL - 3)
      .attr("text-anchor", "end");
  } else {
    labels
      .attr("transform", (_f, i) => `translate(${i * CELL + CELL - 3}, ${height + 4}) rotate(45)`)
      .attr("text-anchor", "start");
    svg.attr("height", height + LABEL_SPACE).attr("viewBox", `0 0 ${width} ${height + LABEL_SPACE}`);
  }
}
