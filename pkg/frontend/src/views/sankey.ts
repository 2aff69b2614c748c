// Top-down hierarchy view. Node and band widths are exactly the spans the
// service computed; nothing is re-derived here.

import { select } from "d3-selection";
import type { TreeRecord } from "../api.js";

export interface SankeyOptions {
  width?: number;
  rowHeight?: number;
  nodeHeight?: number;
  onSelect?: (nodeId: string) => void;
}

export function renderSankey(
  svgEl: SVGSVGElement,
  tree: TreeRecord,
  selected: string,
  options: SankeyOptions = {},
): void {
  const width = options.width ?? 620;
  const rowHeight = options.rowHeight ?? 64;
  const nodeHeight = options.nodeHeight ?? 26;
  const maxDepth = Math.max(...tree.nodes.map((n) => n.depth));
  const height = (maxDepth + 1) * rowHeight + nodeHeight;

  const svg = select(svgEl).attr("viewBox", `0 0 ${width} ${height}`).attr("width", width).attr("height", height);
  svg.selectAll("*").remove();

  const colorOf = new Map(tree.nodes.map((n) => [n.color, n.color_hex]));
  const depthOf = new Map(tree.nodes.map((n) => [n.id, n.depth]));

  // connection bands first, so nodes draw on top
  svg
    .selectAll("rect.edge-band")
    .data(tree.edges)
    .join("rect")
    .attr("class", "edge-band")
    .attr("x", (e) => e.x0 * width)
    .attr("width", (e) => Math.max((e.x1 - e.x0) * width, 0.5))
    .attr("y", (e) => (depthOf.get(e.parent) ?? 0) * rowHeight + nodeHeight)
    .attr("height", (e) => ((depthOf.get(e.child) ?? 1) - (depthOf.get(e.parent) ?? 0)) * rowHeight - nodeHeight)
    .attr("fill", (e) => {
      const child = tree.nodes.find((n) => n.id === e.child);
      return child ? child.color_hex : "#ccc";
    });

  const groups = svg
    .selectAll<SVGGElement, TreeRecord["nodes"][number]>("g.sankey-node")
    .data(tree.nodes, (n) => n.id)
    .join("g")
    .attr(
      "class",
      (n) => `sankey-node ${n.is_leaf ? "leaf" : "internal"}${n.id === selected ? " selected" : ""}`,
    )
    .attr("data-node", (n) => n.id)
    .attr("data-count", (n) => n.members_count)
    .attr("transform", (n) => `translate(${n.x0 * width}, ${n.depth * rowHeight})`)
    .on("click", (_event, n) => options.onSelect?.(n.id));

  // per-descendant-cluster color strip segments
  groups
    .selectAll("rect.segment")
    .data((n) =>
      n.segments.map(([color, x0, x1]) => ({
        color,
        offset: (x0 - n.x0) * width,
        width: Math.max((x1 - x0) * width, 0.5),
      })),
    )
    .join("rect")
    .attr("class", "segment")
    .attr("x", (s) => s.offset)
    .attr("y", 0)
    .attr("width", (s) => s.width)
    .attr("height", nodeHeight)
    .attr("fill", (s) => colorOf.get(s.color) ?? "#999");

  groups
    .append("rect")
    .attr("class", "frame")
    .attr("width", (n) => Math.max((n.x1 - n.x0) * width, 0.5))
    .attr("height", nodeHeight)
    .attr("fill", "none")
    .attr("stroke", "#666")
    .attr("stroke-width", 0.75);

  groups
    .append("text")
    .attr("class", "node-caption")
    .attr("x", 3)
    .attr("y", nodeHeight + 11)
    .attr("font-size", 10)
    .attr("fill", "#555")
    .text((n) => {
      const count = `${n.members_count}`;
      if (!n.labels.length) return count;
      const shown = n.labels.slice(0, 3).join(", ");
      const more = n.labels.length > 3 ? ` +${n.labels.length - 3}` : "";
      return `${count} | ${shown}${more}`;
    });
}
