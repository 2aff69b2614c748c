"""Resolution-independent layout computation for the four linked views.

Everything here is a pure function of a tree/matrix snapshot. Horizontal
spans live in [0, 1); projection-space quantities (bin edges, coordinates)
stay in PC units because they must align with the scatterplot axes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .colors import DivergingScale, palette_hex
from .data import ClinicalTable, ExpressionMatrix
from .errors import NoFeatureSelected, NoLabels, UniverseMismatch
from .partition import PartitionTree
from .pca import PcaBasis, Projection2D

DEFAULT_BINS = 20
DEFAULT_CMAX = 3.0


# --- hierarchy (top-down Sankey) ---------------------------------------------


@dataclass(frozen=True)
class HierarchyNode:
    id: str
    parent: str | None
    depth: int
    x0: float
    x1: float
    width: float  # members / |dataset|, exact definition independent of tiling
    members_count: int
    color_index: int
    is_leaf: bool
    labels: tuple[str, ...]
    segments: tuple[tuple[int, float, float], ...]  # (color, x0, x1) per descendant leaf


@dataclass(frozen=True)
class HierarchyEdge:
    parent: str
    child: str
    x0: float
    x1: float
    width: float


@dataclass(frozen=True)
class HierarchyLayout:
    n_samples: int
    nodes: tuple[HierarchyNode, ...]
    edges: tuple[HierarchyEdge, ...]


def hierarchy_layout(tree: PartitionTree) -> HierarchyLayout:
    """Spans proportional to member counts; children tile their parent."""
    n = tree.matrix.n_samples
    spans: dict[str, tuple[float, float]] = {tree.root_id: (0.0, 1.0)}
    nodes: list[HierarchyNode] = []
    edges: list[HierarchyEdge] = []

    def leaf_segments(node_id: str) -> list[tuple[int, float, float]]:
        node = tree.nodes[node_id]
        if node.is_leaf:
            x0, x1 = spans[node_id]
            return [(node.color_index, x0, x1)]
        return leaf_segments(node.rule.positive_child) + leaf_segments(node.rule.negative_child)

    def walk(node_id: str, depth: int) -> None:
        node = tree.nodes[node_id]
        x0, x1 = spans[node_id]
        if not node.is_leaf:
            pos_id = node.rule.positive_child
            neg_id = node.rule.negative_child
            cut = x0 + len(tree.nodes[pos_id].members) / n
            spans[pos_id] = (x0, cut)
            spans[neg_id] = (cut, x1)
            walk(pos_id, depth + 1)
            walk(neg_id, depth + 1)
            for child_id in (pos_id, neg_id):
                cx0, cx1 = spans[child_id]
                edges.append(
                    HierarchyEdge(
                        parent=node_id,
                        child=child_id,
                        x0=cx0,
                        x1=cx1,
                        width=len(tree.nodes[child_id].members) / n,
                    )
                )
        labels = node.important.selected_names() if node.important is not None else ()
        nodes.append(
            HierarchyNode(
                id=node_id,
                parent=node.parent,
                depth=depth,
                x0=x0,
                x1=x1,
                width=len(node.members) / n,
                members_count=len(node.members),
                color_index=node.color_index,
                is_leaf=node.is_leaf,
                labels=labels,
                segments=tuple(leaf_segments(node_id)),
            )
        )

    walk(tree.root_id, 0)
    nodes.sort(key=lambda nd: (nd.depth, nd.x0))
    return HierarchyLayout(n_samples=n, nodes=tuple(nodes), edges=tuple(edges))


# --- heatmap overview ---------------------------------------------------------


@dataclass(frozen=True)
class ColumnBand:
    leaf_id: str
    color_index: int
    sample_indices: tuple[int, ...]


@dataclass(frozen=True)
class FeatureBand:
    split_node_id: str | None  # None marks the residual band
    feature_indices: tuple[int, ...]


@dataclass(frozen=True)
class HeatmapLayout:
    column_bands: tuple[ColumnBand, ...]
    feature_bands: tuple[FeatureBand, ...]

    @property
    def sample_order(self) -> tuple[int, ...]:
        return tuple(i for band in self.column_bands for i in band.sample_indices)

    @property
    def feature_order(self) -> tuple[int, ...]:
        return tuple(i for band in self.feature_bands for i in band.feature_indices)


def heatmap_overview(tree: PartitionTree, matrix: ExpressionMatrix) -> HeatmapLayout:
    """Columns grouped by leaf bands; rows grouped by per-split feature bands.

    A feature selected by several splits belongs to the earliest split's band;
    everything unclaimed lands in the residual band in original order.
    """
    column_bands = tuple(
        ColumnBand(
            leaf_id=leaf.id,
            color_index=leaf.color_index,
            sample_indices=tuple(matrix.sample_indices(leaf.members)),
        )
        for leaf in tree.leaves()
    )

    claimed: set[int] = set()
    feature_bands: list[FeatureBand] = []
    for node in tree.internal_nodes_by_creation():
        report = node.important
        band: list[tuple[float, int]] = []
        for sel in report.selected:
            name = report.feature_names[sel]
            if not matrix.has_feature(name):
                continue  # imported model naming a feature this matrix lacks
            idx = matrix.feature_index(name)
            if idx in claimed:
                continue
            band.append((max(float(report.mu_a[sel]), float(report.mu_b[sel])), idx))
            claimed.add(idx)
        # descending max cluster mean, stable tie-break on original index
        band.sort(key=lambda pair: (-pair[0], pair[1]))
        feature_bands.append(FeatureBand(node.id, tuple(idx for _, idx in band)))
    residual = tuple(i for i in range(matrix.n_features) if i not in claimed)
    feature_bands.append(FeatureBand(None, residual))
    return HeatmapLayout(column_bands=column_bands, feature_bands=tuple(feature_bands))


# --- aligned binned heatmaps ---------------------------------------------------


@dataclass(frozen=True, eq=False)
class BinnedHeatmap:
    axis: str  # "x" | "y"
    pc_index: int
    edges: tuple[float, ...]  # n_bins + 1, equal width over [min, max]
    counts: tuple[int, ...]
    feature_indices: tuple[int, ...]  # descending |eigenvector entry|
    eigenvector: tuple[float, ...]  # raw entry per feature, for labels
    means: np.ndarray  # (n_features, n_bins); NaN marks an EMPTY bin


def binned_heatmap(
    projection: Projection2D,
    matrix: ExpressionMatrix,
    basis: PcaBasis,
    axis: str,
    n_bins: int = DEFAULT_BINS,
) -> BinnedHeatmap:
    """Equal-width bins over the axis extent; per-bin per-feature mean values.

    The point sitting exactly on the max edge joins the last bin. Features are
    the basis subset ordered by descending |eigenvector entry| for the axis PC.
    """
    if axis not in ("x", "y"):
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    if n_bins < 1:
        raise ValueError(f"n_bins must be >= 1, got {n_bins}")
    if len(projection.sample_ids) == 0:
        raise ValueError("projection is empty")

    coords = projection.axis(axis)
    pc_index = projection.pc_x if axis == "x" else projection.pc_y
    lo, hi = float(coords.min()), float(coords.max())
    edges = np.linspace(lo, hi, n_bins + 1)
    assignment = np.clip(np.searchsorted(edges, coords, side="right") - 1, 0, n_bins - 1)

    component = basis.components[pc_index]
    order = sorted(
        range(len(basis.feature_subset)),
        key=lambda j: (-abs(float(component[j])), basis.feature_subset[j]),
    )
    feature_indices = tuple(basis.feature_subset[j] for j in order)
    eigenvector = tuple(float(component[j]) for j in order)

    sample_idx = matrix.sample_indices(projection.sample_ids)
    sub = matrix.values[np.ix_(sample_idx, list(feature_indices))]
    counts = np.zeros(n_bins, dtype=int)
    means = np.full((len(feature_indices), n_bins), np.nan)
    for b in range(n_bins):
        mask = assignment == b
        counts[b] = int(mask.sum())
        if counts[b]:
            means[:, b] = sub[mask].mean(axis=0)
    means.setflags(write=False)
    return BinnedHeatmap(
        axis=axis,
        pc_index=pc_index,
        edges=tuple(float(e) for e in edges),
        counts=tuple(int(c) for c in counts),
        feature_indices=feature_indices,
        eigenvector=eigenvector,
        means=means,
    )


# --- point colors and overlay ---------------------------------------------------


def point_colors(
    matrix: ExpressionMatrix,
    samples: Sequence[str],
    selected_features: Sequence[int],
    cmax: float = DEFAULT_CMAX,
) -> tuple[tuple[int, int, int], ...]:
    """Color each sample by the mean of its selected feature values."""
    if len(selected_features) == 0:
        raise NoFeatureSelected("point coloring needs at least one selected feature")
    scale = DivergingScale(cmax)
    rows = matrix.values[np.ix_(matrix.sample_indices(samples), list(selected_features))]
    return tuple(scale.rgb(v) for v in rows.mean(axis=1))


@dataclass(frozen=True)
class OverlayLegend:
    legend: tuple[tuple[str, str], ...]  # (label, hex color), alphabetical
    label_by_sample: dict[str, str]
    color_by_sample: dict[str, str]


def overlay_labels(clinical: ClinicalTable, samples: Sequence[str]) -> OverlayLegend:
    """Categorical colors for prior labels; samples without one show "none"."""
    label_by_sample = {
        sid: (clinical.label_of(sid) or "none") for sid in samples
    }
    if all(clinical.label_of(sid) is None for sid in samples):
        raise NoLabels("no sample carries a prior label")
    labels = sorted(set(label_by_sample.values()))
    legend = tuple((label, palette_hex(i)) for i, label in enumerate(labels))
    color_of = dict(legend)
    return OverlayLegend(
        legend=legend,
        label_by_sample=label_by_sample,
        color_by_sample={sid: color_of[lab] for sid, lab in label_by_sample.items()},
    )


# --- labeling comparison ---------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LabelComparison:
    labels_a: tuple[str, ...]
    labels_b: tuple[str, ...]
    table: np.ndarray  # contingency counts, rows = labels_a
    ari: float


def _comb2(x: np.ndarray) -> np.ndarray:
    return x * (x - 1) / 2.0


def compare_labelings(assignment_a: Mapping[str, str], assignment_b: Mapping[str, str]) -> LabelComparison:
    """Contingency table plus the permutation-adjusted Rand index."""
    if set(assignment_a) != set(assignment_b):
        raise UniverseMismatch("labelings cover different sample sets")
    keys = sorted(assignment_a)
    labels_a = tuple(sorted(set(assignment_a.values())))
    labels_b = tuple(sorted(set(assignment_b.values())))
    pos_a = {lab: i for i, lab in enumerate(labels_a)}
    pos_b = {lab: i for i, lab in enumerate(labels_b)}
    table = np.zeros((len(labels_a), len(labels_b)), dtype=np.int64)
    for key in keys:
        table[pos_a[assignment_a[key]], pos_b[assignment_b[key]]] += 1

    n = float(table.sum())
    sum_cells = _comb2(table.astype(np.float64)).sum()
    sum_rows = _comb2(table.sum(axis=1).astype(np.float64)).sum()
    sum_cols = _comb2(table.sum(axis=0).astype(np.float64)).sum()
    total_pairs = n * (n - 1) / 2.0
    expected = sum_rows * sum_cols / total_pairs if total_pairs else 0.0
    maximum = 0.5 * (sum_rows + sum_cols)
    denom = maximum - expected
    ari = 1.0 if denom == 0.0 else (sum_cells - expected) / denom
    table.setflags(write=False)
    return LabelComparison(labels_a=labels_a, labels_b=labels_b, table=table, ari=float(ari))


# --- serialization -----------------------------------------------------------------


def hierarchy_record(layout: HierarchyLayout) -> dict:
    return {
        "n_samples": layout.n_samples,
        "nodes": [
            {
                "id": nd.id,
                "parent": nd.parent,
                "depth": nd.depth,
                "x0": nd.x0,
                "x1": nd.x1,
                "width": nd.width,
                "members_count": nd.members_count,
                "color": nd.color_index,
                "is_leaf": nd.is_leaf,
                "labels": list(nd.labels),
                "segments": [[c, a, b] for c, a, b in nd.segments],
            }
            for nd in layout.nodes
        ],
        "edges": [
            {"parent": e.parent, "child": e.child, "x0": e.x0, "x1": e.x1, "width": e.width}
            for e in layout.edges
        ],
    }


def heatmap_record(layout: HeatmapLayout, matrix: ExpressionMatrix) -> dict:
    feature_order = list(layout.feature_order)
    sample_order = list(layout.sample_order)
    values = matrix.values[np.ix_(sample_order, feature_order)].T
    return {
        "samples": [matrix.sample_ids[i] for i in sample_order],
        "features": [matrix.feature_names[i] for i in feature_order],
        "column_bands": [
            {
                "leaf": band.leaf_id,
                "color": band.color_index,
                "count": len(band.sample_indices),
            }
            for band in layout.column_bands
        ],
        "feature_bands": [
            {
                "split": band.split_node_id,
                "features": [matrix.feature_names[i] for i in band.feature_indices],
            }
            for band in layout.feature_bands
        ],
        "values": [[float(v) for v in row] for row in values],
    }


def binned_record(binned: BinnedHeatmap, matrix: ExpressionMatrix) -> dict:
    means = [
        [None if math.isnan(v) else float(v) for v in row]
        for row in binned.means
    ]
    return {
        "axis": binned.axis,
        "pc": binned.pc_index,
        "edges": list(binned.edges),
        "counts": list(binned.counts),
        "features": [matrix.feature_names[i] for i in binned.feature_indices],
        "eigenvector": list(binned.eigenvector),
        "means": means,
    }


def important_record(report) -> dict:
    return {
        "sigma_avg": report.sigma_avg,
        "mu_d": report.mu_d,
        "selected": list(report.selected_names()),
        "features": [
            {"feature": name, "mu_a": float(a), "mu_b": float(b), "d": float(dv)}
            for name, a, b, dv in zip(report.feature_names, report.mu_a, report.mu_b, report.d)
        ],
    }
