"""Binary partition tree: divider-line splits, per-split important features,
classification, pruning, and the versioned model document.

Node ids are deterministic creation-order tokens ("n0" root, then "n1", "n2"
for the first split's positive/negative children), so scripted sessions can
address nodes stably. Color slots come from the fixed 12-color palette,
assigned in split-creation order and released on prune.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .colors import PALETTE_SIZE
from .data import ExpressionMatrix
from .errors import (
    EmptyCluster,
    EmptyDataset,
    EmptySide,
    InvalidLine,
    MissingFeature,
    NotALeaf,
    NotInternal,
    SchemaVersionMismatch,
    TooFewMembers,
    UnknownNode,
    UnresolvableFeature,
)
from .pca import PcaBasis

SCHEMA_VERSION = "vis-split-model/1"


@dataclass(frozen=True)
class DividerLine:
    """A line in a PC plane given by an anchor point and a unit normal.

    Samples whose signed distance (proj - point) . normal is >= 0 fall on the
    positive side; exact zeros go positive so the rule is total.
    """

    point: tuple[float, float]
    normal: tuple[float, float]

    def __post_init__(self):
        nx, ny = self.normal
        norm = math.hypot(nx, ny)
        if not math.isfinite(norm) or abs(norm - 1.0) > 1e-12:
            raise InvalidLine(f"normal must be a unit vector, got norm {norm!r}")

    @classmethod
    def from_vector(cls, point: Sequence[float], normal: Sequence[float]) -> "DividerLine":
        """Build a line from an arbitrary (non-zero) normal, normalizing it."""
        nx, ny = float(normal[0]), float(normal[1])
        norm = math.hypot(nx, ny)
        if norm == 0.0 or not math.isfinite(norm):
            raise InvalidLine("normal must be non-zero and finite")
        return cls(point=(float(point[0]), float(point[1])), normal=(nx / norm, ny / norm))


@dataclass(frozen=True, eq=False)
class ImportantFeatureReport:
    """Per-feature cluster means and the selected-feature threshold outcome.

    d[i] = mu_a[i] - mu_b[i] (signed); mu_d is the mean of all d; sigma_avg is
    the population standard deviation of the d values; a feature is selected
    when |d[i]| >= sigma_avg. A degenerate sigma_avg of 0 selects nothing.
    """

    feature_names: tuple[str, ...]
    mu_a: np.ndarray
    mu_b: np.ndarray
    d: np.ndarray
    mu_d: float
    sigma_avg: float
    selected: tuple[int, ...]

    def selected_names(self) -> tuple[str, ...]:
        return tuple(self.feature_names[i] for i in self.selected)


@dataclass(frozen=True, eq=False)
class SplitRule:
    """Frozen geometry of one split: the 2D plane plus the divider line.

    Only the two components actually used are kept; that is all classification
    needs and it is exactly what the model document stores.
    """

    feature_subset: tuple[int, ...]
    mean: np.ndarray
    component_x: np.ndarray
    component_y: np.ndarray
    pc_x: int
    pc_y: int
    line: DividerLine
    positive_child: str
    negative_child: str


@dataclass
class PartitionNode:
    id: str
    members: tuple[str, ...]  # dataset order
    color_index: int
    parent: str | None = None
    rule: SplitRule | None = None
    important: ImportantFeatureReport | None = None
    split_seq: int | None = None

    @property
    def is_leaf(self) -> bool:
        return self.rule is None


def select_important(mu_a: np.ndarray, mu_b: np.ndarray) -> tuple[np.ndarray, float, float, tuple[int, ...]]:
    """Threshold machinery shared by live splits and imported reports.

    Returns (d, mu_d, sigma_avg, selected indices).
    """
    d = np.asarray(mu_a, dtype=np.float64) - np.asarray(mu_b, dtype=np.float64)
    mu_d = float(d.mean())
    sigma_avg = float(np.sqrt(((d - mu_d) ** 2).mean()))
    if sigma_avg > 0.0:
        selected = tuple(int(i) for i in np.flatnonzero(np.abs(d) >= sigma_avg))
    else:
        selected = ()
    return d, mu_d, sigma_avg, selected


def important_features(
    matrix: ExpressionMatrix,
    members_a: Iterable[str],
    members_b: Iterable[str],
) -> ImportantFeatureReport:
    """Compare two clusters over ALL dataset features, not a PCA subset."""
    idx_a = matrix.sample_indices(members_a)
    idx_b = matrix.sample_indices(members_b)
    if not idx_a or not idx_b:
        raise EmptyCluster("both clusters must be nonempty")
    mu_a = matrix.values[idx_a].mean(axis=0)
    mu_b = matrix.values[idx_b].mean(axis=0)
    d, mu_d, sigma_avg, selected = select_important(mu_a, mu_b)
    mu_a.setflags(write=False)
    mu_b.setflags(write=False)
    d.setflags(write=False)
    return ImportantFeatureReport(
        feature_names=matrix.feature_names,
        mu_a=mu_a,
        mu_b=mu_b,
        d=d,
        mu_d=mu_d,
        sigma_avg=sigma_avg,
        selected=selected,
    )


def _plane_point(rule_mean, comp_x, comp_y, row_subset) -> tuple[float, float]:
    centered = row_subset - rule_mean
    return float(np.dot(centered, comp_x)), float(np.dot(centered, comp_y))


def _positive_side(rule: SplitRule, row_subset: np.ndarray) -> bool:
    # single shared code path for split assignment and classification, so the
    # two can never disagree on boundary points
    x, y = _plane_point(rule.mean, rule.component_x, rule.component_y, row_subset)
    px, py = rule.line.point
    nx, ny = rule.line.normal
    return (x - px) * nx + (y - py) * ny >= 0.0


class PartitionTree:
    """Mutable session tree over one immutable dataset.

    Mutations (split/prune) must be externally serialized; reads are safe
    between mutations.
    """

    def __init__(self, matrix: ExpressionMatrix):
        if matrix.n_samples == 0:
            raise EmptyDataset("cannot build a partition tree over zero samples")
        self.matrix = matrix
        self.nodes: dict[str, PartitionNode] = {}
        self._id_counter = 0
        self._split_counter = 0
        self._color_use = [0] * PALETTE_SIZE
        root = PartitionNode(
            id=self._next_id(),
            members=tuple(matrix.sample_ids),
            color_index=self._allocate_color(),
        )
        self.nodes[root.id] = root
        self.root_id = root.id

    # --- bookkeeping ---------------------------------------------------

    def _next_id(self) -> str:
        token = f"n{self._id_counter}"
        self._id_counter += 1
        return token

    def _allocate_color(self) -> int:
        # least-used slot, lowest index on ties: fills 0..11 first, then reuses
        slot = min(range(PALETTE_SIZE), key=lambda i: (self._color_use[i], i))
        self._color_use[slot] += 1
        return slot

    def _release_color(self, slot: int) -> None:
        if self._color_use[slot] > 0:
            self._color_use[slot] -= 1

    def node(self, node_id: str) -> PartitionNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownNode(f"no node {node_id!r} in the tree") from None

    @property
    def root(self) -> PartitionNode:
        return self.nodes[self.root_id]

    def leaves(self) -> list[PartitionNode]:
        """Leaves in in-order traversal (positive subtree first)."""
        out: list[PartitionNode] = []

        def walk(node: PartitionNode) -> None:
            if node.is_leaf:
                out.append(node)
                return
            walk(self.nodes[node.rule.positive_child])
            walk(self.nodes[node.rule.negative_child])

        walk(self.root)
        return out

    def internal_nodes_by_creation(self) -> list[PartitionNode]:
        internal = [n for n in self.nodes.values() if not n.is_leaf]
        internal.sort(key=lambda n: n.split_seq)
        return internal

    def leaf_assignment(self) -> dict[str, str]:
        return {sid: leaf.id for leaf in self.leaves() for sid in leaf.members}

    def depth_of(self, node_id: str) -> int:
        depth = 0
        node = self.node(node_id)
        while node.parent is not None:
            node = self.nodes[node.parent]
            depth += 1
        return depth

    # --- mutations -------------------------------------------------------

    def apply_split(
        self,
        node_id: str,
        basis: PcaBasis,
        pc_x: int,
        pc_y: int,
        line: DividerLine,
    ) -> tuple[PartitionNode, PartitionNode]:
        """Split a leaf with a divider line drawn in the given PC plane.

        Membership: positive side iff (projection - line.point) . line.normal
        is >= 0, zeros included. The important-feature report is computed over
        all dataset features even when the basis used a subset.
        """
        node = self.node(node_id)
        if not node.is_leaf:
            raise NotALeaf(f"node {node_id} already has children")
        if len(node.members) < 3:
            raise TooFewMembers(f"node {node_id} has {len(node.members)} members; need at least 3")
        basis.check_axes(pc_x, pc_y)

        rule = SplitRule(
            feature_subset=basis.feature_subset,
            mean=basis.mean,
            component_x=basis.components[pc_x],
            component_y=basis.components[pc_y],
            pc_x=pc_x,
            pc_y=pc_y,
            line=line,
            positive_child="",
            negative_child="",
        )
        subset = list(basis.feature_subset)
        positive: list[str] = []
        negative: list[str] = []
        for sid in node.members:
            row = self.matrix.values[self.matrix.sample_index(sid), subset]
            (positive if _positive_side(rule, row) else negative).append(sid)
        if not positive or not negative:
            raise EmptySide("divider line leaves one side empty")

        report = important_features(self.matrix, positive, negative)

        pos_id = self._next_id()
        neg_id = self._next_id()
        pos = PartitionNode(pos_id, tuple(positive), self._allocate_color(), parent=node.id)
        neg = PartitionNode(neg_id, tuple(negative), self._allocate_color(), parent=node.id)
        self.nodes[pos_id] = pos
        self.nodes[neg_id] = neg

        node.rule = SplitRule(
            feature_subset=rule.feature_subset,
            mean=rule.mean,
            component_x=rule.component_x,
            component_y=rule.component_y,
            pc_x=pc_x,
            pc_y=pc_y,
            line=line,
            positive_child=pos_id,
            negative_child=neg_id,
        )
        node.important = report
        node.split_seq = self._split_counter
        self._split_counter += 1
        return pos, neg

    def prune(self, node_id: str) -> list[str]:
        """Collapse an internal node back to a leaf; returns removed node ids."""
        node = self.node(node_id)
        if node.is_leaf:
            raise NotInternal(f"node {node_id} is a leaf; nothing to prune")
        removed: list[str] = []

        def collect(nid: str) -> None:
            child = self.nodes[nid]
            if not child.is_leaf:
                collect(child.rule.positive_child)
                collect(child.rule.negative_child)
            removed.append(nid)

        collect(node.rule.positive_child)
        collect(node.rule.negative_child)
        for nid in removed:
            self._release_color(self.nodes[nid].color_index)
            del self.nodes[nid]
        node.rule = None
        node.important = None
        node.split_seq = None
        return removed

    # --- classification ---------------------------------------------------

    def classify_row(self, row: np.ndarray) -> str:
        """Route one sample (full feature vector, dataset order) to a leaf."""
        row = np.asarray(row, dtype=np.float64)
        node = self.root
        while not node.is_leaf:
            rule = node.rule
            subset = list(rule.feature_subset)
            values = row[subset]
            if not np.isfinite(values).all():
                bad = subset[int(np.flatnonzero(~np.isfinite(values))[0])]
                raise MissingFeature(
                    f"row lacks a finite value for feature {self.matrix.feature_names[bad]!r}"
                )
            node = self.nodes[rule.positive_child if _positive_side(rule, values) else rule.negative_child]
        return node.id

    def classify_sample(self, sample_id: str) -> str:
        return self.classify_row(self.matrix.values[self.matrix.sample_index(sample_id)])


def create_root(matrix: ExpressionMatrix) -> PartitionTree:
    """Fresh single-leaf tree holding every sample."""
    return PartitionTree(matrix)


# --- model document ---------------------------------------------------------


def _floats(array) -> list[float]:
    return [float(v) for v in array]


def tree_to_document(tree: PartitionTree) -> dict:
    """Serializable model document (schema vis-split-model/1).

    Member id lists are intentionally omitted: a model must classify from its
    rules alone.
    """
    nodes = []
    for node in tree.nodes.values():
        entry: dict = {
            "id": node.id,
            "parent": node.parent,
            "color": node.color_index,
            "members_count": len(node.members),
        }
        if node.rule is not None:
            rule = node.rule
            entry["rule"] = {
                "feature_subset": list(rule.feature_subset),
                "mean": _floats(rule.mean),
                "comp_x": _floats(rule.component_x),
                "comp_y": _floats(rule.component_y),
                "pc_x": rule.pc_x,
                "pc_y": rule.pc_y,
                "line": {"point": list(rule.line.point), "normal": list(rule.line.normal)},
                "positive_child": rule.positive_child,
                "negative_child": rule.negative_child,
            }
        if node.important is not None:
            report = node.important
            entry["important"] = [
                {"feature": name, "mu_a": float(a), "mu_b": float(b)}
                for name, a, b in zip(report.feature_names, report.mu_a, report.mu_b)
            ]
            entry["sigma_avg"] = report.sigma_avg
        nodes.append(entry)
    return {
        "version": SCHEMA_VERSION,
        "features": list(tree.matrix.feature_names),
        "nodes": nodes,
    }


def document_to_json(document: dict) -> str:
    """Canonical byte form of a model document (used for parity checks)."""
    return json.dumps(document, indent=2, sort_keys=False) + "\n"


def export_model(tree: PartitionTree) -> str:
    return document_to_json(tree_to_document(tree))


def document_to_tree(document: dict, matrix: ExpressionMatrix) -> PartitionTree:
    """Rebuild a tree from a model document against a (possibly new) matrix.

    Rules are re-indexed by feature NAME, so column order may differ from the
    exporting dataset. Member sets are recomputed by routing every matrix
    sample through the rules.
    """
    if not isinstance(document, dict) or document.get("version") != SCHEMA_VERSION:
        raise SchemaVersionMismatch(
            f"unsupported model schema {document.get('version') if isinstance(document, dict) else document!r}"
        )
    try:
        return _build_tree(document, matrix)
    except (KeyError, TypeError, IndexError) as exc:
        raise SchemaVersionMismatch(f"malformed model document: {exc!r}") from None


def _build_tree(document: dict, matrix: ExpressionMatrix) -> PartitionTree:
    doc_features = list(document.get("features", []))
    entries = {entry["id"]: entry for entry in document.get("nodes", [])}
    roots = [e for e in entries.values() if e.get("parent") is None]
    if len(roots) != 1:
        raise SchemaVersionMismatch(f"document must contain exactly one root node, found {len(roots)}")

    tree = PartitionTree.__new__(PartitionTree)
    tree.matrix = matrix
    tree.nodes = {}
    tree._color_use = [0] * PALETTE_SIZE
    tree.root_id = roots[0]["id"]

    # first pass: nodes and reports; document order == creation order
    children_of: dict[str, list[str]] = {}
    for entry in entries.values():
        node = PartitionNode(
            id=entry["id"],
            members=(),
            color_index=int(entry["color"]),
            parent=entry.get("parent"),
        )
        tree._color_use[node.color_index % PALETTE_SIZE] += 1
        if node.parent is not None:
            children_of.setdefault(node.parent, []).append(node.id)
        important_doc = entry.get("important")
        if important_doc is not None:
            node.important = _report_from_document(important_doc, entry.get("sigma_avg", 0.0))
        tree.nodes[node.id] = node

    # second pass: rules; explicit child pointers win, otherwise children are
    # inferred from parent links in document order (positive child first)
    split_order = 0
    for entry in entries.values():
        rule_doc = entry.get("rule")
        if rule_doc is None:
            continue
        node = tree.nodes[entry["id"]]
        pos = rule_doc.get("positive_child")
        neg = rule_doc.get("negative_child")
        if pos is None or neg is None:
            linked = children_of.get(node.id, [])
            if len(linked) != 2:
                raise SchemaVersionMismatch(
                    f"cannot infer children of {node.id!r}: found {len(linked)} parent links"
                )
            pos, neg = linked
        for child_id in (pos, neg):
            if child_id not in tree.nodes:
                raise SchemaVersionMismatch(f"rule references missing node {child_id!r}")
        node.rule = _rule_from_document(rule_doc, doc_features, matrix, node.id, pos, neg)
        node.split_seq = split_order
        split_order += 1

    tree._split_counter = split_order
    tree._id_counter = _restore_id_counter(tree.nodes)
    _recompute_members(tree)
    return tree


def _rule_from_document(
    rule_doc: dict,
    doc_features: list[str],
    matrix: ExpressionMatrix,
    node_id: str,
    positive_child: str,
    negative_child: str,
) -> SplitRule:
    subset = [_resolve_one(doc_features, matrix, j) for j in rule_doc["feature_subset"]]
    mean = np.asarray(rule_doc["mean"], dtype=np.float64)
    comp_x = np.asarray(rule_doc["comp_x"], dtype=np.float64)
    comp_y = np.asarray(rule_doc["comp_y"], dtype=np.float64)
    if not (len(subset) == mean.size == comp_x.size == comp_y.size):
        raise SchemaVersionMismatch(f"rule arrays of node {node_id!r} disagree on feature count")
    return SplitRule(
        feature_subset=tuple(subset),
        mean=mean,
        component_x=comp_x,
        component_y=comp_y,
        pc_x=int(rule_doc["pc_x"]),
        pc_y=int(rule_doc["pc_y"]),
        line=DividerLine(
            point=tuple(float(v) for v in rule_doc["line"]["point"]),
            normal=tuple(float(v) for v in rule_doc["line"]["normal"]),
        ),
        positive_child=positive_child,
        negative_child=negative_child,
    )


def _report_from_document(important_doc: list, sigma_avg_raw) -> ImportantFeatureReport:
    names = tuple(item["feature"] for item in important_doc)
    mu_a = np.asarray([item["mu_a"] for item in important_doc], dtype=np.float64)
    mu_b = np.asarray([item["mu_b"] for item in important_doc], dtype=np.float64)
    d, mu_d, _, _ = select_important(mu_a, mu_b)
    sigma_avg = float(sigma_avg_raw)
    if sigma_avg > 0.0:
        selected = tuple(int(i) for i in np.flatnonzero(np.abs(d) >= sigma_avg))
    else:
        selected = ()
    return ImportantFeatureReport(
        feature_names=names,
        mu_a=mu_a,
        mu_b=mu_b,
        d=d,
        mu_d=mu_d,
        sigma_avg=sigma_avg,
        selected=selected,
    )


def _resolve_one(doc_features: list[str], matrix: ExpressionMatrix, j) -> int:
    if not isinstance(j, int) or not (0 <= j < len(doc_features)):
        raise SchemaVersionMismatch(f"feature_subset index {j!r} out of range")
    name = doc_features[j]
    if not matrix.has_feature(name):
        raise UnresolvableFeature(f"model feature {name!r} not present in the matrix")
    return matrix.feature_index(name)


def _restore_id_counter(nodes: Mapping[str, PartitionNode]) -> int:
    best = len(nodes)
    for node_id in nodes:
        if node_id.startswith("n") and node_id[1:].isdigit():
            best = max(best, int(node_id[1:]) + 1)
    return best


def _recompute_members(tree: PartitionTree) -> None:
    buckets: dict[str, list[str]] = {nid: [] for nid in tree.nodes}
    for sid in tree.matrix.sample_ids:
        row = tree.matrix.values[tree.matrix.sample_index(sid)]
        node = tree.root
        buckets[node.id].append(sid)
        while not node.is_leaf:
            rule = node.rule
            values = row[list(rule.feature_subset)]
            node = tree.nodes[rule.positive_child if _positive_side(rule, values) else rule.negative_child]
            buckets[node.id].append(sid)
    for nid, members in buckets.items():
        tree.nodes[nid].members = tuple(members)


def import_model(document_or_json, matrix: ExpressionMatrix) -> PartitionTree:
    """Accepts a parsed document or its JSON text."""
    if isinstance(document_or_json, str):
        document = json.loads(document_or_json)
    else:
        document = document_or_json
    return document_to_tree(document, matrix)
