"""Single-session HTTP service exposing the full workflow.

One dataset and one partition tree live in process memory. Mutations (dataset
upload, split, prune, model import) are serialized under a lock and bump a
monotonic revision; split/prune/import requests must carry the revision they
were computed against and are rejected with 409 when stale.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, File, Form, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel

from . import __version__
from .colors import palette_hex
from .data import (
    ClinicalTable,
    ExpressionMatrix,
    parse_clinical,
    parse_expression,
    summarize,
    zscore_normalize,
)
from .errors import (
    NoDataset,
    NoLabels,
    StaleRevision,
    UnknownNode,
    UnresolvableFeature,
    WorkbenchError,
)
from .partition import (
    DividerLine,
    PartitionTree,
    document_to_json,
    import_model,
    tree_to_document,
)
from .pca import fit_pca, loadings, project
from .survival import cluster_survival_record, curves_for_clusters
from .viewmodel import (
    DEFAULT_BINS,
    DEFAULT_CMAX,
    binned_heatmap,
    binned_record,
    heatmap_overview,
    heatmap_record,
    hierarchy_layout,
    hierarchy_record,
    important_record,
    overlay_labels,
    point_colors,
)

_STATUS_FOR = {
    UnknownNode: 404,
    StaleRevision: 409,
    NoDataset: 400,
}


class LineBody(BaseModel):
    point: tuple[float, float]
    normal: tuple[float, float]


class SplitBody(BaseModel):
    pcx: int
    pcy: int
    features: list[str] | None = None
    line: LineBody
    revision: int


class PruneBody(BaseModel):
    revision: int


class ImportBody(BaseModel):
    document: dict
    revision: int


class ClassifyBody(BaseModel):
    features: list[str]
    rows: list[list[float]]


class Session:
    """Dataset + tree + per-(node, feature subset) PCA cache."""

    def __init__(self, matrix: ExpressionMatrix, clinical: ClinicalTable | None, normalized: bool):
        self.matrix = matrix
        self.clinical = clinical
        self.normalized = normalized
        self.tree = PartitionTree(matrix)
        self._bases: dict[tuple[str, tuple[int, ...]], object] = {}

    def basis_for(self, node_id: str, feature_idx: tuple[int, ...]):
        key = (node_id, feature_idx)
        basis = self._bases.get(key)
        if basis is None:
            node = self.tree.node(node_id)
            basis = fit_pca(self.matrix, self.matrix.sample_indices(node.members), feature_idx)
            self._bases[key] = basis
        return basis

    def drop_cached(self, node_ids) -> None:
        gone = set(node_ids)
        for key in [k for k in self._bases if k[0] in gone]:
            del self._bases[key]

    def reset_tree(self, tree: PartitionTree) -> None:
        self.tree = tree
        self._bases.clear()


@dataclass
class ServiceState:
    bins: int = DEFAULT_BINS
    cmax: float = DEFAULT_CMAX
    session: Session | None = None
    revision: int = 0
    lock: threading.RLock = field(default_factory=threading.RLock)

    def require_session(self) -> Session:
        if self.session is None:
            raise NoDataset("upload a dataset first (POST /dataset)")
        return self.session

    def check_revision(self, given: int) -> None:
        if given != self.revision:
            raise StaleRevision(
                f"request was computed against revision {given}, current is {self.revision}"
            )


def _parse_feature_list(matrix: ExpressionMatrix, features: str | list[str] | None) -> tuple[int, ...]:
    if features is None:
        return tuple(range(matrix.n_features))
    names = [f.strip() for f in features.split(",")] if isinstance(features, str) else list(features)
    names = [f for f in names if f]
    if not names:
        return tuple(range(matrix.n_features))
    idx = []
    for name in names:
        if not matrix.has_feature(name):
            raise UnresolvableFeature(f"unknown feature {name!r}")
        idx.append(matrix.feature_index(name))
    return tuple(idx)


def _with_hex(record: dict, key: str = "color") -> dict:
    record[key + "_hex"] = palette_hex(record[key])
    return record


def create_app(default_bins: int = DEFAULT_BINS, default_cmax: float = DEFAULT_CMAX) -> FastAPI:
    app = FastAPI(title="splitbench session service", version=__version__)
    state = ServiceState(bins=default_bins, cmax=default_cmax)
    app.state.service = state

    @app.exception_handler(WorkbenchError)
    def domain_error(_, exc: WorkbenchError):
        status = _STATUS_FOR.get(type(exc), 422)
        return JSONResponse(
            status_code=status,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.exception_handler(RequestValidationError)
    def malformed(_, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"error": "MalformedPayload", "detail": str(exc.errors())},
        )

    @app.post("/dataset")
    def upload_dataset(
        expression: UploadFile = File(...),
        clinical: UploadFile | None = File(None),
        orientation: str = Form("samples-as-rows"),
        zscore: bool = Form(False),
        impute_mean: bool = Form(False),
    ):
        with state.lock:
            text = expression.file.read().decode("utf-8")
            matrix = parse_expression(text, orientation=orientation, impute_mean=impute_mean)
            degenerate: tuple[str, ...] = ()
            if zscore:
                matrix, degenerate = zscore_normalize(matrix)
            table = None
            if clinical is not None:
                table = parse_clinical(clinical.file.read().decode("utf-8"), matrix)
            state.session = Session(matrix, table, zscore)
            state.revision += 1
            summary = summarize(matrix, table, normalization_applied=zscore)
            return {
                "revision": state.revision,
                "n_samples": summary.n_samples,
                "n_features": summary.n_features,
                "label_histogram": summary.label_histogram,
                "normalization_applied": summary.normalization_applied,
                "degenerate_features": list(degenerate),
            }

    @app.get("/tree")
    def get_tree():
        with state.lock:
            session = state.require_session()
            record = hierarchy_record(hierarchy_layout(session.tree))
            for node in record["nodes"]:
                _with_hex(node)
            record["revision"] = state.revision
            return record

    @app.get("/heatmap")
    def get_heatmap():
        with state.lock:
            session = state.require_session()
            record = heatmap_record(heatmap_overview(session.tree, session.matrix), session.matrix)
            for band in record["column_bands"]:
                _with_hex(band)
            record["cmax"] = state.cmax
            record["revision"] = state.revision
            return record

    @app.get("/survival")
    def get_survival():
        with state.lock:
            session = state.require_session()
            if session.clinical is None:
                raise NoLabels("no clinical table loaded")
            record = cluster_survival_record(curves_for_clusters(session.tree, session.clinical))
            for curve in record["curves"]:
                _with_hex(curve)
            record["revision"] = state.revision
            return record

    @app.get("/nodes/{node_id}/projection")
    def get_projection(
        node_id: str,
        pcx: int = 0,
        pcy: int = 1,
        features: str | None = None,
        bins: int | None = None,
        color_features: str | None = None,
    ):
        with state.lock:
            session = state.require_session()
            matrix = session.matrix
            node = session.tree.node(node_id)
            feature_idx = _parse_feature_list(matrix, features)
            basis = session.basis_for(node_id, feature_idx)
            proj = project(basis, matrix, matrix.sample_indices(node.members), pcx, pcy)
            n_bins = bins if bins is not None else state.bins
            load = loadings(basis, pcx, pcy)
            record = {
                "revision": state.revision,
                "node": node_id,
                "pc_x": pcx,
                "pc_y": pcy,
                "n_components": basis.n_components,
                "explained_variance": [float(v) for v in basis.variances],
                "samples": list(proj.sample_ids),
                "coords": [[float(x), float(y)] for x, y in proj.coords],
                "bins_x": binned_record(binned_heatmap(proj, matrix, basis, "x", n_bins), matrix),
                "bins_y": binned_record(binned_heatmap(proj, matrix, basis, "y", n_bins), matrix),
                "loadings": {
                    "features": [matrix.feature_names[i] for i in load.feature_indices],
                    "vectors": [[float(x), float(y)] for x, y in load.vectors],
                    "raw_x": [float(v) for v in load.raw_x],
                    "raw_y": [float(v) for v in load.raw_y],
                },
                "cmax": state.cmax,
            }
            if color_features is not None:
                selected = _parse_feature_list(matrix, color_features)
                rows = matrix.values[np.ix_(matrix.sample_indices(proj.sample_ids), list(selected))]
                record["color_values"] = [float(v) for v in rows.mean(axis=1)]
                record["colors"] = [
                    "#%02x%02x%02x" % rgb
                    for rgb in point_colors(matrix, proj.sample_ids, list(selected), cmax=state.cmax)
                ]
            return record

    @app.post("/nodes/{node_id}/split")
    def post_split(node_id: str, body: SplitBody):
        with state.lock:
            session = state.require_session()
            state.check_revision(body.revision)
            feature_idx = _parse_feature_list(session.matrix, body.features)
            basis = session.basis_for(node_id, feature_idx)
            line = DividerLine.from_vector(body.line.point, body.line.normal)
            pos, neg = session.tree.apply_split(node_id, basis, body.pcx, body.pcy, line)
            state.revision += 1
            return {
                "revision": state.revision,
                "positive": pos.id,
                "negative": neg.id,
                "important": important_record(session.tree.node(node_id).important),
            }

    @app.delete("/nodes/{node_id}/children")
    def delete_children(node_id: str, body: PruneBody):
        with state.lock:
            session = state.require_session()
            state.check_revision(body.revision)
            removed = session.tree.prune(node_id)
            session.drop_cached(removed)
            state.revision += 1
            return {
                "revision": state.revision,
                "node": node_id,
                "removed": removed,
                "leaves": [leaf.id for leaf in session.tree.leaves()],
            }

    @app.get("/overlay")
    def get_overlay():
        with state.lock:
            session = state.require_session()
            if session.clinical is None:
                raise NoLabels("no clinical table loaded")
            legend = overlay_labels(session.clinical, session.matrix.sample_ids)
            return {
                "revision": state.revision,
                "legend": [{"label": lab, "color": color} for lab, color in legend.legend],
                "labels": legend.label_by_sample,
                "colors": legend.color_by_sample,
            }

    @app.post("/classify")
    def post_classify(body: ClassifyBody):
        with state.lock:
            session = state.require_session()
            matrix = session.matrix
            known = [(j, matrix.feature_index(name)) for j, name in enumerate(body.features) if matrix.has_feature(name)]
            leaves = []
            for row in body.rows:
                aligned = np.full(matrix.n_features, np.nan)
                for j, idx in known:
                    aligned[idx] = row[j]
                leaves.append(session.tree.classify_row(aligned))
            return {"revision": state.revision, "leaves": leaves}

    @app.get("/model/export")
    def export_document():
        with state.lock:
            session = state.require_session()
            text = document_to_json(tree_to_document(session.tree))
            return Response(content=text, media_type="application/json")

    @app.post("/model/import")
    def import_document(body: ImportBody):
        with state.lock:
            session = state.require_session()
            state.check_revision(body.revision)
            tree = import_model(body.document, session.matrix)
            session.reset_tree(tree)
            state.revision += 1
            return {"revision": state.revision}

    return app
