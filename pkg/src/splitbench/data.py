"""Ingestion and normalization of expression matrices and clinical metadata.

File conventions: delimiter-separated text (tab or comma, auto-detected from
the first line), UTF-8, first row and first column are identifiers. The
expression body must be numeric; empty cells and NA markers count as missing
and are fatal unless mean-imputation is requested.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DuplicateId,
    NegativeTime,
    NonFinite,
    ParseError,
    RaggedRow,
    UnknownSample,
)

ORIENT_SAMPLES = "samples-as-rows"
ORIENT_FEATURES = "features-as-rows"
ORIENTATIONS = (ORIENT_SAMPLES, ORIENT_FEATURES)

_MISSING_MARKERS = {"", "NA", "NAN", "NULL", "N/A"}


@dataclass(frozen=True, eq=False)
class ExpressionMatrix:
    """Dense samples x features matrix with identifier bookkeeping.

    Immutable after construction; the value buffer is marked read-only so the
    instance can be shared freely across threads.
    """

    sample_ids: tuple[str, ...]
    feature_names: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape != (len(self.sample_ids), len(self.feature_names)):
            raise ValueError(
                f"values shape {values.shape} does not match "
                f"{len(self.sample_ids)} samples x {len(self.feature_names)} features"
            )
        _check_unique(self.sample_ids, "sample id")
        _check_unique(self.feature_names, "feature name")
        if values.size and not np.isfinite(values).all():
            s, f = np.argwhere(~np.isfinite(values))[0]
            raise NonFinite(
                f"non-finite value for sample {self.sample_ids[s]!r}, "
                f"feature {self.feature_names[f]!r}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "_sample_pos", {s: i for i, s in enumerate(self.sample_ids)})
        object.__setattr__(self, "_feature_pos", {f: i for i, f in enumerate(self.feature_names)})

    @property
    def n_samples(self) -> int:
        return len(self.sample_ids)

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def sample_index(self, sample_id: str) -> int:
        try:
            return self._sample_pos[sample_id]
        except KeyError:
            raise UnknownSample(f"unknown sample id {sample_id!r}") from None

    def feature_index(self, name: str) -> int:
        try:
            return self._feature_pos[name]
        except KeyError:
            raise KeyError(f"unknown feature name {name!r}") from None

    def sample_indices(self, ids) -> list[int]:
        return [self.sample_index(s) for s in ids]

    def feature_indices(self, names) -> list[int]:
        return [self.feature_index(f) for f in names]

    def has_feature(self, name: str) -> bool:
        return name in self._feature_pos


@dataclass(frozen=True)
class ClinicalRecord:
    time_days: float
    event: bool
    label: str | None = None


@dataclass(frozen=True)
class ClinicalTable:
    """Per-sample survival metadata, keyed by sample id.

    Samples absent from the table have missing-clinical status: they are
    excluded from survival analysis but never from clustering.
    """

    records: dict[str, ClinicalRecord]

    def has(self, sample_id: str) -> bool:
        return sample_id in self.records

    def get(self, sample_id: str) -> ClinicalRecord | None:
        return self.records.get(sample_id)

    def label_of(self, sample_id: str) -> str | None:
        rec = self.records.get(sample_id)
        return rec.label if rec is not None else None

    @property
    def any_labels(self) -> bool:
        return any(rec.label is not None for rec in self.records.values())


@dataclass(frozen=True)
class DatasetSummary:
    n_samples: int
    n_features: int
    label_histogram: dict[str, int]
    normalization_applied: bool


def _check_unique(names, kind: str) -> None:
    seen = set()
    for name in names:
        if name in seen:
            raise DuplicateId(f"duplicate {kind} {name!r}")
        seen.add(name)


def _detect_delimiter(first_line: str) -> str:
    return "\t" if "\t" in first_line else ","


def _read_rows(text: str) -> list[list[str]]:
    delim = _detect_delimiter(text.splitlines()[0] if text else "")
    rows = [row for row in csv.reader(io.StringIO(text), delimiter=delim)]
    # drop fully empty trailing rows (editors often add one)
    while rows and all(cell.strip() == "" for cell in rows[-1]):
        rows.pop()
    return rows


def _parse_cell(text: str, line_no: int, col_no: int) -> float:
    stripped = text.strip()
    if stripped.upper() in _MISSING_MARKERS:
        return math.nan
    try:
        return float(stripped)
    except ValueError:
        raise ParseError(
            f"non-numeric cell {text!r} at row {line_no}, column {col_no}"
        ) from None


def parse_expression(
    text: str,
    orientation: str = ORIENT_SAMPLES,
    impute_mean: bool = False,
) -> ExpressionMatrix:
    """Parse delimiter-separated expression text into a canonical matrix."""
    if orientation not in ORIENTATIONS:
        raise ValueError(f"orientation must be one of {ORIENTATIONS}, got {orientation!r}")
    rows = _read_rows(text)
    if not rows:
        raise ParseError("empty file")
    header, body = rows[0], rows[1:]

    width = len(body[0]) if body else len(header) + 1
    if len(header) == width - 1:
        col_ids = [h.strip() for h in header]  # no corner cell
    elif len(header) == width:
        col_ids = [h.strip() for h in header[1:]]
    else:
        raise RaggedRow(f"header has {len(header)} cells, data rows have {width}")

    row_ids: list[str] = []
    values = np.empty((len(body), len(col_ids)), dtype=np.float64)
    for r, row in enumerate(body):
        if len(row) != width:
            raise RaggedRow(f"row {r + 2} has {len(row)} cells, expected {width}")
        row_ids.append(row[0].strip())
        for c, cell in enumerate(row[1:]):
            values[r, c] = _parse_cell(cell, line_no=r + 2, col_no=c + 2)

    if orientation == ORIENT_SAMPLES:
        sample_ids, feature_names = row_ids, col_ids
    else:
        sample_ids, feature_names = col_ids, row_ids
        values = values.T.copy()

    _check_unique(sample_ids, "sample id")
    _check_unique(feature_names, "feature name")

    if not np.isfinite(values).all():
        if impute_mean:
            values = _impute_feature_means(values, feature_names)
        else:
            s, f = np.argwhere(~np.isfinite(values))[0]
            raise NonFinite(
                f"missing/non-finite value for sample {sample_ids[s]!r}, "
                f"feature {feature_names[f]!r} (pass impute_mean to substitute feature means)"
            )

    return ExpressionMatrix(tuple(sample_ids), tuple(feature_names), values)


def _impute_feature_means(values: np.ndarray, feature_names) -> np.ndarray:
    values = values.copy()
    for f in range(values.shape[1]):
        col = values[:, f]
        bad = ~np.isfinite(col)
        if not bad.any():
            continue
        good = col[~bad]
        if good.size == 0:
            raise NonFinite(f"feature {feature_names[f]!r} has no finite values to impute from")
        col[bad] = good.mean()
    return values


def load_expression(
    path,
    orientation: str = ORIENT_SAMPLES,
    impute_mean: bool = False,
) -> ExpressionMatrix:
    """Load an expression file; see module docstring for the format."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_expression(fh.read(), orientation=orientation, impute_mean=impute_mean)


def write_expression(matrix: ExpressionMatrix, path) -> None:
    """Write the canonical tab-separated form; floats round-trip bit-exactly."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter="\t", lineterminator="\n")
        writer.writerow([""] + list(matrix.feature_names))
        for i, sid in enumerate(matrix.sample_ids):
            writer.writerow([sid] + [repr(float(v)) for v in matrix.values[i]])


def parse_clinical(text: str, matrix: ExpressionMatrix) -> ClinicalTable:
    """Parse clinical rows (sample_id, time_days, event, optional label)."""
    rows = _read_rows(text)
    if not rows:
        raise ParseError("empty clinical file")
    header = [h.strip() for h in rows[0]]
    try:
        id_col = header.index("sample_id")
        time_col = header.index("time_days")
        event_col = header.index("event")
    except ValueError as exc:
        raise ParseError(f"clinical header must contain sample_id, time_days, event: {exc}") from None
    label_col = header.index("label") if "label" in header else None

    records: dict[str, ClinicalRecord] = {}
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise RaggedRow(f"clinical row {r} has {len(row)} cells, expected {len(header)}")
        sid = row[id_col].strip()
        if sid not in matrix.sample_ids:
            raise UnknownSample(f"clinical row {r}: sample {sid!r} not in expression matrix")
        if sid in records:
            raise DuplicateId(f"clinical row {r}: duplicate sample id {sid!r}")
        time_days = _parse_cell(row[time_col], line_no=r, col_no=time_col + 1)
        if not math.isfinite(time_days):
            raise ParseError(f"clinical row {r}: missing survival time for {sid!r}")
        if time_days < 0:
            raise NegativeTime(f"clinical row {r}: negative survival time {time_days} for {sid!r}")
        event_text = row[event_col].strip()
        if event_text not in ("0", "1"):
            raise ParseError(f"clinical row {r}: event must be 0 or 1, got {event_text!r}")
        label = None
        if label_col is not None:
            raw = row[label_col].strip()
            label = raw if raw else None
        records[sid] = ClinicalRecord(time_days=time_days, event=event_text == "1", label=label)
    return ClinicalTable(records)


def load_clinical(path, matrix: ExpressionMatrix) -> ClinicalTable:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_clinical(fh.read(), matrix)


def zscore_normalize(matrix: ExpressionMatrix) -> tuple[ExpressionMatrix, tuple[str, ...]]:
    """Center each feature to mean 0 and scale to population std 1.

    Zero-variance features map to all-zeros and are returned as the warning
    list instead of failing.
    """
    means = matrix.values.mean(axis=0)
    stds = matrix.values.std(axis=0)  # population form, ddof=0
    degenerate = stds == 0.0
    safe_stds = np.where(degenerate, 1.0, stds)
    out = (matrix.values - means) / safe_stds
    out[:, degenerate] = 0.0
    warned = tuple(name for name, bad in zip(matrix.feature_names, degenerate) if bad)
    return ExpressionMatrix(matrix.sample_ids, matrix.feature_names, out), warned


def summarize(
    matrix: ExpressionMatrix,
    clinical: ClinicalTable | None = None,
    normalization_applied: bool = False,
) -> DatasetSummary:
    """Dataset card: dimensions plus a prior-label histogram ("none" bucket
    collects samples without a label or without a clinical row)."""
    histogram: dict[str, int] = {}
    for sid in matrix.sample_ids:
        label = clinical.label_of(sid) if clinical is not None else None
        key = label if label is not None else "none"
        histogram[key] = histogram.get(key, 0) + 1
    return DatasetSummary(
        n_samples=matrix.n_samples,
        n_features=matrix.n_features,
        label_histogram=histogram,
        normalization_applied=normalization_applied,
    )
