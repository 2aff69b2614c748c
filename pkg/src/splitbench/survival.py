"""Product-limit (Kaplan-Meier) survival estimation per cluster.

Right-censoring convention: a censored subject leaves the risk set after its
censoring time, and ties between events and censorings at the same timestamp
process the events first (the censored subjects are still at risk then).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .data import ClinicalTable
from .errors import EmptyInput, NegativeTime, NoClinicalData

BASELINE = "BASELINE"


@dataclass(frozen=True)
class SurvivalCurve:
    """Non-increasing step function; drops happen only at event times."""

    cluster_id: str
    n_at_risk_initial: int
    steps: tuple[tuple[float, float], ...]

    @property
    def final_probability(self) -> float:
        return self.steps[-1][1]


@dataclass(frozen=True)
class ClusterCurve:
    cluster_id: str
    color_index: int
    skipped: int  # members without a clinical record
    curve: SurvivalCurve | None  # None when no member had clinical data


@dataclass(frozen=True)
class ClusterSurvival:
    curves: tuple[ClusterCurve, ...]
    baseline: SurvivalCurve


def kaplan_meier(records: Sequence[tuple[float, bool]], cluster_id: str = BASELINE) -> SurvivalCurve:
    """Estimate S(t) from (time, event_observed) pairs.

    Events at time zero fold into the origin point rather than emitting a
    duplicate timestamp.
    """
    if len(records) == 0:
        raise EmptyInput("kaplan_meier needs at least one record")
    times = np.asarray([t for t, _ in records], dtype=np.float64)
    events = np.asarray([bool(e) for _, e in records], dtype=bool)
    if (times < 0).any():
        raise NegativeTime(f"negative survival time {times.min()}")

    steps: list[tuple[float, float]] = [(0.0, 1.0)]
    survival = 1.0
    for t in sorted(set(times[events].tolist())):
        at_risk = int((times >= t).sum())
        deaths = int(((times == t) & events).sum())
        survival *= 1.0 - deaths / at_risk
        if t == 0.0:
            steps[0] = (0.0, survival)
        else:
            steps.append((float(t), survival))
    return SurvivalCurve(cluster_id=cluster_id, n_at_risk_initial=len(records), steps=tuple(steps))


def curves_for_clusters(tree, clinical: ClinicalTable) -> ClusterSurvival:
    """One curve per current leaf plus the whole-dataset baseline.

    Members without clinical rows are skipped per cluster and counted; a leaf
    where nobody has clinical data yields a None curve entry.
    """
    cluster_curves: list[ClusterCurve] = []
    pooled: list[tuple[float, bool]] = []
    for leaf in tree.leaves():
        records = []
        for sid in leaf.members:
            rec = clinical.get(sid)
            if rec is not None:
                records.append((rec.time_days, rec.event))
        pooled.extend(records)
        curve = kaplan_meier(records, cluster_id=leaf.id) if records else None
        cluster_curves.append(
            ClusterCurve(
                cluster_id=leaf.id,
                color_index=leaf.color_index,
                skipped=len(leaf.members) - len(records),
                curve=curve,
            )
        )
    if not pooled:
        raise NoClinicalData("no sample has a usable clinical record")
    baseline = kaplan_meier(pooled, cluster_id=BASELINE)
    return ClusterSurvival(curves=tuple(cluster_curves), baseline=baseline)


def curve_record(curve: SurvivalCurve) -> dict:
    return {
        "cluster": curve.cluster_id,
        "n_at_risk_initial": curve.n_at_risk_initial,
        "steps": [[t, p] for t, p in curve.steps],
    }


def cluster_survival_record(result: ClusterSurvival) -> dict:
    curves = []
    for entry in result.curves:
        record = {
            "cluster": entry.cluster_id,
            "color": entry.color_index,
            "skipped": entry.skipped,
        }
        if entry.curve is not None:
            record["n_at_risk_initial"] = entry.curve.n_at_risk_initial
            record["steps"] = [[t, p] for t, p in entry.curve.steps]
        else:
            record["n_at_risk_initial"] = 0
            record["steps"] = None
        curves.append(record)
    return {"curves": curves, "baseline": curve_record(result.baseline)}
