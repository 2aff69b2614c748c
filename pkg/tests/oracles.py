"""Independent reference implementations used to pin expected values.

Each oracle deliberately takes a different computational route from the code
it checks: covariance eigendecomposition instead of SVD, pure-Python loops
instead of numpy reductions, pair counting instead of the contingency formula.
"""

from __future__ import annotations

import math

import numpy as np


def pca_eigh_oracle(data: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """PCA via eigendecomposition of the sample covariance matrix.

    Returns (mean, components[k, p], variances[k]) with k = min(n-1, p),
    eigenvalues descending. Component signs are left arbitrary.
    """
    data = np.asarray(data, dtype=np.float64)
    n, p = data.shape
    mean = data.mean(axis=0)
    centered = data - mean
    cov = centered.T @ centered / (n - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    k = min(n - 1, p)
    return mean, eigvecs[:, order[:k]].T, np.maximum(eigvals[order[:k]], 0.0)


def importance_oracle(mu_a, mu_b) -> tuple[list[float], float, float, set[int]]:
    """Selected-feature threshold recomputed with plain Python arithmetic."""
    d = [float(a) - float(b) for a, b in zip(mu_a, mu_b)]
    n = len(d)
    mu_d = sum(d) / n
    sigma_avg = math.sqrt(sum((di - mu_d) ** 2 for di in d) / n)
    if sigma_avg > 0.0:
        selected = {i for i, di in enumerate(d) if abs(di) >= sigma_avg}
    else:
        selected = set()
    return d, mu_d, sigma_avg, selected


def km_oracle(records) -> list[tuple[float, float]]:
    """Product-limit curve rebuilt record-by-record without numpy.

    Events first at ties; censored subjects stay at risk at their own time.
    """
    steps = [(0.0, 1.0)]
    survival = 1.0
    event_times = sorted({t for t, e in records if e})
    for t in event_times:
        at_risk = sum(1 for time, _ in records if time >= t)
        deaths = sum(1 for time, e in records if e and time == t)
        survival *= 1.0 - deaths / at_risk
        if t == 0.0:
            steps[0] = (0.0, survival)
        else:
            steps.append((t, survival))
    return steps


def binning_oracle(coords, values, edges) -> tuple[list[int], list[list[float]]]:
    """Group-by binning with explicit per-bin membership tests.

    Half-open bins [e_i, e_{i+1}) with the last bin closed on the right.
    Returns (counts, means[feature][bin]); empty bins give NaN means.
    """
    n_bins = len(edges) - 1
    member_lists = [[] for _ in range(n_bins)]
    for i, v in enumerate(coords):
        for b in range(n_bins):
            last = b == n_bins - 1
            if (edges[b] <= v < edges[b + 1]) or (last and edges[b] <= v <= edges[b + 1]):
                member_lists[b].append(i)
                break
    counts = [len(m) for m in member_lists]
    n_features = values.shape[1]
    means = [[float("nan")] * n_bins for _ in range(n_features)]
    for b, members in enumerate(member_lists):
        if not members:
            continue
        for f in range(n_features):
            means[f][b] = sum(float(values[i, f]) for i in members) / len(members)
    return counts, means


def ari_pairs_oracle(labels_a, labels_b) -> float:
    """Adjusted Rand index by brute-force pair counting over all sample pairs."""
    keys = sorted(labels_a)
    a = b = c = d = 0
    for i in range(len(keys)):
        for j in range(i + 1, len(keys)):
            same_a = labels_a[keys[i]] == labels_a[keys[j]]
            same_b = labels_b[keys[i]] == labels_b[keys[j]]
            if same_a and same_b:
                a += 1
            elif same_a:
                b += 1
            elif same_b:
                c += 1
            else:
                d += 1
    numerator = 2.0 * (a * d - b * c)
    denominator = (a + b) * (b + d) + (a + c) * (c + d)
    return 1.0 if denominator == 0 else numerator / denominator


def nearest_centroid_oracle(train_coords, train_labels, point) -> str:
    """Assign a 2D point to the label of the nearest cluster centroid."""
    best_label, best_dist = None, math.inf
    for label in sorted(set(train_labels)):
        pts = [p for p, lab in zip(train_coords, train_labels) if lab == label]
        cx = sum(p[0] for p in pts) / len(pts)
        cy = sum(p[1] for p in pts) / len(pts)
        dist = math.hypot(point[0] - cx, point[1] - cy)
        if dist < best_dist:
            best_label, best_dist = label, dist
    return best_label
