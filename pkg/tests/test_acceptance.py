"""Acceptance suite: one test per release criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines. The case-study reproduction needs the public breast-cancer marker
export (see README) and skips with a notice when the files are absent.
"""

import itertools
import json
import math
import os
import socket
import threading
import time
from pathlib import Path

import numpy as np
import pytest

from splitbench.cli import main as cli_main
from splitbench.data import ExpressionMatrix, load_clinical, load_expression, write_expression
from splitbench.partition import (
    DividerLine,
    PartitionTree,
    import_model,
    select_important,
)
from splitbench.pca import fit_pca, loadings, project
from splitbench.survival import kaplan_meier
from splitbench.viewmodel import (
    binned_heatmap,
    compare_labelings,
    heatmap_overview,
    hierarchy_layout,
)

from oracles import importance_oracle, km_oracle, pca_eigh_oracle


def _report(line: str) -> None:
    print(f"\nACCEPTANCE {line}")


# --- criterion 1: PCA oracle suite --------------------------------------------


def test_c1_pca_oracle_suite():
    rng = np.random.default_rng(20240117)
    started = time.perf_counter()
    for trial in range(200):
        n = int(rng.integers(4, 26))
        p = int(rng.integers(2, 13))
        matrix = ExpressionMatrix(
            tuple(f"s{i}" for i in range(n)),
            tuple(f"g{j}" for j in range(p)),
            rng.normal(size=(n, p)),
        )
        basis = fit_pca(matrix, range(n), range(p))
        k = basis.n_components

        # orthonormality within 1e-8
        gram = basis.components @ basis.components.T
        assert np.abs(gram - np.eye(k)).max() < 1e-8

        # variance trace preservation within 1e-8
        centered = matrix.values - matrix.values.mean(axis=0)
        assert basis.variances.sum() == pytest.approx((centered**2).sum() / (n - 1), abs=1e-8)

        # projection coordinates match the covariance-eigendecomposition
        # oracle within 1e-8, up to per-component sign
        _, comps_o, _ = pca_eigh_oracle(matrix.values)
        oracle_coords = centered @ comps_o.T
        mine = np.empty((n, k))
        for pc in range(k - 1):
            proj = project(basis, matrix, range(n), pc, pc + 1)
            mine[:, pc] = proj.coords[:, 0]
            if pc == k - 2:
                mine[:, pc + 1] = proj.coords[:, 1]
        for pc in range(k):
            column = oracle_coords[:, pc]
            sign = 1.0 if float(mine[:, pc] @ column) >= 0 else -1.0
            assert np.abs(mine[:, pc] - sign * column).max() < 1e-8, f"trial {trial}, pc {pc}"
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0
    _report(f"PASS: PCA oracle suite (200 matrices, {elapsed:.2f}s < 10s)")


# --- criterion 2: feature-importance suite ---------------------------------------


def test_c2_feature_importance_suite():
    # derived example, exact
    d, mu_d, sigma_avg, selected = select_important(
        np.array([5.0, 2.0, 1.0]), np.array([1.0, 1.0, 0.0])
    )
    assert list(d) == [4.0, 1.0, 1.0]
    assert mu_d == 2.0
    assert sigma_avg == math.sqrt(2.0)
    assert selected == (0,)

    # 500 random mean-vector pairs, bit-for-bit agreement on the selected set
    rng = np.random.default_rng(7071)
    for _ in range(500):
        n_feat = int(rng.integers(2, 60))
        mu_a = rng.normal(scale=rng.uniform(0.5, 3.0), size=n_feat)
        mu_b = rng.normal(scale=rng.uniform(0.5, 3.0), size=n_feat)
        _, _, _, mine = select_important(mu_a, mu_b)
        _, _, _, oracle = importance_oracle(mu_a, mu_b)
        assert set(mine) == oracle
    _report("PASS: feature-importance suite (derived example exact; 500 random pairs bit-for-bit)")


# --- criterion 3: Kaplan-Meier suite ----------------------------------------------


def test_c3_kaplan_meier_suite():
    # derived example at the stated tolerance
    steps = kaplan_meier([(1.0, True), (2.0, False), (3.0, True)]).steps
    assert steps[0] == (0.0, 1.0)
    assert steps[1][0] == 1.0 and abs(steps[1][1] - 0.6667) <= 1e-4
    assert steps[2] == (3.0, 0.0)

    # exhaustive oracle equivalence on every event/censor pattern up to 8 records
    grids = [
        [1.0, 2.0, 2.0, 3.0, 3.0, 3.0, 4.0, 5.0],
        [0.5, 1.5, 2.5, 3.5, 4.5, 5.5, 6.5, 7.5],
    ]
    for grid in grids:
        for n in range(1, 9):
            for flags in itertools.product([False, True], repeat=n):
                records = list(zip(grid[:n], flags))
                got = kaplan_meier(records).steps
                want = km_oracle(records)
                assert [t for t, _ in got] == [t for t, _ in want]
                assert all(abs(gp - wp) < 1e-12 for (_, gp), (_, wp) in zip(got, want))

    # monotone and bounded on 1,000 random inputs
    rng = np.random.default_rng(99)
    for _ in range(1000):
        n = int(rng.integers(1, 30))
        times = rng.uniform(0, 200, size=n)
        if rng.random() < 0.4:
            times = np.floor(times)
        events = rng.random(size=n) < rng.uniform(0.05, 0.95)
        curve = kaplan_meier(list(zip(times.tolist(), events.tolist())))
        probs = [p for _, p in curve.steps]
        assert all(0.0 <= p <= 1.0 for p in probs)
        assert all(later <= earlier for earlier, later in zip(probs, probs[1:]))
    _report("PASS: Kaplan-Meier suite (derived example; exhaustive <=8-record oracle; 1000 random inputs)")


# --- criterion 4: synthetic recovery ------------------------------------------------


def synthetic_four_gaussians(seed=515):
    rng = np.random.default_rng(seed)
    n_per, p = 250, 50
    centers = np.zeros((4, p))
    centers[1, 0] = 24.0
    centers[2, 1] = 16.0
    centers[3, 0] = 24.0
    centers[3, 1] = 16.0
    rows, labels = [], []
    for g in range(4):
        rows.append(centers[g] + rng.normal(size=(n_per, p)))
        labels.extend([f"group{g}"] * n_per)
    order = rng.permutation(4 * n_per)
    values = np.vstack(rows)[order]
    labels = [labels[i] for i in order]
    matrix = ExpressionMatrix(
        tuple(f"s{i}" for i in range(4 * n_per)),
        tuple(f"g{j}" for j in range(p)),
        values,
    )
    return matrix, dict(zip(matrix.sample_ids, labels))


def ideal_divider(matrix, members, planted, split_groups):
    """Perpendicular bisector between two planted group centroids in the
    node's own PC0/PC1 plane, exactly as an analyst would draw it."""
    idx = matrix.sample_indices(members)
    basis = fit_pca(matrix, idx, range(matrix.n_features))
    proj = project(basis, matrix, idx, 0, 1)
    side_a, side_b = split_groups
    coords = {g: [] for g in side_a + side_b}
    for sid, xy in zip(proj.sample_ids, proj.coords):
        if planted[sid] in coords:
            coords[planted[sid]].append(xy)
    centroid_a = np.mean([c for g in side_a for c in coords[g]], axis=0)
    centroid_b = np.mean([c for g in side_b for c in coords[g]], axis=0)
    midpoint = (centroid_a + centroid_b) / 2
    return {
        "point": [float(midpoint[0]), float(midpoint[1])],
        "normal": [float(v) for v in (centroid_a - centroid_b)],
    }


def build_recovery_script(matrix, planted):
    """Three ideal dividers: root separates groups {0,1} from {2,3} (the
    x-offset axis), then each child separates its own pair."""
    tree = PartitionTree(matrix)
    commands = []

    def add_split(node_id, side_a, side_b):
        node = tree.node(node_id)
        line = ideal_divider(matrix, node.members, planted, (side_a, side_b))
        commands.append({
            "op": "split", "node": node_id, "pcx": 0, "pcy": 1, "line": line,
        })
        basis = fit_pca(matrix, matrix.sample_indices(node.members), range(matrix.n_features))
        return tree.apply_split(node_id, basis, 0, 1, DividerLine.from_vector(line["point"], line["normal"]))

    pos, neg = add_split("n0", ("group1", "group3"), ("group0", "group2"))

    def groups_in(node):
        return sorted({planted[s] for s in node.members})

    for child in (pos, neg):
        present = groups_in(child)
        add_split(child.id, (present[0],), tuple(present[1:]))
    return commands, tree


def test_c4_synthetic_recovery(tmp_path):
    matrix, planted = synthetic_four_gaussians()
    commands, _ = build_recovery_script(matrix, planted)

    expr_path = tmp_path / "synthetic.tsv"
    write_expression(matrix, expr_path)
    script_path = tmp_path / "script.jsonl"
    script_path.write_text("\n".join(json.dumps(c) for c in commands) + "\n")

    models = []
    for run in ("run_a", "run_b"):
        out_dir = tmp_path / run
        code = cli_main([
            "replay", "--expression", str(expr_path),
            "--script", str(script_path), "--out-dir", str(out_dir),
        ])
        assert code == 0
        models.append((out_dir / "model.json").read_bytes())
    assert models[0] == models[1], "replay must be bit-deterministic"

    tree = import_model(json.loads(models[0].decode()), matrix)
    assignment = tree.leaf_assignment()
    ari = compare_labelings(assignment, planted).ari
    assert len(tree.leaves()) == 4
    assert ari >= 0.9
    _report(f"PASS: synthetic recovery (ARI {ari:.4f} >= 0.9; bit-identical replays)")


# --- criterion 5: case-study reproduction -------------------------------------------


PAM50_EXPRESSION = os.environ.get("SPLITBENCH_PAM50_EXPRESSION")
PAM50_CLINICAL = os.environ.get("SPLITBENCH_PAM50_CLINICAL")
HER2_MARKERS = ("ERBB2", "GRB7", "CDC6")


def test_c5_case_study_reproduction():
    if not PAM50_EXPRESSION or not Path(PAM50_EXPRESSION).exists():
        _report(
            "SKIP: case-study reproduction (set SPLITBENCH_PAM50_EXPRESSION to the "
            "public PanCancer breast-marker export to enable)"
        )
        pytest.skip("PanCancer 50-marker export not available in this environment")

    matrix = load_expression(PAM50_EXPRESSION)
    assert matrix.n_samples == 1082
    assert matrix.n_features == 50

    basis = fit_pca(matrix, range(matrix.n_samples), range(matrix.n_features))
    proj = project(basis, matrix, range(matrix.n_samples), 0, 1)
    load = loadings(basis, 0, 1)

    # direction spanned by the three marker loadings in the PC plane
    # (basis fit on all features, so loadings rows align with matrix features)
    marker_vec = np.zeros(2)
    for name in HER2_MARKERS:
        marker_vec += load.vectors[matrix.feature_index(name)]
    direction = marker_vec / np.linalg.norm(marker_vec)

    # 1D split at the widest gap along the marker direction
    t = proj.coords @ direction
    order = np.argsort(t)
    gaps = np.diff(t[order])
    upper = gaps[len(gaps) // 2 :]  # the marker-high group sits in the upper tail
    cut_pos = len(gaps) // 2 + int(np.argmax(upper))
    threshold = float((t[order][cut_pos] + t[order][cut_pos + 1]) / 2)

    tree = PartitionTree(matrix)
    line = DividerLine.from_vector(tuple(direction * threshold), tuple(direction))
    pos, neg = tree.apply_split("n0", basis, 0, 1, line)
    her2_cluster = pos if len(pos.members) < len(neg.members) else neg
    fraction = len(her2_cluster.members) / matrix.n_samples
    assert 0.07 <= fraction <= 0.13, f"HER2-like cluster fraction {fraction:.3f}"
    selected = set(tree.root.important.selected_names())
    assert set(HER2_MARKERS) <= selected

    if PAM50_CLINICAL and Path(PAM50_CLINICAL).exists():
        clinical = load_clinical(PAM50_CLINICAL, matrix)
        from splitbench.survival import curves_for_clusters

        result = curves_for_clusters(tree, clinical)
        her2_curve = next(c.curve for c in result.curves if c.cluster_id == her2_cluster.id)
        assert her2_curve.final_probability >= result.baseline.final_probability
    _report(f"PASS: case-study reproduction (cluster fraction {fraction:.3f}, markers selected)")


# --- criterion 6: scale -----------------------------------------------------------


def test_c6_scale_2000x50_under_one_second():
    rng = np.random.default_rng(1234)
    n, p = 2000, 50
    values = rng.normal(size=(n, p))
    values[:400, 0] += 8.0
    matrix = ExpressionMatrix(
        tuple(f"s{i}" for i in range(n)), tuple(f"g{j}" for j in range(p)), values
    )
    tree = PartitionTree(matrix)

    started = time.perf_counter()
    basis = fit_pca(matrix, range(n), range(p))
    proj = project(basis, matrix, range(n), 0, 1)
    binned_heatmap(proj, matrix, basis, "x", 20)
    binned_heatmap(proj, matrix, basis, "y", 20)
    cut = float(np.median(proj.coords[:, 0]))
    tree.apply_split("n0", basis, 0, 1, DividerLine((cut + 1e-9, 0.0), (1.0, 0.0)))
    hierarchy_layout(tree)
    heatmap_overview(tree, matrix)
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    _report(f"PASS: scale (full per-split pipeline on 2000x50 in {elapsed * 1000:.0f}ms < 1s)")


# --- criterion 7: parity & round-trip ------------------------------------------------


def _free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


def _http_replay(base_url, expr_path, script_path) -> bytes:
    import httpx

    with httpx.Client(base_url=base_url, timeout=30.0) as web:
        with open(expr_path, "rb") as fh:
            response = web.post("/dataset", files={"expression": ("expr.tsv", fh, "text/plain")})
        response.raise_for_status()
        revision = response.json()["revision"]
        for line in Path(script_path).read_text().splitlines():
            if not line.strip():
                continue
            cmd = json.loads(line)
            assert cmd["op"] == "split"
            body = {
                "pcx": cmd.get("pcx", 0),
                "pcy": cmd.get("pcy", 1),
                "features": cmd.get("features"),
                "line": cmd["line"],
                "revision": revision,
            }
            reply = web.post(f"/nodes/{cmd['node']}/split", json=body)
            reply.raise_for_status()
            revision = reply.json()["revision"]
        export = web.get("/model/export")
        export.raise_for_status()
        return export.content


def test_c7_parity_and_roundtrip(tmp_path):
    import uvicorn

    from splitbench.service import create_app

    matrix, planted = synthetic_four_gaussians(seed=808)
    commands, built_tree = build_recovery_script(matrix, planted)
    expr_path = tmp_path / "dataset.tsv"
    write_expression(matrix, expr_path)
    script_path = tmp_path / "script.jsonl"
    script_path.write_text("\n".join(json.dumps(c) for c in commands) + "\n")

    out_dir = tmp_path / "cli"
    assert cli_main([
        "replay", "--expression", str(expr_path),
        "--script", str(script_path), "--out-dir", str(out_dir),
    ]) == 0
    cli_model = (out_dir / "model.json").read_bytes()

    port = _free_port()
    config = uvicorn.Config(create_app(), host="127.0.0.1", port=port, log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    try:
        deadline = time.time() + 15
        while not server.started:
            if time.time() > deadline:
                raise RuntimeError("service did not start")
            time.sleep(0.05)
        http_model = _http_replay(f"http://127.0.0.1:{port}", expr_path, script_path)
    finally:
        server.should_exit = True
        thread.join(timeout=10)

    assert http_model == cli_model, "CLI and HTTP replays must export identical bytes"

    # import(export(t)) classifies every sample into the same leaf as t
    rebuilt = import_model(json.loads(cli_model.decode()), matrix)
    assert rebuilt.leaf_assignment() == built_tree.leaf_assignment()
    _report("PASS: parity & round-trip (CLI == HTTP export bytes; import/export classification identity)")
