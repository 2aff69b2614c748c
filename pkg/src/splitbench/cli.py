"""Headless driver: validate data, replay scripted sessions, export and apply
models, emit survival tables, and compare classifications.

Exit codes: 1 usage, 2 data error, 3 script error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .data import load_clinical, load_expression, summarize, zscore_normalize
from .errors import ScriptError, WorkbenchError
from .partition import (
    PartitionTree,
    document_to_json,
    import_model,
    tree_to_document,
)
from .replay import canonical_json, parse_script, run_script
from .survival import cluster_survival_record, curves_for_clusters
from .viewmodel import compare_labelings, important_record

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_SCRIPT = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; we reserve that for data errors
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _add_dataset_flags(p: argparse.ArgumentParser, clinical_required: bool = False) -> None:
    p.add_argument("--expression", required=True, help="expression matrix file (csv/tsv)")
    p.add_argument("--clinical", required=clinical_required, help="clinical table file")
    p.add_argument(
        "--orientation",
        choices=["samples-as-rows", "features-as-rows"],
        default="samples-as-rows",
    )
    p.add_argument("--zscore", action="store_true", help="z-score normalize features")
    p.add_argument("--impute-mean", action="store_true", help="replace missing cells by feature means")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="splitbench", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest-check", help="validate a dataset and print its summary")
    _add_dataset_flags(p)

    p = sub.add_parser("serve", help="start the HTTP session service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--bins", type=int, default=20, help="default bin count for aligned heatmaps")
    p.add_argument("--cmax", type=float, default=3.0, help="diverging color scale saturation")

    p = sub.add_parser("replay", help="run a scripted split session and write its artifacts")
    _add_dataset_flags(p)
    p.add_argument("--script", required=True, help="line-delimited JSON command script")
    p.add_argument("--out-dir", required=True, help="directory for model.json and report.json")

    p = sub.add_parser("export-model", help="replay a script and write only the model document")
    _add_dataset_flags(p)
    p.add_argument("--script", required=True)
    p.add_argument("--model", required=True, help="output path for the model document")

    p = sub.add_parser("classify", help="apply a model document to an expression file")
    p.add_argument("--model", required=True)
    p.add_argument("--expression", required=True)
    p.add_argument(
        "--orientation",
        choices=["samples-as-rows", "features-as-rows"],
        default="samples-as-rows",
    )
    p.add_argument("--impute-mean", action="store_true")
    p.add_argument("--out", help="output CSV path (default: stdout)")

    p = sub.add_parser("survival", help="print Kaplan-Meier step tables per cluster")
    _add_dataset_flags(p, clinical_required=True)
    p.add_argument("--script", help="optional script to form clusters first")

    p = sub.add_parser("compare", help="ARI between a model's clusters and prior labels")
    p.add_argument("--model", required=True)
    _add_dataset_flags(p, clinical_required=True)

    return parser


def _load_dataset(args):
    matrix = load_expression(
        args.expression, orientation=args.orientation, impute_mean=args.impute_mean
    )
    degenerate = ()
    if args.zscore:
        matrix, degenerate = zscore_normalize(matrix)
    clinical = load_clinical(args.clinical, matrix) if args.clinical else None
    return matrix, clinical, degenerate


def _replayed_tree(args):
    matrix, clinical, degenerate = _load_dataset(args)
    tree = PartitionTree(matrix)
    commands = parse_script(Path(args.script).read_text(encoding="utf-8"))
    results = run_script(tree, commands)
    return matrix, clinical, degenerate, tree, results


def cmd_ingest_check(args) -> int:
    matrix, clinical, degenerate = _load_dataset(args)
    summary = summarize(matrix, clinical, normalization_applied=args.zscore)
    record = {
        "n_samples": summary.n_samples,
        "n_features": summary.n_features,
        "label_histogram": summary.label_histogram,
        "normalization_applied": summary.normalization_applied,
        "degenerate_features": list(degenerate),
        "clinical_records": len(clinical.records) if clinical else 0,
    }
    sys.stdout.write(canonical_json(record))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(default_bins=args.bins, default_cmax=args.cmax)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def cmd_replay(args) -> int:
    matrix, clinical, degenerate, tree, results = _replayed_tree(args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    (out_dir / "model.json").write_text(document_to_json(tree_to_document(tree)), encoding="utf-8")

    splits = []
    for node in tree.internal_nodes_by_creation():
        rule = node.rule
        splits.append(
            {
                "node": node.id,
                "positive": rule.positive_child,
                "negative": rule.negative_child,
                "sizes": [
                    len(tree.node(rule.positive_child).members),
                    len(tree.node(rule.negative_child).members),
                ],
                "important": important_record(node.important),
            }
        )
    report = {
        "dataset": {
            "n_samples": matrix.n_samples,
            "n_features": matrix.n_features,
            "degenerate_features": list(degenerate),
        },
        "commands": results,
        "splits": splits,
        "clusters": [
            {"id": leaf.id, "size": len(leaf.members), "color": leaf.color_index}
            for leaf in tree.leaves()
        ],
    }
    if clinical is not None and clinical.records:
        report["survival"] = cluster_survival_record(curves_for_clusters(tree, clinical))
        if clinical.any_labels:
            assignment = tree.leaf_assignment()
            prior = {sid: clinical.label_of(sid) or "none" for sid in matrix.sample_ids}
            comparison = compare_labelings(assignment, prior)
            report["comparison"] = {
                "ari": comparison.ari,
                "clusters": list(comparison.labels_a),
                "labels": list(comparison.labels_b),
                "table": comparison.table.tolist(),
            }
    (out_dir / "report.json").write_text(canonical_json(report), encoding="utf-8")

    for leaf in tree.leaves():
        sys.stdout.write(f"cluster {leaf.id}: {len(leaf.members)} samples\n")
    if "comparison" in report:
        sys.stdout.write(f"ARI vs prior labels: {report['comparison']['ari']:.4f}\n")
    sys.stdout.write(f"wrote {out_dir / 'model.json'} and {out_dir / 'report.json'}\n")
    return 0


def cmd_export_model(args) -> int:
    _, _, _, tree, _ = _replayed_tree(args)
    Path(args.model).write_text(document_to_json(tree_to_document(tree)), encoding="utf-8")
    return 0


def cmd_classify(args) -> int:
    document = json.loads(Path(args.model).read_text(encoding="utf-8"))
    matrix = load_expression(
        args.expression, orientation=args.orientation, impute_mean=args.impute_mean
    )
    tree = import_model(document, matrix)
    assignment = tree.leaf_assignment()
    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["sample_id", "cluster"])
        for sid in matrix.sample_ids:
            writer.writerow([sid, assignment[sid]])
    finally:
        if args.out:
            out.close()
    return 0


def cmd_survival(args) -> int:
    if args.script:
        matrix, clinical, _, tree, _ = _replayed_tree(args)
    else:
        matrix, clinical, _ = _load_dataset(args)
        tree = PartitionTree(matrix)
    record = cluster_survival_record(curves_for_clusters(tree, clinical))
    sys.stdout.write(canonical_json(record))
    return 0


def cmd_compare(args) -> int:
    document = json.loads(Path(args.model).read_text(encoding="utf-8"))
    matrix, clinical, _ = _load_dataset(args)
    tree = import_model(document, matrix)
    assignment = tree.leaf_assignment()
    prior = {sid: clinical.label_of(sid) or "none" for sid in matrix.sample_ids}
    comparison = compare_labelings(assignment, prior)
    sys.stdout.write(
        canonical_json(
            {
                "ari": comparison.ari,
                "clusters": list(comparison.labels_a),
                "labels": list(comparison.labels_b),
                "table": comparison.table.tolist(),
            }
        )
    )
    return 0


_HANDLERS = {
    "ingest-check": cmd_ingest_check,
    "serve": cmd_serve,
    "replay": cmd_replay,
    "export-model": cmd_export_model,
    "classify": cmd_classify,
    "survival": cmd_survival,
    "compare": cmd_compare,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return _HANDLERS[args.command](args)
    except ScriptError as exc:
        sys.stderr.write(f"script error: {exc}\n")
        return EXIT_SCRIPT
    except WorkbenchError as exc:
        sys.stderr.write(f"data error: {exc}\n")
        return EXIT_DATA
    except OSError as exc:
        sys.stderr.write(f"io error: {exc}\n")
        return EXIT_DATA
    except json.JSONDecodeError as exc:
        sys.stderr.write(f"data error: invalid JSON ({exc})\n")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
