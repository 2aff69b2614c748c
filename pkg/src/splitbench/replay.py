"""Scripted session replay.

A script is line-delimited JSON, one command per line:

    {"op": "split", "node": "n0", "pcx": 0, "pcy": 1,
     "features": ["ERBB2", "GRB7"], "line": {"point": [x, y], "normal": [nx, ny]}}
    {"op": "prune", "node": "n1"}

Node tokens follow the tree's deterministic creation order ("n0" root, then
"n1"/"n2" for the first split's positive/negative children), so an append-only
session log doubles as provenance and replays bit-identically.
"""

from __future__ import annotations

import json

from .errors import ScriptError, WorkbenchError
from .partition import DividerLine, PartitionTree
from .pca import fit_pca


def canonical_json(obj) -> str:
    """Stable human-readable JSON used for every file the CLI writes."""
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def parse_script(text: str) -> list[dict]:
    commands = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            cmd = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ScriptError(f"line {line_no}: not valid JSON ({exc.msg})") from None
        if not isinstance(cmd, dict):
            raise ScriptError(f"line {line_no}: command must be a JSON object")
        commands.append(cmd)
    return commands


def run_script(tree: PartitionTree, commands: list[dict]) -> list[dict]:
    """Execute commands against a tree through the same operations the
    interactive service uses. Returns one result record per command."""
    matrix = tree.matrix
    results = []
    for index, cmd in enumerate(commands):
        try:
            op = cmd["op"]
            if op == "split":
                node_id = cmd["node"]
                node = tree.node(node_id)
                pcx = int(cmd.get("pcx", 0))
                pcy = int(cmd.get("pcy", 1))
                features = cmd.get("features")
                if features:
                    feature_idx = matrix.feature_indices(features)
                else:
                    feature_idx = list(range(matrix.n_features))
                basis = fit_pca(matrix, matrix.sample_indices(node.members), feature_idx)
                line = DividerLine.from_vector(cmd["line"]["point"], cmd["line"]["normal"])
                pos, neg = tree.apply_split(node_id, basis, pcx, pcy, line)
                results.append(
                    {
                        "op": "split",
                        "node": node_id,
                        "positive": pos.id,
                        "negative": neg.id,
                        "sizes": [len(pos.members), len(neg.members)],
                    }
                )
            elif op == "prune":
                node_id = cmd["node"]
                removed = tree.prune(node_id)
                results.append({"op": "prune", "node": node_id, "removed": removed})
            else:
                raise ScriptError(f"command {index}: unknown op {op!r}")
        except ScriptError:
            raise
        except (WorkbenchError, KeyError, TypeError, ValueError) as exc:
            raise ScriptError(f"command {index}: {exc}") from exc
    return results
