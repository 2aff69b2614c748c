#!/usr/bin/env python3
"""Record real session-service responses as frontend test fixtures.

The stub service in the vitest suite replays these files, so the UI tests
exercise the exact wire format the backend produces. Re-run after any wire
format change:

    python3 tools/make_fixtures.py
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from splitbench.service import create_app

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

EXPR = "id,g0,g1,g2,g3\n" + "\n".join(
    f"s{i},{x},{y},{x * 0.5},{y * -0.25}"
    for i, (x, y) in enumerate(
        [(-5, 0.2), (-4.5, -0.1), (-5.2, 0.0), (-4.8, 0.1), (-5.1, -0.2), (-4.6, 0.15),
         (5, 0.1), (4.5, -0.2), (5.2, 0.05), (4.8, -0.05), (5.1, 0.12), (4.7, -0.12),
         (4.9, 0.02), (5.3, -0.08)]
    )
) + "\n"

CLINICAL = "sample_id,time_days,event,label\n" + "\n".join(
    f"s{i},{90 + 12 * i},{i % 2},{'low' if i < 6 else 'high'}" for i in range(14)
) + "\n"


def save(name: str, payload) -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / name).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    print(f"wrote tests/fixtures/{name}")


def main() -> None:
    client = TestClient(create_app())
    summary = client.post(
        "/dataset",
        files={
            "expression": ("expr.csv", EXPR, "text/csv"),
            "clinical": ("clin.csv", CLINICAL, "text/csv"),
        },
    ).json()
    save("dataset.json", summary)

    save("tree_r1.json", client.get("/tree").json())
    save("heatmap_r1.json", client.get("/heatmap").json())
    save("survival_r1.json", client.get("/survival").json())
    save("overlay_r1.json", client.get("/overlay").json())
    projection = client.get("/nodes/n0/projection", params={"bins": 8}).json()
    save("projection_n0_r1.json", projection)
    save(
        "projection_n0_colored_r1.json",
        client.get(
            "/nodes/n0/projection", params={"bins": 8, "color_features": "g0,g2"}
        ).json(),
    )

    xs = sorted(c[0] for c in projection["coords"])
    gaps = [(b - a, (a + b) / 2) for a, b in zip(xs, xs[1:])]
    mid = max(gaps)[1]  # cut at the widest gap between the two blobs
    split_request = {
        "pcx": 0,
        "pcy": 1,
        "features": None,
        "line": {"point": [mid, 0.0], "normal": [1.0, 0.0]},
        "revision": summary["revision"],
    }
    response = client.post("/nodes/n0/split", json=split_request)
    response.raise_for_status()
    save("split_request.json", split_request)
    save("split_response_r2.json", response.json())

    save("tree_r2.json", client.get("/tree").json())
    save("heatmap_r2.json", client.get("/heatmap").json())
    save("survival_r2.json", client.get("/survival").json())
    save("projection_n0_r2.json", client.get("/nodes/n0/projection", params={"bins": 8}).json())
    save("export_r2.json", client.get("/model/export").json())


if __name__ == "__main__":
    main()
