"""Exports: metrics CSV and per-seed DOT graphs, derived from stored runs."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from ..graphs import graph_to_dot
from ..netsim.metrics import build_graphs
from ..netsim.trace import Trace

CSV_COLUMNS = ["seed", "h_num", "h_den", "locality", "cut_weight", "corruptions"]


def export_csv(in_dir: Path) -> str:
    report = json.loads((Path(in_dir) / "report.json").read_text())
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for record in report["per_seed"]:
        cuts = record.get("cuts") or []
        writer.writerow({
            "seed": record["seed"],
            "h_num": record.get("h_num"),
            "h_den": record.get("h_den"),
            "locality": record.get("locality"),
            "cut_weight": cuts[0]["weight"] if cuts else "",
            "corruptions": record.get("corruptions"),
        })
    return buf.getvalue()


def export_dot(in_dir: Path) -> list[Path]:
    """(Re)write graph.dot for every stored trace; returns the paths."""
    out = []
    for trace_path in sorted(Path(in_dir).glob("*/trace.ndjson")):
        trace = Trace.from_ndjson(trace_path.read_text())
        _o, _i, g_full = build_graphs(trace)
        dot = graph_to_dot(g_full, corrupted=set(trace.corrupted_round()))
        target = trace_path.parent / "graph.dot"
        target.write_text(dot)
        out.append(target)
    return out
