"""Experiment runner: seed sweeps, per-seed metrics, aggregate report.

One experiment = one config = a sweep over a seed range. Every seed runs a
fresh instance; the per-seed record carries outputs, the expansion ratio of
the full graph, locality, the low-weight cut list, corruption count and (for
attack adversaries) the attack report. Aggregates count event frequencies
and contract violations; the process exit code is zero exactly when no
violation was recorded. Reports contain no timestamps, so a rerun of the
same config reproduces the report byte for byte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from ..adversary.attacks import _IsolationAttack
from ..graphs import edge_expansion, find_alpha_cuts, graph_to_dot
from ..netsim.engine import BudgetExceeded, ExecutionInstance, derive_rng, run_instance
from ..netsim.metrics import build_graphs, honest_at_end, locality
from ..netsim.psmt import ChannelMode
from ..wire import canonical_json
from .config import ExperimentConfig

BROADCAST_PROTOCOLS = {"flooding", "strawman_bridge"}
EVALUATION_PROTOCOLS = {"committee_bridge", "committee_bridge_adaptive"}


@dataclass
class Report:
    config: dict
    per_seed: list[dict]
    aggregates: dict

    def to_json(self) -> str:
        return canonical_json({"config": self.config, "per_seed": self.per_seed,
                               "aggregates": self.aggregates})

    def to_bytes(self) -> bytes:
        return self.to_json().encode()


def wilson_interval(hits: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    p = hits / trials
    denom = 1 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def make_inputs(cfg: ExperimentConfig, seed: int) -> tuple:
    if cfg.inputs == "indexed":
        return tuple((1 + 7 * i) % (1 << cfg.kappa) for i in range(cfg.n))
    if cfg.inputs == "random":
        rng = derive_rng(seed, "experiment/inputs")
        return tuple(rng.getrandbits(cfg.kappa) for _ in range(cfg.n))
    raise ValueError(f"unknown input scheme {cfg.inputs!r}")


def build_instance(cfg: ExperimentConfig, seed: int) -> ExecutionInstance:
    return ExecutionInstance(
        protocol=cfg.protocol,
        n=cfg.n,
        inputs=make_inputs(cfg, seed),
        seed=seed,
        protocol_params=dict(cfg.protocol_params),
        adversary=cfg.adversary,
        adversary_params=dict(cfg.adversary_params),
        budget=cfg.budget,
        kappa=cfg.kappa,
        channel_mode=ChannelMode(cfg.channel_mode),
    )


def honest_contract_violations(cfg: ExperimentConfig, inst, trace) -> list[str]:
    """Contract checks on honest runs: agreement + validity or f-evaluation."""
    out: list[str] = []
    honest = sorted(honest_at_end(trace))
    values = [canonical_json(trace.outputs.get(i)) for i in honest]
    if cfg.protocol in BROADCAST_PROTOCOLS:
        if len(set(values)) != 1:
            out.append("agreement-violated")
        for i in honest:
            vec = trace.outputs.get(i)
            if not isinstance(vec, list) or len(vec) != cfg.n:
                out.append(f"malformed-output-{i}")
                continue
            for j in honest:
                if vec[j] != inst.inputs[j]:
                    out.append(f"validity-violated-{i}-{j}")
    elif cfg.protocol in EVALUATION_PROTOCOLS:
        from ..protocols.reducers import reducer
        from ..protocols.nonexpander import bridge_params

        p = bridge_params(cfg.n, cfg.protocol_params)
        want = reducer(p["f"])(list(inst.inputs))
        for i in honest:
            if trace.outputs.get(i) != want:
                out.append(f"evaluation-violated-{i}")
    return out


def run_seed(cfg: ExperimentConfig, seed: int):
    """One seed: (record, trace), or a bare record when the run aborted."""
    inst = build_instance(cfg, seed)
    record: dict[str, Any] = {"seed": seed}
    holder: list = []
    try:
        trace = run_instance(inst, adversary_out=holder)
    except BudgetExceeded as exc:
        return {"seed": seed, "violations": [f"budget-exceeded: {exc}"]}
    g_out, g_in, g_full = build_graphs(trace)
    h = edge_expansion(g_full, weight_bound=cfg.alpha_value) if cfg.n >= 2 else None
    per, top = (None, None)
    if honest_at_end(trace):
        per, top = locality(trace)
    cuts = []
    try:
        cuts = [{"weight": c.weight, "side": list(c.side)}
                for c in find_alpha_cuts(g_full, cfg.alpha_value, max_cuts=64)]
    except ValueError:
        record["cuts_truncated"] = True
    record.update({
        "outputs": {str(i): trace.outputs[i] for i in sorted(trace.outputs)},
        "h_num": h.numerator if h else None,
        "h_den": h.denominator if h else None,
        "locality": top,
        "cuts": cuts,
        "corruptions": len(trace.corrupted_round()),
        "violations": [],
    })
    adversary = holder[0] if holder else None
    if isinstance(adversary, _IsolationAttack):
        rep = adversary.report
        record["attack"] = {
            "target": rep.target, "e1": rep.e1, "e2": rep.e2,
            "failures": rep.failures, "phase2": rep.phase2_at, "phase3": rep.phase3_at,
            "corrupted": rep.corrupted, "final_cut": rep.final_cut,
            "final_cut_weight": rep.final_cut_weight,
        }
    if record["corruptions"] > cfg.budget:
        record["violations"].append("budget-violated")
    if cfg.adversary == "passive" and not inst.static_corruptions:
        record["violations"].extend(honest_contract_violations(cfg, inst, trace))
    return record, trace


def _record_for_seed(args) -> tuple[dict, str | None, str | None]:
    cfg, seed = args
    result = run_seed(cfg, seed)
    if isinstance(result, dict):  # failed before producing a trace
        return result, None, None
    record, trace = result
    if not cfg.artifacts:
        return record, None, None
    _o, _i, g_full = build_graphs(trace)
    corrupted = set(trace.corrupted_round())
    highlight = set()
    att = record.get("attack")
    if att and att.get("final_cut"):
        side = set(att["final_cut"])
        highlight = {(a, b) for a, b in g_full.edges if (a in side) != (b in side)}
    return record, trace.to_ndjson(), graph_to_dot(g_full, corrupted=corrupted,
                                                   highlight=highlight)


def run_experiment(cfg: ExperimentConfig, out_dir: Path | None = None) -> tuple[Report, int]:
    """Execute the sweep; returns the report and the exit code."""
    seeds = list(range(*cfg.seeds))
    jobs = [(cfg, s) for s in seeds]
    if cfg.workers > 1:
        import multiprocessing

        with multiprocessing.Pool(cfg.workers) as pool:
            results = pool.map(_record_for_seed, jobs)
    else:
        results = [_record_for_seed(j) for j in jobs]
    records = [r[0] for r in results]
    records.sort(key=lambda r: r["seed"])
    agg: dict[str, Any] = {
        "seeds": len(records),
        "violations": sum(len(r.get("violations", [])) for r in records),
        "mean_locality": _mean([r.get("locality") for r in records]),
        "mean_corruptions": _mean([r.get("corruptions") for r in records]),
    }
    attacks = [r["attack"] for r in records if "attack" in r]
    if attacks:
        e1 = sum(1 for a in attacks if a["e1"])
        e12 = sum(1 for a in attacks if a["e1"] and a["e2"])
        lo, hi = wilson_interval(e12, len(attacks))
        agg.update({
            "e1_count": e1,
            "e1e2_count": e12,
            "e1e2_freq": e12 / len(attacks),
            "e1e2_wilson_low": lo,
            "e1e2_wilson_high": hi,
            "e2_given_e1": (e12 / e1) if e1 else None,
            "phase3_count": sum(1 for a in attacks if a["phase3"] is not None),
        })
    report = Report(config=_config_dict(cfg), per_seed=records, aggregates=agg)
    if out_dir is None:
        out_dir = cfg.out_dir()
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_bytes(report.to_bytes())
    if cfg.artifacts:
        for (record, ndjson, dot) in results:
            seed_dir = out_dir / str(record["seed"])
            seed_dir.mkdir(exist_ok=True)
            if ndjson is not None:
                (seed_dir / "trace.ndjson").write_text(ndjson)
            if dot is not None:
                (seed_dir / "graph.dot").write_text(dot)
    exit_code = 0 if agg["violations"] == 0 else 1
    return report, exit_code


def _mean(values) -> float | None:
    vals = [v for v in values if v is not None]
    return sum(vals) / len(vals) if vals else None


def _config_dict(cfg: ExperimentConfig) -> dict:
    data = dict(cfg.__dict__)
    data["seeds"] = list(cfg.seeds)
    return data


def verify_experiment(in_dir: Path) -> tuple[dict, int]:
    """Re-check stored traces against the report and the core invariants."""
    import json

    from ..netsim.trace import Trace

    report = json.loads((Path(in_dir) / "report.json").read_text())
    cfg = ExperimentConfig.from_dict({**report["config"],
                                      "seeds": tuple(report["config"]["seeds"])})
    problems: list[str] = []
    checked = 0
    for record in report["per_seed"]:
        seed = record["seed"]
        trace_path = Path(in_dir) / str(seed) / "trace.ndjson"
        if not trace_path.exists():
            continue
        trace = Trace.from_ndjson(trace_path.read_text())
        checked += 1
        if len(trace.corrupted_round()) > cfg.budget:
            problems.append(f"seed {seed}: corruption budget exceeded in trace")
        _o, _i, g_full = build_graphs(trace)
        h = edge_expansion(g_full, weight_bound=cfg.alpha_value)
        if record.get("h_num") is not None and \
                (h.numerator, h.denominator) != (record["h_num"], record["h_den"]):
            problems.append(f"seed {seed}: expansion mismatch")
        outputs = {str(i): trace.outputs[i] for i in sorted(trace.outputs)}
        if outputs != record.get("outputs"):
            problems.append(f"seed {seed}: outputs mismatch")
    summary = {"checked": checked, "problems": problems}
    return summary, 0 if not problems else 1
