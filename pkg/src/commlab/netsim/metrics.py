"""Communication graphs and locality, rebuilt from traces.

Three graphs per run:

* outgoing -- directed edges (i, j) where i, honest at the send, sent to j;
* incoming -- directed edges (i, j) where j, honest at the receipt, processed
  a message from i;
* full -- the undirected union, the object all expansion metrics consume.

Honesty is judged against adversarial corruption events only; post-execution
corruptions never affect the graphs (they happen after the graphs freeze).
A party corrupted during round r's input window counts as corrupted for its
round-r sends by default ("window" rule): corrupt-before-delivery lets the
adversary rewrite that vector, so it is not attributable to the party as
honest. The "at_send" rule instead keeps round-r sends of a party corrupted
mid-window.
"""

from __future__ import annotations

from ..graphs import CommGraph
from .engine import UndefinedLocality
from .trace import Trace

_INF = 10**9


def build_graphs(
    trace: Trace,
    g_out_rule: str = "window",
) -> tuple[set[tuple[int, int]], set[tuple[int, int]], CommGraph]:
    if g_out_rule not in ("window", "at_send"):
        raise ValueError(f"unknown honesty rule {g_out_rule!r}")
    corrupted_round = trace.corrupted_round(include_pec=False)

    def honest_sender(i: int, r: int) -> bool:
        cr = corrupted_round.get(i, _INF)
        return cr > r if g_out_rule == "window" else cr >= r

    def honest_receiver(j: int, r: int) -> bool:
        return corrupted_round.get(j, _INF) > r

    g_out: set[tuple[int, int]] = set()
    g_in: set[tuple[int, int]] = set()
    for ev in trace.events:
        if ev.kind == "send" and honest_sender(ev.sender, ev.round):
            g_out.add((ev.sender, ev.receiver))
        elif ev.kind == "processed" and honest_receiver(ev.receiver, ev.round):
            g_in.add((ev.sender, ev.receiver))
    und = {(min(a, b), max(a, b)) for a, b in g_out | g_in}
    return g_out, g_in, CommGraph.from_edges(trace.n, und)


def honest_at_end(trace: Trace) -> set[int]:
    corrupted = set(trace.corrupted_round(include_pec=False))
    return set(range(trace.n)) - corrupted


def locality(trace: Trace, g_out_rule: str = "window") -> tuple[dict[int, int], int]:
    """Per-honest-party counterparty counts and their maximum."""
    g_out, g_in, _ = build_graphs(trace, g_out_rule)
    honest = honest_at_end(trace)
    if not honest:
        raise UndefinedLocality("all parties corrupted")
    per: dict[int, int] = {}
    for i in sorted(honest):
        partners = {j for a, j in g_out if a == i} | {a for a, j in g_in if j == i}
        per[i] = len(partners)
    return per, max(per.values())
