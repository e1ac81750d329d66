"""Event log of one protocol run.

Every run produces a :class:`Trace`: a flat event list ordered by
(round, sub-phase, deterministic intra-phase order) plus the final output
vector. Traces serialize to newline-delimited canonical JSON, and a party's
whole view (input, coin seed, setup digest, per-round processed/sent
messages) can be rebuilt from the trace restricted to that party.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterator

from ..wire import canonical_json

SUBPHASE_ORDER = {"setup": 0, "send": 1, "input": 2, "ideal": 3, "deliver": 4, "output": 5, "pec": 6}


@dataclass(frozen=True)
class SendEvent:
    round: int
    sender: int
    receiver: int
    payload: Any
    kind: str = "send"


@dataclass(frozen=True)
class FilterDropEvent:
    round: int
    receiver: int
    sender: int
    reason: str
    kind: str = "filter_drop"


@dataclass(frozen=True)
class ProcessedEvent:
    round: int
    receiver: int
    sender: int
    payload: Any
    kind: str = "processed"


@dataclass(frozen=True)
class InjectedEvent:
    """Receipt written into a corrupted party's transcript; no matching send."""

    round: int
    receiver: int
    sender: int
    payload: Any
    kind: str = "injected"


@dataclass(frozen=True)
class CorruptEvent:
    round: int
    subphase: str
    party: int
    by: str  # "adversary" | "post-execution"
    kind: str = "corrupt"


@dataclass(frozen=True)
class IdealCallEvent:
    round: int
    functionality: str
    participants: tuple[int, ...]
    mode: str  # "oracle" | "clique"
    kind: str = "ideal_call"


@dataclass(frozen=True)
class OutputEvent:
    round: int
    party: int
    value: Any
    kind: str = "output"


Event = (
    SendEvent
    | FilterDropEvent
    | ProcessedEvent
    | InjectedEvent
    | CorruptEvent
    | IdealCallEvent
    | OutputEvent
)

_KINDS = {
    "send": SendEvent,
    "filter_drop": FilterDropEvent,
    "processed": ProcessedEvent,
    "injected": InjectedEvent,
    "corrupt": CorruptEvent,
    "ideal_call": IdealCallEvent,
    "output": OutputEvent,
}


def _event_to_rec(ev: Event) -> dict:
    rec = dict(ev.__dict__)
    if isinstance(ev, IdealCallEvent):
        rec["participants"] = list(ev.participants)
    return rec


def _event_from_rec(rec: dict) -> Event:
    cls = _KINDS[rec["kind"]]
    kwargs = {k: v for k, v in rec.items() if k != "kind"}
    if cls is IdealCallEvent:
        kwargs["participants"] = tuple(kwargs["participants"])
    return cls(**kwargs)


@dataclass
class Trace:
    n: int
    events: list[Event] = field(default_factory=list)
    outputs: dict[int, Any] = field(default_factory=dict)

    def append(self, ev: Event) -> None:
        self.events.append(ev)

    def by_kind(self, kind: str) -> Iterator[Event]:
        return (ev for ev in self.events if ev.kind == kind)

    def corrupted_round(self, include_pec: bool = False) -> dict[int, int]:
        """First corruption round per party (adversarial by default)."""
        out: dict[int, int] = {}
        for ev in self.by_kind("corrupt"):
            if ev.by == "post-execution" and not include_pec:
                continue
            out.setdefault(ev.party, ev.round)
        return out

    def to_ndjson(self) -> str:
        lines = [canonical_json({"header": {"n": self.n}})]
        lines += [canonical_json(_event_to_rec(ev)) for ev in self.events]
        lines.append(canonical_json({"outputs": {str(k): v for k, v in sorted(self.outputs.items())}}))
        return "\n".join(lines) + "\n"

    def to_bytes(self) -> bytes:
        return self.to_ndjson().encode("utf-8")

    @staticmethod
    def from_ndjson(text: str) -> "Trace":
        import json

        lines = [ln for ln in text.splitlines() if ln.strip()]
        header = json.loads(lines[0])["header"]
        trace = Trace(n=header["n"])
        for ln in lines[1:]:
            rec = json.loads(ln)
            if "outputs" in rec:
                trace.outputs = {int(k): v for k, v in rec["outputs"].items()}
            else:
                trace.append(_event_from_rec(rec))
        return trace


def party_view(trace: Trace, party: int, input_value: Any, coin_seed: str, setup_digest: str) -> dict:
    """The party's whole view, rebuilt from its trace slice."""
    rounds: dict[int, dict[str, list]] = {}

    def bucket(r: int) -> dict[str, list]:
        return rounds.setdefault(r, {"processed": [], "sent": []})

    for ev in trace.events:
        if ev.kind == "send" and ev.sender == party:
            bucket(ev.round)["sent"].append([ev.receiver, ev.payload])
        elif ev.kind in ("processed", "injected") and ev.receiver == party:
            bucket(ev.round)["processed"].append([ev.sender, ev.payload])
    return {
        "party": party,
        "input": input_value,
        "coins": coin_seed,
        "setup": setup_digest,
        "rounds": {str(r): rounds[r] for r in sorted(rounds)},
        "output": trace.outputs.get(party),
    }


def party_view_bytes(trace: Trace, party: int, input_value: Any, coin_seed: str,
                     setup_digest: str) -> bytes:
    return canonical_json(party_view(trace, party, input_value, coin_seed, setup_digest)).encode()
