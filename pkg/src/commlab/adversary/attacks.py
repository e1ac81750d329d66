"""Isolation attacks around a random target party.

Both strategies pick a target uniformly and run two honest virtual
executions derived from the instance seed: the red one, in which the real
parties interact with a simulated stand-in for the target running on a fake
input, and the blue one, in which the real target interacts with simulated
peers on fake inputs. Phase one keeps every real party inside its virtual
world; phase two starts when the stand-in's red-side degree reaches
beta*n/4, computes the low-weight-cut partition of the red graph without the
target, and from then on crossings between partition classes are blocked by
corrupting recipients, each class pair only until alpha crossing edges have
formed; phase three starts when the real target's degree reaches the
threshold and merges the target into the class it is already wired to.

``attack_honest_target`` keeps the target honest and spends corruptions on
its counterparties; ``attack_corrupt_target`` corrupts only the target in
phase one and replays the same story from inside.

Failure outcomes (blue crossing first, corruption budget exhausted, partition
unavailable) are recorded results: the adversary stops escalating, keeps the
send policies of already-corrupted parties, and lets the run finish.
"""

from __future__ import annotations

import copy
import logging
import math
from dataclasses import dataclass, field
from typing import Any

from ..graphs import CommGraph, PartitionPreconditionError, alpha_d_partition, enumerate_cuts
from ..netsim.engine import Adversary, EngineControl, ExecutionInstance
from ..netsim.metrics import build_graphs, honest_at_end
from ..netsim.psmt import MsgSlot
from ..netsim.trace import Trace
from ..wire import canonical_json
from .events import (
    degree_threshold,
    detect_events,
    pick_target,
    red_blue_sims,
)

logger = logging.getLogger(__name__)

DEFAULT_CUT_CAP = 64


def default_alpha(n: int) -> int:
    return math.isqrt(n - 1) + 1  # ceil(sqrt(n)) for non-square n


def choose_island_count(beta: float) -> int:
    """Smallest integer c with (beta/4)/2 >= 1/c."""
    beta1 = beta / 4
    return max(2, math.ceil(2 / beta1))


@dataclass
class AttackReport:
    target: int
    alpha: int
    c: int
    threshold: float
    phase2_at: tuple[int, int] | None = None
    phase3_at: tuple[int, int] | None = None
    corrupted: list[int] = field(default_factory=list)
    ledger: dict[str, list[int]] = field(default_factory=lambda: {"red": [], "blue": [], "island": []})
    partition1: list[list[int]] | None = None
    partition2: list[list[int]] | None = None
    pair_edges: dict[str, int] = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)
    e1: bool | None = None
    e2: bool | None = None
    final_cut: list[int] | None = None
    final_cut_weight: int | None = None
    succeeded_to_phase3: bool = False

    def to_json(self) -> str:
        return canonical_json(self.__dict__ | {"phase2_at": list(self.phase2_at) if self.phase2_at else None,
                                               "phase3_at": list(self.phase3_at) if self.phase3_at else None})


def final_cut_record(trace: Trace, alpha: int) -> tuple[list[int] | None, int | None]:
    """Canonical smallest low-weight cut of the final graph, or none.

    The first cut in (weight, side) enumeration order is the global minimum;
    it is the record exactly when its weight is within alpha.
    """
    _o, _i, g_full = build_graphs(trace)
    first = next(iter(enumerate_cuts(g_full)), None)
    if first is not None and first.weight <= alpha:
        return list(first.side), first.weight
    return None, None


class _IsolationAttack(Adversary):
    """Shared machinery; subclasses choose who gets corrupted in phase one."""

    corrupt_target_mode = False

    def __init__(self, inst: ExecutionInstance, params: dict | None = None):
        super().__init__(inst, params)
        n = inst.n
        self.beta = self.params.get("beta", inst.budget / n if n else 0.0)
        self.alpha = int(self.params.get("alpha", default_alpha(n)))
        self.c = int(self.params.get("c", choose_island_count(self.beta)))
        self.cut_cap = int(self.params.get("cut_cap", DEFAULT_CUT_CAP))
        self.istar = int(self.params.get("istar", pick_target(inst)))
        self.theta = degree_threshold(self.beta, n)
        self.red, self.blue = red_blue_sims(inst, self.istar)
        self.phase = 1
        self.failed = False
        self.event_seq = 0
        self.red_neighbors: set[int] = set()
        self.blue_out_neighbors: set[int] = set()
        self.real_neighbors: set[int] = set()
        self.partition_parts: list[set[int]] | None = None
        self.island_of: dict[int, int] = {}
        self.pair_edges: dict[tuple[int, int], set[tuple[int, int]]] = {}
        self.frozen_state: Any = None
        self.report = AttackReport(target=self.istar, alpha=self.alpha, c=self.c,
                                   threshold=self.theta)

    # -- bookkeeping -------------------------------------------------------

    def _fail(self, why: str) -> None:
        if why not in self.report.failures:
            self.report.failures.append(why)
        self.failed = True

    def _corrupt(self, i: int, ledger: str, ctl: EngineControl) -> bool:
        if ctl.is_corrupted(i):
            return True
        if self.failed or not ctl.can_corrupt(i):
            if not self.failed:
                self._fail("budget-exhausted")
            return False
        ctl.corrupt(i)
        self.report.corrupted.append(i)
        self.report.ledger[ledger].append(i)
        return True

    def _stamp(self) -> tuple[int, int]:
        return (self._round, self.event_seq)

    def _pair_key(self, a: int, b: int) -> tuple[int, int] | None:
        ka, kb = self.island_of.get(a), self.island_of.get(b)
        if ka is None or kb is None or ka == kb:
            return None
        return (min(ka, kb), max(ka, kb))

    def _pair_active(self, key: tuple[int, int]) -> bool:
        return len(self.pair_edges.get(key, ())) < self.alpha

    def _note_edge(self, key: tuple[int, int], a: int, b: int) -> None:
        self.pair_edges.setdefault(key, set()).add((min(a, b), max(a, b)))

    # -- phase transitions ----------------------------------------------------

    def _maybe_enter_phase2(self, ctl: EngineControl) -> None:
        if self.phase != 1 or self.failed:
            return
        if len(self.red_neighbors) < self.theta:
            return
        self.phase = 2
        self.report.phase2_at = self._stamp()
        red_graph = CommGraph.from_edges(self.inst.n, self.red.graph_edges())
        shrunk, keep = red_graph.without_vertex(self.istar)
        try:
            part = alpha_d_partition(shrunk, self.alpha, self.c, max_cuts=self.cut_cap)
        except (PartitionPreconditionError, ValueError) as exc:
            logger.info("partition unavailable at phase two: %s", exc)
            self._fail("partition-failed")
            return
        self.partition_parts = [set(keep[v] for v in piece) for piece in part.parts]
        self.report.partition1 = [sorted(p) for p in self.partition_parts]
        for idx, piece in enumerate(self.partition_parts):
            for v in piece:
                self.island_of[v] = idx

    def _maybe_enter_phase3(self, ctl: EngineControl) -> None:
        if self.phase != 2 or self.failed:
            return
        if len(self.real_neighbors) < self.theta:
            return
        self.phase = 3
        self.report.phase3_at = self._stamp()
        self.report.succeeded_to_phase3 = True
        best, best_hits = 0, -1
        for idx, piece in enumerate(self.partition_parts or []):
            hits = len(self.real_neighbors & piece)
            if hits > best_hits:
                best, best_hits = idx, hits
        if self.partition_parts is not None:
            if best_hits <= self.alpha:
                logger.info("target joins class %d with only %d wired edges", best, best_hits)
            self.partition_parts[best].add(self.istar)
            self.island_of[self.istar] = best
            self.report.partition2 = [sorted(p) for p in self.partition_parts]

    # -- engine hooks ------------------------------------------------------------

    def attach(self, ctl: EngineControl) -> None:
        super().attach(ctl)
        self._round = 0
        if self.corrupt_target_mode:
            if not self._corrupt(self.istar, "red", ctl):
                self._fail("cannot-corrupt-target")

    def round_begin(self, r: int, ctl: EngineControl) -> list[MsgSlot]:
        self._round = r
        if self.phase == 1 and self.frozen_state is None:
            # candidate freeze point: the blue view before this round runs
            self._blue_snapshot = copy.deepcopy(self.blue.states[self.istar])
            self._blue_snapshot_round = r - 1
        self.red.step()
        self.blue.step()
        slots: list[MsgSlot] = []
        if self.corrupt_target_mode or self.failed:
            return slots
        if self.phase == 1:
            for t, payload in sorted(self.red.sends_of(self.istar, r).items()):
                slots.append(MsgSlot(sender=self.istar, receiver=t, payload=payload,
                                     virtual=True, order=("red_out",)))
            for j in range(self.inst.n):
                if j == self.istar:
                    continue
                vec = self.blue.sends_of(j, r)
                if self.istar in vec:
                    slots.append(MsgSlot(sender=j, receiver=self.istar,
                                         payload=vec[self.istar], virtual=True,
                                         order=("blue_in",)))
        return slots

    def corrupted_sends(self, i: int, r: int, default: dict[int, Any],
                        ctl: EngineControl) -> dict[int, Any]:
        if i == self.istar and self.corrupt_target_mode:
            return self._target_sends(r)
        vec = dict(default)
        if not self.corrupt_target_mode and self.istar in vec:
            # the real target lives in the blue world; red-side traffic to it
            # travels only inside the red simulation
            del vec[self.istar]
        if self.phase >= 2 and not self.failed:
            for t in sorted(vec):
                key = self._pair_key(i, t)
                if key is not None and self._pair_active(key):
                    del vec[t]
        return vec

    def _target_sends(self, r: int) -> dict[int, Any]:
        if self.phase == 1 and self.frozen_state is None:
            return dict(self.red.sends_of(self.istar, r))
        if self.frozen_state is None:
            # the blue view frozen when phase one ended; from here the target's
            # machine runs forward receiving nothing
            self.frozen_state = self._blue_snapshot
            self._frozen_round = self._blue_snapshot_round
        proto = self.blue.protocol
        while self._frozen_round < r - 1:
            self._frozen_round += 1
            proto.deliver(self.frozen_state, self._frozen_round, [])
        vec = {t: p for t, p in sorted(proto.sends(self.frozen_state, r).items())
               if p is not None and t != self.istar}
        proto.deliver(self.frozen_state, r, [])
        self._frozen_round = r
        for t in sorted(vec):
            if self._pair_key(self.istar, t) is not None:
                del vec[t]  # the controlled target never talks across classes
        return vec

    def on_slot(self, slot: MsgSlot, leaked: Any, ctl: EngineControl) -> None:
        self.event_seq += 1
        if slot.virtual:
            self._handle_virtual(slot, ctl)
            return
        s, t = slot.sender, slot.receiver
        adjacent = self.istar in (s, t)
        if self.failed:
            if self.phase >= 2:
                self._count_crossing(slot, ctl, block=False)
            if adjacent:
                self._track_adjacent(s, t, delivered=not slot.dropped)
                self._transitions(ctl)
            return
        if self.phase == 1:
            if not adjacent:
                return
            if t == self.istar and not self.corrupt_target_mode:
                # red-side sender: corrupt, retract, let the simulation carry it
                if self._corrupt(s, "red", ctl):
                    ctl.drop(slot)
                self.red_neighbors.add(s)
            elif t == self.istar:
                self.red_neighbors.add(s)
                self.real_neighbors.add(s)
            elif s == self.istar and not self.corrupt_target_mode:
                # blue-side recipient: corrupt so the message is ignored
                if self._corrupt(t, "blue", ctl):
                    ctl.drop(slot)
                self.blue_out_neighbors.add(t)
                self.real_neighbors.add(t)
            else:  # controlled target speaking red
                self.red_neighbors.add(t)
                self.real_neighbors.add(t)
            self._transitions(ctl)
            return
        # phases two and three
        if adjacent and self.phase == 2 and s == self.istar and not self.corrupt_target_mode:
            if self._corrupt(t, "blue", ctl):
                ctl.drop(slot)
            self.blue_out_neighbors.add(t)
            self.real_neighbors.add(t)
            self._transitions(ctl)
            return
        self._count_crossing(slot, ctl, block=True)
        if adjacent:
            self._track_adjacent(s, t, delivered=not slot.dropped)
            self._transitions(ctl)

    def _handle_virtual(self, slot: MsgSlot, ctl: EngineControl) -> None:
        if self.failed or self.phase != 1:
            slot.dropped = True
            return
        if slot.order == ("red_out",):
            t = slot.receiver
            if self._corrupt(t, "red", ctl):
                ctl.inject_receipt(t, self.istar, slot.payload)
            self.red_neighbors.add(t)
            self._transitions(ctl)
        elif slot.order == ("blue_in",):
            s = slot.sender
            if self._corrupt(s, "blue", ctl):
                slot.virtual = False  # becomes a real wire message to the target
            self.real_neighbors.add(s)
            self._transitions(ctl)

    def _track_adjacent(self, s: int, t: int, delivered: bool) -> None:
        other = t if s == self.istar else s
        if s == self.istar and (not self.corrupt_target_mode or delivered):
            self.real_neighbors.add(other)
        elif t == self.istar:
            if self.corrupt_target_mode:
                self.red_neighbors.add(other)
            self.real_neighbors.add(other)

    def _count_crossing(self, slot: MsgSlot, ctl: EngineControl, block: bool) -> None:
        s, t = slot.sender, slot.receiver
        key = self._pair_key(s, t)
        if key is None:
            return
        sender_honest = not ctl.is_corrupted(s)
        if self._pair_active(key) and block and not self.failed:
            if t == self.istar and not self.corrupt_target_mode:
                # cannot corrupt the honest target: silence the sender instead
                if self._corrupt(s, "island", ctl):
                    ctl.drop(slot)
                    sender_honest = False
            elif ctl.is_corrupted(t):
                ctl.drop(slot)
            else:
                if self._corrupt(t, "island", ctl):
                    ctl.drop(slot)
        if sender_honest:
            self._note_edge(key, s, t)

    def _transitions(self, ctl: EngineControl) -> None:
        self._maybe_enter_phase2(ctl)
        self._maybe_enter_phase3(ctl)

    def puppet_accepts(self, r, receiver, sender, payload):
        if receiver == self.istar and self.corrupt_target_mode:
            return None  # puppet state evolves normally; its sends are overridden
        key = self._pair_key(sender, receiver)
        if key is not None and self._pair_active(key) and not self.failed:
            return False
        return None

    def round_end(self, r: int, ctl: EngineControl) -> None:
        if self.phase == 1 and not self.failed:
            if self.blue.degree(self.istar) >= self.theta:
                self._fail("blue-crossed-first")

    def finished(self, trace: Trace, ctl: EngineControl) -> None:
        flags = detect_events(self.red, self.blue, self.beta, self.istar)
        self.report.e1, self.report.e2 = flags.e1, flags.e2
        self.report.pair_edges = {f"{a}-{b}": len(edges)
                                  for (a, b), edges in sorted(self.pair_edges.items())}
        cut, weight = final_cut_record(trace, self.alpha)
        self.report.final_cut = cut
        self.report.final_cut_weight = weight


class HonestTargetAttack(_IsolationAttack):
    id = "attack_honest_target"
    corrupt_target_mode = False


class CorruptTargetAttack(_IsolationAttack):
    id = "attack_corrupt_target"
    corrupt_target_mode = True


def run_attack(inst: ExecutionInstance) -> tuple[Trace, AttackReport]:
    """Run the instance and hand back the trace plus the attack report."""
    from ..netsim.engine import run_instance

    holder: list = []
    trace = run_instance(inst, adversary_out=holder)
    adversary = holder[0]
    if not isinstance(adversary, _IsolationAttack):
        raise ValueError(f"instance adversary {inst.adversary!r} is not an isolation attack")
    return trace, adversary.report


@dataclass(frozen=True)
class ViewIndependence:
    status: str  # "independent" | "dependent" | "incomparable"
    detail: str
    compared_parties: tuple[int, ...] = ()


def view_independence_check(
    protocol: str,
    seed: int,
    istar: int,
    inputs_a,
    inputs_b,
    n: int,
    budget: int,
    protocol_params: dict | None = None,
    attack_params: dict | None = None,
    kappa: int = 16,
) -> ViewIndependence:
    """Byte-compare far-side honest views across two runs differing only at
    the target's input, both under the corrupt-target strategy.

    Comparable means: same phase stamps, same failure flags, same corrupted
    set and the same non-empty final-cut record. On comparable runs the check
    passes iff every honest party on the far side of the final cut has a
    byte-identical view.
    """
    inputs_a, inputs_b = tuple(inputs_a), tuple(inputs_b)
    if len(inputs_a) != n or len(inputs_b) != n:
        raise ValueError("input vectors must have length n")
    diff = [i for i in range(n) if inputs_a[i] != inputs_b[i]]
    if diff not in ([], [istar]):
        raise ValueError(f"vectors may differ only at the target, differ at {diff}")
    params = dict(attack_params or {})
    params["istar"] = istar

    def one(inputs):
        inst = ExecutionInstance(protocol=protocol, n=n, inputs=inputs, seed=seed,
                                 protocol_params=dict(protocol_params or {}),
                                 adversary="attack_corrupt_target",
                                 adversary_params=params, budget=budget, kappa=kappa)
        trace, report = run_attack(inst)
        return inst, trace, report

    inst_a, trace_a, rep_a = one(inputs_a)
    inst_b, trace_b, rep_b = one(inputs_b)
    for fieldname in ("phase2_at", "phase3_at", "failures", "corrupted", "final_cut"):
        if getattr(rep_a, fieldname) != getattr(rep_b, fieldname):
            return ViewIndependence("incomparable", f"{fieldname} diverges")
    if rep_a.final_cut is None:
        return ViewIndependence("incomparable", "no low-weight cut survived")
    near = set(rep_a.final_cut) if istar in rep_a.final_cut else (
        set(range(n)) - set(rep_a.final_cut))
    far = sorted(set(range(n)) - near)
    honest = honest_at_end(trace_a) & honest_at_end(trace_b)
    compared = tuple(j for j in far if j in honest)
    if not compared:
        return ViewIndependence("incomparable", "no honest party across the cut")
    from ..netsim.trace import party_view_bytes

    for j in compared:
        va = party_view_bytes(trace_a, j, inst_a.inputs[j], inst_a.party_seed_hex(j), "")
        vb = party_view_bytes(trace_b, j, inst_b.inputs[j], inst_b.party_seed_hex(j), "")
        if va != vb:
            return ViewIndependence("dependent", f"party {j} sees the target's input",
                                    compared)
    return ViewIndependence("independent", f"{len(compared)} far-side views identical",
                            compared)
