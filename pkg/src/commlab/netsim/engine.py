"""Deterministic synchronous round engine.

One run is a pure function of its :class:`ExecutionInstance`: party coins are
keyed sub-streams of the master seed, rounds execute in a fixed order, and
the adversary's per-message hooks fire in (sender, receiver) order inside
each round's exchange window. Corrupted parties keep executing the protocol
as puppets; the adversary may rewrite their outgoing vectors, force their
receive filters, and write receipts into their transcripts.

Round structure (matching the synchronous model):

1. send sub-phase: every party's next-message vector is computed;
2. input window: leakage per channel mode, per-slot adversary hook, adaptive
   corruption with corrupt-before-delivery semantics;
3. output phase: surviving messages are delivered atomically, receivers
   filter then process them.

Ideal-functionality rounds replace the exchange: participants submit inputs
(the adversary substitutes for corrupted ones), a trusted host computes, and
outputs are applied; in ``clique`` accounting mode the call contributes the
participant clique to the communication graph, in ``oracle`` mode nothing.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field, replace
from typing import Any

from .psmt import ChannelMode, MsgSlot, slot_visibility
from .trace import (
    CorruptEvent,
    FilterDropEvent,
    IdealCallEvent,
    InjectedEvent,
    OutputEvent,
    ProcessedEvent,
    SendEvent,
    Trace,
)


class BudgetExceeded(Exception):
    pass


class ProtocolViolation(Exception):
    pass


class RunawayProtocol(Exception):
    pass


class UndefinedLocality(Exception):
    pass


def derive_seed(master: int, label: str) -> int:
    digest = hashlib.sha256(f"{master}|{label}".encode()).digest()
    return int.from_bytes(digest[:16], "little")


def derive_rng(master: int, label: str) -> random.Random:
    return random.Random(derive_seed(master, label))


@dataclass(frozen=True)
class ExecutionInstance:
    """Full parameterization of one run; equal instances give equal traces."""

    protocol: str
    n: int
    inputs: tuple
    seed: int
    protocol_params: dict = field(default_factory=dict)
    adversary: str = "passive"
    adversary_params: dict = field(default_factory=dict)
    aux: Any = None
    static_corruptions: tuple[int, ...] = ()
    budget: int = 0
    kappa: int = 16
    channel_mode: ChannelMode = ChannelMode.SECURE
    max_rounds: int = 4096
    coin_labels: dict = field(default_factory=dict)  # party -> label override
    pec_corruptions: tuple[int, ...] = ()

    def party_label(self, i: int) -> str:
        return self.coin_labels.get(i, f"party/{i}")

    def party_rng(self, i: int) -> random.Random:
        return derive_rng(self.seed, self.party_label(i))

    def party_seed_hex(self, i: int) -> str:
        return f"{derive_seed(self.seed, self.party_label(i)):032x}"

    def adv_rng(self, label: str = "main") -> random.Random:
        return derive_rng(self.seed, f"adv/{label}")

    def func_rng(self, fid: str, call_no: int) -> random.Random:
        return derive_rng(self.seed, f"func/{fid}/{call_no}")

    def setup_rng(self) -> random.Random:
        return derive_rng(self.seed, "setup")

    def with_inputs(self, inputs) -> "ExecutionInstance":
        return replace(self, inputs=tuple(inputs))


class EngineControl:
    """Adversary-facing handle: corruption, message tampering, injections."""

    def __init__(self, engine: "Engine"):
        self._e = engine

    @property
    def round(self) -> int:
        return self._e.round

    @property
    def n(self) -> int:
        return self._e.inst.n

    def is_corrupted(self, i: int) -> bool:
        return i in self._e.corrupted

    def corrupted_set(self) -> frozenset[int]:
        return frozenset(self._e.corrupted)

    def budget_left(self) -> int:
        return self._e.inst.budget - len(self._e.corrupted)

    def can_corrupt(self, i: int) -> bool:
        return i in self._e.corrupted or self.budget_left() > 0

    def corrupt(self, i: int, subphase: str = "input") -> None:
        self._e.corrupt(i, subphase)

    def drop(self, slot: MsgSlot) -> None:
        self._e.drop_slot(slot)

    def replace(self, slot: MsgSlot, payload: Any) -> None:
        if slot.sender not in self._e.corrupted:
            raise ProtocolViolation(f"cannot rewrite message of honest sender {slot.sender}")
        slot.payload = payload

    def inject_receipt(self, receiver: int, sender: int, payload: Any) -> None:
        if receiver not in self._e.corrupted:
            raise ProtocolViolation(f"cannot write transcript of honest party {receiver}")
        self._e.injected.setdefault(receiver, []).append((sender, payload))

    def state_of(self, i: int) -> Any:
        if i not in self._e.corrupted:
            raise ProtocolViolation(f"cannot read state of honest party {i}")
        return self._e.states[i]

    def set_state(self, i: int, state: Any) -> None:
        if i not in self._e.corrupted:
            raise ProtocolViolation(f"cannot write state of honest party {i}")
        self._e.states[i] = state


class Adversary:
    """Base strategy: passive. Hooks fire in deterministic engine order."""

    def __init__(self, inst: ExecutionInstance, params: dict | None = None):
        self.inst = inst
        self.params = params or {}

    def attach(self, ctl: EngineControl) -> None:
        for i in self.inst.static_corruptions:
            ctl.corrupt(i, subphase="setup")

    def round_begin(self, r: int, ctl: EngineControl) -> list[MsgSlot]:
        return []

    def corrupted_sends(self, i: int, r: int, default: dict[int, Any],
                        ctl: EngineControl) -> dict[int, Any]:
        return default

    def on_slot(self, slot: MsgSlot, leaked: Any, ctl: EngineControl) -> None:
        pass

    def puppet_accepts(self, r: int, receiver: int, sender: int, payload: Any) -> bool | None:
        return None

    def ideal_inputs(self, fid: str, r: int, defaults: dict[int, Any],
                     ctl: EngineControl) -> dict[int, Any]:
        return defaults

    def ideal_outputs(self, fid: str, r: int, outputs: dict[int, Any],
                      ctl: EngineControl) -> None:
        pass

    def round_end(self, r: int, ctl: EngineControl) -> None:
        pass

    def finished(self, trace: Trace, ctl: EngineControl) -> None:
        pass


class Engine:
    def __init__(self, inst: ExecutionInstance, protocol, adversary: Adversary,
                 leak_log: list | None = None):
        self.inst = inst
        self.protocol = protocol
        self.adversary = adversary
        self.leak_log = leak_log
        self.trace = Trace(n=inst.n)
        self.corrupted: set[int] = set()
        self.states: list[Any] = []
        self.injected: dict[int, list[tuple[int, Any]]] = {}
        self.round = 0
        self.ideal_calls = 0
        self._pending_drops: list[MsgSlot] = []

    # -- corruption ----------------------------------------------------------

    def corrupt(self, i: int, subphase: str) -> None:
        if i in self.corrupted:
            return
        if not 0 <= i < self.inst.n:
            raise ValueError(f"no party {i}")
        if len(self.corrupted) + 1 > self.inst.budget:
            raise BudgetExceeded(
                f"corruption #{len(self.corrupted) + 1} exceeds budget {self.inst.budget}"
            )
        self.corrupted.add(i)
        self.trace.append(CorruptEvent(round=self.round, subphase=subphase, party=i,
                                       by="adversary"))

    def drop_slot(self, slot: MsgSlot) -> None:
        if slot.virtual:
            slot.dropped = True
            return
        if slot.sender in self.corrupted:
            slot.dropped = True          # retraction: the message never existed
        elif slot.receiver in self.corrupted:
            slot.dropped = False         # delivered but force-filtered
            self._pending_drops.append(slot)
        else:
            raise ProtocolViolation(
                f"cannot block honest-to-honest message {slot.sender}->{slot.receiver}"
            )

    # -- run -------------------------------------------------------------------

    def run(self) -> Trace:
        inst, proto = self.inst, self.protocol
        n = inst.n
        setups, self.common_setup = proto.setup(n, inst.protocol_params, inst.setup_rng())
        total_rounds = proto.n_rounds(n, inst.protocol_params)
        if total_rounds > inst.max_rounds:
            raise RunawayProtocol(f"{total_rounds} rounds exceed guard {inst.max_rounds}")
        self.states = [
            proto.init_state(i, n, inst.protocol_params, inst.inputs[i], setups[i],
                             inst.party_rng(i))
            for i in range(n)
        ]
        ctl = EngineControl(self)
        self.adversary.attach(ctl)
        for r in range(1, total_rounds + 1):
            self.round = r
            plan = proto.round_plan(r, n, inst.protocol_params)
            if plan[0] == "ideal":
                self._ideal_round(r, plan, ctl)
            else:
                self._message_round(r, ctl)
            self.adversary.round_end(r, ctl)
        self.round = total_rounds + 1
        for i in range(n):
            if i in self.corrupted:
                continue
            value = proto.output(self.states[i])
            self.trace.outputs[i] = value
            self.trace.append(OutputEvent(round=self.round, party=i, value=value))
        for i in self.inst.pec_corruptions:
            self.trace.append(
                CorruptEvent(round=self.round, subphase="pec", party=i, by="post-execution")
            )
        self.adversary.finished(self.trace, ctl)
        return self.trace

    # -- rounds ----------------------------------------------------------------

    def _message_round(self, r: int, ctl: EngineControl) -> None:
        inst, proto = self.inst, self.protocol
        n = inst.n
        self.injected = {}
        self._pending_drops = []
        extra = self.adversary.round_begin(r, ctl)
        slots: list[MsgSlot] = []
        for i in range(n):
            vec = proto.sends(self.states[i], r)
            if i in self.corrupted:
                vec = self.adversary.corrupted_sends(i, r, vec, ctl)
            for t, payload in sorted(vec.items()):
                if payload is None or t == i:
                    continue
                if not 0 <= t < n:
                    raise ProtocolViolation(f"party {i} sends to nonexistent {t}")
                slots.append(MsgSlot(sender=i, receiver=t, payload=payload))
        slots.extend(extra)
        slots.sort(key=lambda sl: (sl.sender, sl.receiver, sl.virtual))
        for slot in slots:
            if slot.virtual:
                self.adversary.on_slot(slot, slot.payload, ctl)
                continue
            visible, leaked = slot_visibility(inst.channel_mode, slot, self.corrupted)
            if not visible:
                continue
            if self.leak_log is not None:
                self.leak_log.append((r, slot.sender, slot.receiver, leaked))
            self.adversary.on_slot(slot, leaked, ctl)
        forced = {(sl.sender, sl.receiver) for sl in self._pending_drops}
        inboxes: dict[int, list[tuple[int, Any]]] = {i: [] for i in range(n)}
        for slot in slots:
            if slot.virtual or slot.dropped:
                continue
            self.trace.append(SendEvent(round=r, sender=slot.sender, receiver=slot.receiver,
                                        payload=slot.payload))
            inboxes[slot.receiver].append((slot.sender, slot.payload))
        for i in range(n):
            accepted: list[tuple[int, Any]] = []
            for sender, payload in inboxes[i]:
                verdict: bool | None = None
                reason = "filter"
                if (sender, i) in forced:
                    verdict, reason = False, "blocked"
                elif i in self.corrupted:
                    verdict = self.adversary.puppet_accepts(r, i, sender, payload)
                if verdict is None:
                    ok, why = proto.filter(self.states[i], r, sender, payload)
                    verdict, reason = ok, why
                if verdict:
                    self.trace.append(ProcessedEvent(round=r, receiver=i, sender=sender,
                                                     payload=payload))
                    accepted.append((sender, payload))
                else:
                    self.trace.append(FilterDropEvent(round=r, receiver=i, sender=sender,
                                                      reason=reason))
            for sender, payload in self.injected.get(i, []):
                self.trace.append(InjectedEvent(round=r, receiver=i, sender=sender,
                                                payload=payload))
                accepted.append((sender, payload))
            proto.deliver(self.states[i], r, accepted)

    def _ideal_round(self, r: int, plan: tuple, ctl: EngineControl) -> None:
        _tag, fid, participants, mode = plan
        inst, proto = self.inst, self.protocol
        participants = tuple(participants)
        defaults = {
            i: proto.ideal_input(self.states[i], fid, r)
            for i in participants
            if i in self.corrupted
        }
        substituted = self.adversary.ideal_inputs(fid, r, dict(defaults), ctl)
        inputs = {}
        for i in participants:
            if i in self.corrupted:
                inputs[i] = substituted.get(i, defaults.get(i))
            else:
                inputs[i] = proto.ideal_input(self.states[i], fid, r)
        host = proto.functionality(fid)
        rng = inst.func_rng(fid, self.ideal_calls)
        self.ideal_calls += 1
        outputs = host(inputs, participants, self.common_setup, inst, rng)
        self.trace.append(IdealCallEvent(round=r, functionality=fid,
                                         participants=participants, mode=mode))
        if mode == "clique":
            for i in participants:
                for j in participants:
                    if i == j:
                        continue
                    self.trace.append(SendEvent(round=r, sender=i, receiver=j,
                                                payload={"ideal": fid}))
            for i in participants:
                for j in participants:
                    if i == j:
                        continue
                    self.trace.append(ProcessedEvent(round=r, receiver=j, sender=i,
                                                     payload={"ideal": fid}))
        self.adversary.ideal_outputs(
            fid, r, {i: outputs.get(i) for i in participants if i in self.corrupted}, ctl
        )
        for i in participants:
            proto.ideal_output(self.states[i], fid, r, outputs.get(i))


def run_instance(inst: ExecutionInstance, leak_log: list | None = None,
                 adversary_out: list | None = None) -> Trace:
    """Replay the instance to termination and return its trace.

    ``leak_log`` (optional) collects the adversary-visible leakage feed;
    ``adversary_out`` (optional) receives the adversary object, whose
    strategy-specific report outlives the run.
    """
    from ..adversary import make_adversary
    from ..protocols import make_protocol

    protocol = make_protocol(inst.protocol, inst.protocol_params)
    adversary = make_adversary(inst.adversary, inst, inst.adversary_params)
    if adversary_out is not None:
        adversary_out.append(adversary)
    engine = Engine(inst, protocol, adversary, leak_log=leak_log)
    return engine.run()
