"""Channel semantics for the synchronous message functionality.

One round of point-to-point traffic is a two-phase exchange: an input phase
in which the adversary sees mode-dependent leakage on every submitted message
and may still corrupt senders and rewrite their outgoing vectors, and an
output phase that delivers the surviving messages atomically.

Leakage by channel mode, for a message from s to t:

* ``secure``         -- honest t: length only; corrupted t: full content.
* ``authenticated``  -- full content always.
* ``hidden``         -- corrupted t (or corrupted s): full content;
                        honest-to-honest traffic is invisible, not even its
                        existence is reported.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Callable


class ChannelMode(str, enum.Enum):
    SECURE = "secure"
    AUTHENTICATED = "authenticated"
    HIDDEN = "hidden"


@dataclass
class MsgSlot:
    sender: int
    receiver: int
    payload: Any
    virtual: bool = False      # registered by the adversary, not a real send
    dropped: bool = False
    order: tuple = field(default_factory=tuple)


def slot_visibility(mode: ChannelMode, slot: MsgSlot, corrupted: set[int]) -> tuple[bool, Any]:
    """(visible-to-adversary, leaked-payload-or-length)."""
    s_bad = slot.sender in corrupted
    t_bad = slot.receiver in corrupted
    if s_bad or t_bad:
        return True, slot.payload
    if mode is ChannelMode.AUTHENTICATED:
        return True, slot.payload
    if mode is ChannelMode.SECURE:
        return True, _length_of(slot.payload)
    return False, None  # hidden: honest-to-honest traffic does not exist for the adversary


def _length_of(payload: Any) -> int:
    from ..wire import canonical_json

    return len(canonical_json(payload))


def psmt_round(
    sends: dict[int, dict[int, Any]],
    mode: ChannelMode,
    corrupted: set[int],
    on_slot: Callable[[MsgSlot, Any, bool], None] | None = None,
    leak_log: list | None = None,
) -> dict[int, list[tuple[int, Any]]]:
    """Standalone one-round exchange (the engine inlines the same semantics).

    ``on_slot(slot, leaked, visible)`` fires per message in (sender, receiver)
    order, only for slots visible under the channel mode; the hook may flip
    ``slot.dropped`` or rewrite ``slot.payload`` for corrupted senders or
    receivers. Returns the inboxes of the output phase.
    """
    slots = [
        MsgSlot(sender=s, receiver=t, payload=p)
        for s, vec in sends.items()
        for t, p in vec.items()
        if p is not None
    ]
    slots.sort(key=lambda sl: (sl.sender, sl.receiver))
    for slot in slots:
        visible, leaked = slot_visibility(mode, slot, corrupted)
        if visible and leak_log is not None:
            leak_log.append((slot.sender, slot.receiver, leaked))
        if visible and on_slot is not None:
            before = (slot.payload, slot.dropped)
            on_slot(slot, leaked, visible)
            if (slot.payload, slot.dropped) != before:
                if slot.sender not in corrupted and slot.receiver not in corrupted:
                    raise PermissionError(
                        f"adversary touched honest-to-honest slot {slot.sender}->{slot.receiver}"
                    )
    inboxes: dict[int, list[tuple[int, Any]]] = {}
    for slot in slots:
        if slot.dropped:
            continue
        inboxes.setdefault(slot.receiver, []).append((slot.sender, slot.payload))
    return inboxes
