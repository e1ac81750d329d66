"""Protocol registry, keyed by string id."""

from __future__ import annotations

from .base import Protocol
from .broadcast import Ring, RunawayToy, StaggeredGossip, StaggeredRing, StrawmanBridge
from .nonexpander import CommitteeBridge, CommitteeBridgeAdaptive, bridge_params

PROTOCOLS: dict[str, type[Protocol]] = {
    cls.id: cls
    for cls in (
        StaggeredGossip,
        StrawmanBridge,
        Ring,
        StaggeredRing,
        RunawayToy,
        CommitteeBridge,
        CommitteeBridgeAdaptive,
    )
}


def make_protocol(pid: str, params: dict | None = None) -> Protocol:
    try:
        cls = PROTOCOLS[pid]
    except KeyError:
        raise KeyError(f"unknown protocol {pid!r}; known: {sorted(PROTOCOLS)}") from None
    return cls(params or {})


__all__ = ["PROTOCOLS", "make_protocol", "Protocol", "bridge_params"]
