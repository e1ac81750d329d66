"""Adversary registry, keyed by string id."""

from __future__ import annotations

from ..netsim.engine import Adversary, ExecutionInstance
from .plumbing import BridgeMangler, GreedyCorruptor, Passive, SigBreaker, StaticFlooder
from .attacks import CorruptTargetAttack, HonestTargetAttack

ADVERSARIES: dict[str, type[Adversary]] = {
    cls.id: cls
    for cls in (
        Passive,
        StaticFlooder,
        GreedyCorruptor,
        SigBreaker,
        BridgeMangler,
        HonestTargetAttack,
        CorruptTargetAttack,
    )
}


def make_adversary(aid: str, inst: ExecutionInstance, params: dict | None = None) -> Adversary:
    try:
        cls = ADVERSARIES[aid]
    except KeyError:
        raise KeyError(f"unknown adversary {aid!r}; known: {sorted(ADVERSARIES)}") from None
    return cls(inst, params or {})


__all__ = ["ADVERSARIES", "make_adversary"]
