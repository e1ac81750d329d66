"""Protocol interface consumed by the round engine.

A protocol is a bundle of pure next-message functions over per-party state:
the engine owns scheduling, delivery and corruption; the protocol owns state
shape, send vectors, receive filters and outputs. Rounds are either plain
message rounds or ideal-functionality rounds served by a trusted host.
"""

from __future__ import annotations

import random
from typing import Any, Callable

MessagePlan = tuple[str]
IdealPlan = tuple[str, str, tuple[int, ...], str]


class Protocol:
    id = "base"

    def __init__(self, params: dict | None = None):
        self.params = params or {}

    # setup --------------------------------------------------------------
    def setup(self, n: int, params: dict, rng: random.Random) -> tuple[list[Any], Any]:
        """Per-party setup strings plus the trusted hosts' common transcript."""
        return [None] * n, None

    def n_rounds(self, n: int, params: dict) -> int:
        raise NotImplementedError

    def round_plan(self, r: int, n: int, params: dict):
        return ("message",)

    # state --------------------------------------------------------------
    def init_state(self, i: int, n: int, params: dict, x: Any, setup: Any,
                   rng: random.Random) -> dict:
        raise NotImplementedError

    def sends(self, state: dict, r: int) -> dict[int, Any]:
        return {}

    def filter(self, state: dict, r: int, sender: int, payload: Any) -> tuple[bool, str]:
        return True, "ok"

    def deliver(self, state: dict, r: int, accepted: list[tuple[int, Any]]) -> None:
        pass

    def output(self, state: dict) -> Any:
        return None

    # ideal rounds ---------------------------------------------------------
    def ideal_input(self, state: dict, fid: str, r: int) -> Any:
        return None

    def ideal_output(self, state: dict, fid: str, r: int, out: Any) -> None:
        pass

    def functionality(self, fid: str) -> Callable:
        raise KeyError(f"{self.id} hosts no functionality {fid!r}")
