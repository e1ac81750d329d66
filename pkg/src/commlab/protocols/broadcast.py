"""Broadcast-style targets and toy protocols.

``staggered gossip`` (id ``flooding``) is the all-claims broadcast used as the
isolation-attack target: parties wake up at a geometrically distributed
activation round, gossip their claim set to one random contact, and a final
all-to-all pair of rounds pins down validity and agreement deterministically
on honest runs. The staggering spreads out the round in which each party's
communication degree first crosses a threshold, which is what the attack
statistics sample.

``strawman_bridge`` keeps two intra-half cliques connected by k fixed bridge
pairs: honest runs satisfy the broadcast contract while the full graph keeps
a weight-k cut, making it the canonical low-cut counterexample target.

Claim sets merge first-wins: the earliest processed claim for a coordinate
sticks. Honest runs only ever carry true claims, so outputs agree and are
valid; under attack the lock-in is what keeps planted claims stable.
"""

from __future__ import annotations

import math
import random
from typing import Any

from .base import Protocol

GOSSIP_GEOM_P = 0.05
GOSSIP_ACT_CAP = 120
GOSSIP_STRIDE = 4


def geometric_round(rng: random.Random, p: float, cap: int) -> int:
    u = rng.random()
    if u >= 1.0:
        return 1 + cap
    g = int(math.log1p(-u) / math.log1p(-p))
    return 1 + min(g, cap)


def gossip_schedule(i: int, n: int, rng: random.Random) -> tuple[int, int]:
    """(activation round, contact) for party i; consumes exactly two draws."""
    act = geometric_round(rng, GOSSIP_GEOM_P, GOSSIP_ACT_CAP)
    other = rng.randrange(n - 1)
    target = other if other < i else other + 1
    return act, target


def gossip_rounds(n: int) -> int:
    return GOSSIP_ACT_CAP + 4


def gossip_contact_events(n: int, rngs: list[random.Random]) -> list[tuple[int, int, int]]:
    """(round, sender, receiver) of every schedule-driven first contact.

    Shared with the attack statistics fast path; must mirror
    :meth:`StaggeredGossip.sends` exactly for the schedule-driven sends.
    """
    events = []
    for i in range(n):
        act, target = gossip_schedule(i, n, rngs[i])
        events.append((act, i, target))
    return sorted(events)


def merge_claims(claims: dict[str, Any], incoming: dict[str, Any]) -> None:
    for coord, value in sorted(incoming.items()):
        claims.setdefault(coord, value)


class StaggeredGossip(Protocol):
    id = "flooding"

    def n_rounds(self, n: int, params: dict) -> int:
        return gossip_rounds(n)

    def init_state(self, i, n, params, x, setup, rng):
        act, target = gossip_schedule(i, n, rng)
        return {"i": i, "n": n, "act": act, "target": target,
                "claims": {str(i): x}, "final": gossip_rounds(n)}

    def sends(self, state, r):
        n, i = state["n"], state["i"]
        last = state["final"]
        if r >= last - 1:
            return {j: {"claims": dict(state["claims"])} for j in range(n) if j != i}
        if r >= state["act"] and (r - state["act"]) % GOSSIP_STRIDE == 0:
            return {state["target"]: {"claims": dict(state["claims"])}}
        return {}

    def filter(self, state, r, sender, payload):
        if isinstance(payload, dict) and isinstance(payload.get("claims"), dict):
            return True, "ok"
        return False, "malformed"

    def deliver(self, state, r, accepted):
        for _sender, payload in accepted:
            merge_claims(state["claims"], payload["claims"])

    def output(self, state):
        return [state["claims"].get(str(j), 0) for j in range(state["n"])]


class StrawmanBridge(Protocol):
    id = "strawman_bridge"

    ROUNDS = 8

    def __init__(self, params=None):
        super().__init__(params)

    def bridge_count(self, n: int) -> int:
        return int(self.params.get("k", math.isqrt(n - 1) + 1))

    def n_rounds(self, n, params):
        return self.ROUNDS

    def init_state(self, i, n, params, x, setup, rng):
        m = n // 2
        return {"i": i, "n": n, "m": m, "claims": {str(i): x},
                "k": self.bridge_count(n)}

    def _half(self, state, i):
        return range(0, state["m"]) if i < state["m"] else range(state["m"], state["n"])

    def sends(self, state, r):
        i, m, k, n = state["i"], state["m"], state["k"], state["n"]
        payload = {"claims": dict(state["claims"])}
        vec = {j: payload for j in self._half(state, i) if j != i}
        # bridge pairs live on the high indices of each half, away from the
        # low indices that lead every round's processing order
        if r >= 2:
            if m - k <= i < m:
                vec[i + m] = payload
            elif n - k <= i < n:
                vec[i - m] = payload
        return vec

    def filter(self, state, r, sender, payload):
        if isinstance(payload, dict) and isinstance(payload.get("claims"), dict):
            return True, "ok"
        return False, "malformed"

    def deliver(self, state, r, accepted):
        for _sender, payload in accepted:
            merge_claims(state["claims"], payload["claims"])

    def output(self, state):
        return [state["claims"].get(str(j), 0) for j in range(state["n"])]


class Ring(Protocol):
    """Each party talks to its two ring neighbors; locality is exactly two."""

    id = "ring"

    def n_rounds(self, n, params):
        return 2

    def init_state(self, i, n, params, x, setup, rng):
        return {"i": i, "n": n, "x": x, "seen": {str(i): x}}

    def sends(self, state, r):
        i, n = state["i"], state["n"]
        payload = {"claims": dict(state["seen"])}
        return {(i - 1) % n: payload, (i + 1) % n: payload}

    def deliver(self, state, r, accepted):
        for _s, payload in accepted:
            merge_claims(state["seen"], payload["claims"])

    def output(self, state):
        return state["x"]


class StaggeredRing(Protocol):
    """Ring relay where party 0 provably reaches its first contact last.

    Party i > 0 sends once to its successor at round i + 1; party 0 only at
    round n + 5. Nobody contacts party 0 before round n, so its degree
    crossing trails every other party's on every seed.
    """

    id = "staggered_ring"

    def n_rounds(self, n, params):
        return n + 6

    def init_state(self, i, n, params, x, setup, rng):
        act = n + 5 if i == 0 else i + 1
        return {"i": i, "n": n, "x": x, "act": act}

    def sends(self, state, r):
        if r == state["act"]:
            return {(state["i"] + 1) % state["n"]: {"claims": {str(state["i"]): state["x"]}}}
        return {}

    def output(self, state):
        return state["x"]


class RunawayToy(Protocol):
    """Declares more rounds than any guard allows; exists to trip the guard."""

    id = "runaway"

    def n_rounds(self, n, params):
        return 10**9

    def init_state(self, i, n, params, x, setup, rng):
        return {"i": i}

    def output(self, state):
        return 0
