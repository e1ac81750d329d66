"""Error-correcting secret sharing: Shamir shares plus pairwise one-time MACs.

A plain degree-t Shamir sharing only supports error-free reconstruction.
Robustness against up to t corrupted shares for any t < n/2 is obtained by
authenticating every share to every other party with an unconditional MAC
(key ``(a, b)``, tag ``a*s + b``): a share is accepted during reconstruction
only if enough of its tags verify, and forging a tag without the key succeeds
with probability 1/p per attempt (< n^2/p overall).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .fieldmath import PrimeField, lagrange_at, poly_eval, random_poly
from .wire import pack_u64le


class InvalidThreshold(ValueError):
    pass


class ReconstructionFailure(Exception):
    pass


@dataclass
class EcssShare:
    """Share held by party ``index`` (1-based evaluation point).

    ``value``    -- the Shamir evaluation s_j = f(j).
    ``tags``     -- tags[k] authenticates this share towards party k.
    ``mac_keys`` -- mac_keys[k] = (a, b) lets this party check party k's share.
    """

    index: int
    value: int
    tags: dict[int, int] = field(default_factory=dict)
    mac_keys: dict[int, tuple[int, int]] = field(default_factory=dict)

    def to_bytes(self) -> bytes:
        flat = [self.index, self.value]
        for k in sorted(self.tags):
            flat += [k, self.tags[k]]
        for k in sorted(self.mac_keys):
            a, b = self.mac_keys[k]
            flat += [k, a, b]
        return pack_u64le(flat)

    def to_rec(self) -> dict:
        return {
            "index": self.index,
            "value": self.value,
            "tags": {str(k): v for k, v in self.tags.items()},
            "mac_keys": {str(k): list(v) for k, v in self.mac_keys.items()},
        }

    @staticmethod
    def from_rec(rec: dict) -> "EcssShare":
        return EcssShare(
            index=rec["index"],
            value=rec["value"],
            tags={int(k): v for k, v in rec.get("tags", {}).items()},
            mac_keys={int(k): (v[0], v[1]) for k, v in rec.get("mac_keys", {}).items()},
        )


def ecss_share(
    message: int,
    t: int,
    n: int,
    field_: PrimeField,
    rng: random.Random,
) -> list[EcssShare]:
    """Share ``message`` with threshold t among n parties (t < n/2)."""
    if t < 0 or n < 1:
        raise InvalidThreshold(f"bad parameters t={t}, n={n}")
    if 2 * t >= n:
        raise InvalidThreshold(f"need t < n/2, got t={t}, n={n}")
    coeffs = random_poly(field_, t, message, rng)
    shares = [EcssShare(index=j, value=poly_eval(field_, coeffs, j)) for j in range(1, n + 1)]
    # mac_keys[k][j]: key held by party k to verify party j's share; the slope
    # a is nonzero so that changing a value while keeping its tag always fails
    for k in range(1, n + 1):
        for j in range(1, n + 1):
            if j == k:
                continue
            a = 1 + rng.randrange(field_.p - 1)
            b = field_.rand(rng)
            shares[k - 1].mac_keys[j] = (a, b)
            shares[j - 1].tags[k] = (a * shares[j - 1].value + b) % field_.p
    return shares


def _accept_share(candidate: EcssShare, holders: list[EcssShare], n: int, t: int, p: int) -> bool:
    """A share is accepted when at least n - t of its tags verify.

    The holder's own (trivially consistent) check counts as one vote, matching
    the convention that honest parties always accept their own share.
    """
    votes = 1
    for holder in holders:
        if holder.index == candidate.index:
            continue
        key = holder.mac_keys.get(candidate.index)
        if key is None:
            continue
        a, b = key
        if (a * candidate.value + b) % p == candidate.tags.get(holder.index):
            votes += 1
    return votes >= n - t


def ecss_recon(shares: list[EcssShare], t: int, field_: PrimeField) -> int:
    """Reconstruct the secret from n shares of which at most t were tampered.

    Tag filtering first: a share survives only with >= n - t verifying tags,
    which every untouched share does and a value-tampered share never does.
    Tampered shares can still sneak past the filter by blindly guessing tags
    (probability < n^2/p overall), so the surviving shares are then decoded by
    vote: the degree-t polynomial consistent with the most survivors wins.

    Raises :class:`ReconstructionFailure` when fewer than t + 1 shares survive
    or no polynomial dominates (both require MAC forgeries).
    """
    import itertools

    n = len(shares)
    accepted = [s for s in shares if _accept_share(s, shares, n, t, field_.p)]
    if len(accepted) < t + 1:
        raise ReconstructionFailure(f"only {len(accepted)} shares accepted, need {t + 1}")
    pts = [(s.index, s.value) for s in accepted]

    def agreement(base: list[tuple[int, int]]) -> int:
        return sum(1 for x, y in pts if lagrange_at(field_, base, x) == y)

    first = pts[: t + 1]
    if agreement(first) == len(pts):
        return lagrange_at(field_, first, 0)
    best_base, best_score, ambiguous = None, -1, False
    for combo in itertools.combinations(pts, t + 1):
        base = list(combo)
        score = agreement(base)
        if score > best_score:
            best_base, best_score, ambiguous = base, score, False
        elif score == best_score and best_base is not None:
            if lagrange_at(field_, base, 0) != lagrange_at(field_, best_base, 0):
                ambiguous = True
    if best_base is None or ambiguous or best_score < t + 1:
        raise ReconstructionFailure("no dominant polynomial among accepted shares")
    return lagrange_at(field_, best_base, 0)
