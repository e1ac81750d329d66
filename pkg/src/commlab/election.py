"""Lightest-bin committee election.

Every party announces one bin out of ceil(n / n_prime); the committee is the
set of parties occupying the least-loaded bin (lowest index on ties). The
least-loaded bin holds at most floor(n / #bins) <= n_prime parties, so the
committee never exceeds the target size, and a minority of corrupted parties
cannot inflate its own fraction much beyond its population share.
"""

from __future__ import annotations

import math


def lightest_bin_elect(n: int, n_prime: int, choices: list[int]) -> list[int]:
    """Return the sorted committee given every party's bin choice."""
    if len(choices) != n:
        raise ValueError(f"expected {n} bin choices, got {len(choices)}")
    bins = math.ceil(n / n_prime)
    loads = [0] * bins
    for c in choices:
        if not 0 <= c < bins:
            raise ValueError(f"bin choice {c} out of range [0, {bins})")
        loads[c] += 1
    # empty bins participate: the size bound |C| <= floor(n / bins) <= n_prime
    # must hold even when everyone piles into a single bin
    lightest = min(range(bins), key=lambda b: (loads[b], b))
    return sorted(i for i, c in enumerate(choices) if c == lightest)
