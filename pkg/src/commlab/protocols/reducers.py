"""Registered reducers: the joint functions the committee protocols compute."""

from __future__ import annotations

from collections import Counter
from typing import Any, Callable


def _xor(xs: list[int]) -> int:
    acc = 0
    for x in xs:
        acc ^= int(x)
    return acc


def _concat(xs: list[Any]) -> list[Any]:
    return list(xs)


def _majority(xs: list[Any]) -> Any:
    counts = Counter(xs)
    top = max(counts.values())
    return min(x for x, c in counts.items() if c == top)


REDUCERS: dict[str, Callable[[list[Any]], Any]] = {
    "xor": _xor,
    "concat": _concat,
    "majority": _majority,
}


def reducer(fid: str) -> Callable[[list[Any]], Any]:
    try:
        return REDUCERS[fid]
    except KeyError:
        raise KeyError(f"unknown reducer {fid!r}; known: {sorted(REDUCERS)}") from None
