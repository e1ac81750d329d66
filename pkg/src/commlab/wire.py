"""Canonical serialization helpers.

Everything the lab writes to disk or compares byte-for-byte goes through
these helpers so that identical values always produce identical bytes.
"""

from __future__ import annotations

import json
import struct
from typing import Any


def canonical_json(obj: Any) -> str:
    """Deterministic JSON: sorted keys, no whitespace."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def canonical_json_bytes(obj: Any) -> bytes:
    return canonical_json(obj).encode("utf-8")


def pack_u64le(values: list[int]) -> bytes:
    """Fixed-width little-endian encoding for field elements and share data."""
    return b"".join(struct.pack("<Q", v) for v in values)


def unpack_u64le(data: bytes) -> list[int]:
    if len(data) % 8:
        raise ValueError("u64le payload length not a multiple of 8")
    return [struct.unpack_from("<Q", data, off)[0] for off in range(0, len(data), 8)]
