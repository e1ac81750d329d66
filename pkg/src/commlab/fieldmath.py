"""Prime-field arithmetic and polynomial helpers.

Field elements are plain Python ints in ``[0, p)``; a :class:`PrimeField`
instance carries the modulus and provides the operations. The default modulus
is the Mersenne prime ``2**61 - 1``; tiny fields (``F_7``, ``F_17``) are used
by the exhaustive tests.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass

MERSENNE61 = 2**61 - 1


@dataclass(frozen=True)
class PrimeField:
    p: int = MERSENNE61

    def __post_init__(self) -> None:
        if self.p < 2:
            raise ValueError(f"modulus must be >= 2, got {self.p}")

    def reduce(self, x: int) -> int:
        return x % self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def inv(self, a: int) -> int:
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of 0")
        return pow(a, self.p - 2, self.p)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def rand(self, rng: random.Random) -> int:
        return rng.randrange(self.p)

    def rand_vector(self, rng: random.Random, k: int) -> list[int]:
        return [rng.randrange(self.p) for _ in range(k)]

    def encode_bytes(self, data: bytes) -> int:
        """Map arbitrary bytes to a field element (hash then reduce)."""
        digest = hashlib.sha256(data).digest()
        return int.from_bytes(digest, "little") % self.p


def poly_eval(field: PrimeField, coeffs: list[int], x: int) -> int:
    """Evaluate ``sum(coeffs[k] * x**k)`` by Horner's rule."""
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % field.p
    return acc


def lagrange_at(field: PrimeField, points: list[tuple[int, int]], x: int) -> int:
    """Interpolate the unique degree-(len(points)-1) polynomial and evaluate at x.

    ``points`` are (x_i, y_i) pairs with distinct x_i.
    """
    p = field.p
    acc = 0
    for i, (xi, yi) in enumerate(points):
        num, den = 1, 1
        for j, (xj, _) in enumerate(points):
            if i == j:
                continue
            num = num * ((x - xj) % p) % p
            den = den * ((xi - xj) % p) % p
        acc = (acc + yi * num * field.inv(den)) % p
    return acc


def random_poly(field: PrimeField, degree: int, const: int, rng: random.Random) -> list[int]:
    """Random polynomial of the given degree with fixed constant term."""
    return [const % field.p] + [field.rand(rng) for _ in range(degree)]
