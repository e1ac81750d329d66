"""Polynomial signatures with private per-verifier keys.

The signer's key is a polynomial ``f(y_1..y_{n-1}, x)`` of degree ``sign_cap``
in ``x`` and degree one in each ``y_j`` (no cross terms). Verifier i privately
holds a random point ``v_i`` and the univariate restriction ``f_{v_i}(x)``.
A signature on message m is the polynomial ``g(y) = f(y, m)``, represented by
its n coefficients; verifier i accepts iff ``g(v_i) == f_{v_i}(m)``.

Security is information-theoretic but budgeted: a key may sign at most
``sign_cap`` messages and each verifier key may check at most ``verify_cap``
signatures, enforced by usage counters.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .fieldmath import PrimeField, poly_eval
from .wire import pack_u64le


class KeyExhausted(Exception):
    pass


@dataclass
class SigningKey:
    field_: PrimeField
    n_verifiers: int
    sign_cap: int
    # coeffs[j][k]: coefficient of y_j * x**k (j=0 is the pure-x block)
    coeffs: list[list[int]]
    signs_used: int = 0


@dataclass
class VerifyKey:
    field_: PrimeField
    point: list[int]          # v_i, kept private by verifier i
    restriction: list[int]    # coefficients of f_{v_i}(x)
    verify_cap: int
    verifies_used: int = 0

    def to_bytes(self) -> bytes:
        return pack_u64le([len(self.point)] + self.point + self.restriction)


@dataclass
class ItKeyMaterial:
    sk: SigningKey
    vks: list[VerifyKey]      # vks[i] belongs to verifier i (0-based)


@dataclass
class Signature:
    # g(y_1..y_{n-1}) = g0 + sum_j gj * y_j, stored as [g0, g1, ..., g_{n-1}]
    coeffs: list[int]

    def to_bytes(self) -> bytes:
        return pack_u64le(self.coeffs)


def itsig_gen(
    field_: PrimeField,
    n: int,
    sign_cap: int,
    verify_cap: int,
    rng: random.Random,
) -> ItKeyMaterial:
    """Generate a signing key and n private verifier keys."""
    coeffs = [[field_.rand(rng) for _ in range(sign_cap + 1)] for _ in range(n)]
    sk = SigningKey(field_=field_, n_verifiers=n, sign_cap=sign_cap, coeffs=coeffs)
    vks = []
    for _ in range(n):
        point = field_.rand_vector(rng, n - 1)
        restriction = [
            (coeffs[0][k] + sum(coeffs[j][k] * point[j - 1] for j in range(1, n))) % field_.p
            for k in range(sign_cap + 1)
        ]
        vks.append(VerifyKey(field_=field_, point=point, restriction=restriction,
                             verify_cap=verify_cap))
    return ItKeyMaterial(sk=sk, vks=vks)


def itsig_sign(message: int, sk: SigningKey) -> Signature:
    if sk.signs_used >= sk.sign_cap:
        raise KeyExhausted(f"signing key used {sk.signs_used}/{sk.sign_cap} times")
    sk.signs_used += 1
    p = sk.field_.p
    coeffs = [poly_eval(sk.field_, block, message % p) for block in sk.coeffs]
    return Signature(coeffs=coeffs)


def itsig_verify(message: int, sig: Signature, vk: VerifyKey) -> bool:
    if vk.verifies_used >= vk.verify_cap:
        raise KeyExhausted(f"verify key used {vk.verifies_used}/{vk.verify_cap} times")
    vk.verifies_used += 1
    p = vk.field_.p
    if len(sig.coeffs) != len(vk.point) + 1:
        return False
    lhs = sig.coeffs[0]
    for gj, vj in zip(sig.coeffs[1:], vk.point):
        lhs = (lhs + gj * vj) % p
    return lhs == poly_eval(vk.field_, vk.restriction, message % p)


def multi_sign(message: int, sks: list[SigningKey]) -> list[Signature]:
    """One signature per key; together they certify the message."""
    return [itsig_sign(message, sk) for sk in sks]


def multi_verify(
    message: int,
    sigs: list[Signature],
    vks: list[VerifyKey],
    t: int,
) -> bool:
    """Accept when at least len(sigs) - t component signatures verify.

    ``vks[i]`` is the verifier's private key for the i-th signer.
    """
    if len(sigs) != len(vks):
        return False
    good = sum(1 for sig, vk in zip(sigs, vks) if itsig_verify(message, sig, vk))
    return good >= len(sigs) - t


def multi_verify_threshold(
    message: int,
    sigs: list[Signature],
    verifier_keys: list[list[VerifyKey]],
    t: int,
) -> bool:
    """Nested threshold used when verifier keys are themselves inputs.

    ``verifier_keys[v][i]`` is verifier v's key for signer i. Component i is
    accepted when at least (#verifiers - t) verifier keys accept it; the whole
    signature vector is accepted when at least (#signers - t) components pass.
    """
    n_signers = len(sigs)
    n_verifiers = len(verifier_keys)
    good_components = 0
    for i in range(n_signers):
        votes = 0
        for v in range(n_verifiers):
            if itsig_verify(message, sigs[i], verifier_keys[v][i]):
                votes += 1
        if votes >= n_verifiers - t:
            good_components += 1
    return good_components >= n_signers - t
