"""Key-setup generators handed to parties as input-independent setup strings.

Two flavours:

* :func:`setup_pki` -- every party gets its signing key and every party can
  verify everyone (verification keys are distributed to all). Signatures are
  instantiated with the polynomial scheme; distributing the (nominally
  private) verifier points models a public-key setup at desk scale.
* :func:`setup_it_pki` -- every party gets its signing key plus its own
  private verifier key for each signer; nobody else sees those points.

Both return one opaque per-party setup object plus the generation transcript
needed by trusted functionality hosts.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .fieldmath import PrimeField
from .itsig import ItKeyMaterial, SigningKey, VerifyKey, itsig_gen
from .wire import pack_u64le


@dataclass
class PartySetup:
    """Setup string for one party."""

    party: int
    signing_key: SigningKey | None = None
    # verify_keys[j] = this party's key for verifying signer j
    verify_keys: dict[int, VerifyKey] = field(default_factory=dict)

    def to_bytes(self) -> bytes:
        blob = [0xC0FFEE, 1, self.party]          # magic, version, owner
        if self.signing_key is not None:
            blob.append(self.signing_key.sign_cap)
            for block in self.signing_key.coeffs:
                blob.extend(block)
        for j in sorted(self.verify_keys):
            vk = self.verify_keys[j]
            blob.extend([j, len(vk.point)])
            blob.extend(vk.point)
            blob.extend(vk.restriction)
        return pack_u64le(blob)


@dataclass
class SetupTranscript:
    """Everything the trusted setup generated, indexed by signer."""

    n: int
    keysets: list[ItKeyMaterial]
    per_party: list[PartySetup]

    def signing_keys(self) -> list[SigningKey]:
        return [ks.sk for ks in self.keysets]


def setup_pki(
    n: int,
    rng: random.Random,
    field_: PrimeField | None = None,
    sign_cap: int = 2,
    verify_cap: int = 64,
) -> SetupTranscript:
    """Public-style setup: all verifier keys are handed to every party."""
    field_ = field_ or PrimeField()
    keysets = [itsig_gen(field_, n, sign_cap, verify_cap, rng) for _ in range(n)]
    parties = []
    for i in range(n):
        ps = PartySetup(party=i, signing_key=keysets[i].sk)
        for j in range(n):
            ps.verify_keys[j] = keysets[j].vks[i]
        parties.append(ps)
    return SetupTranscript(n=n, keysets=keysets, per_party=parties)


def setup_it_pki(
    n: int,
    rng: random.Random,
    sign_cap: int,
    verify_cap: int,
    field_: PrimeField | None = None,
) -> SetupTranscript:
    """Information-theoretic setup: verifier keys stay private per party.

    Structurally identical to :func:`setup_pki`; the difference is contractual
    (protocols in this model must route verification through the key OWNER,
    e.g. by passing the keys as functionality inputs) and the sign/verify caps
    are tight rather than generous.
    """
    return setup_pki(n, rng, field_=field_, sign_cap=sign_cap, verify_cap=verify_cap)
