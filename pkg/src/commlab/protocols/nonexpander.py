"""Committee-bridge protocols over two party halves.

``committee_bridge`` (the static variant): the left half elects, through a
trusted functionality, two committees of size n'; committee one holds robust
shares of every left input and announces both committees (signed with all
left signing keys) across the bridge; the right half reconstructs, evaluates
the registered reducer, and ships the result back over the same bridge; a
final left-half functionality distributes the majority result. The full
communication graph crosses the half boundary on exactly the committee-pair
rectangle (n' x n' edges).

``committee_bridge_adaptive``: committees stay hidden; each committee-one
member learns a single partner and index signatures replace committee
signatures, shrinking the bridge to n' disjoint pairs (one cross edge each).
Meant for the hidden-channel mode, where honest-to-honest traffic is
invisible to the adversary.

Functionality hosts follow the trusted-party convention: corrupted inputs are
whatever the adversary submitted, malformed inputs fall back to defaults.
"""

from __future__ import annotations

import json
import logging
from dataclasses import replace as dc_replace
from typing import Any

from ..ecss import EcssShare, ReconstructionFailure, ecss_recon, ecss_share
from ..fieldmath import PrimeField
from ..itsig import Signature, itsig_verify, multi_sign
from ..pki import SetupTranscript, setup_pki
from ..wire import canonical_json
from .base import Protocol
from .reducers import reducer

logger = logging.getLogger(__name__)

FIELD = PrimeField()


def bridge_params(n: int, params: dict) -> dict:
    """Resolved parameter block shared by both variants."""
    m = n // 2
    if 2 * m != n:
        raise ValueError("committee bridge needs an even party count")
    n_prime = int(params.get("n_prime", 2))
    if not 1 <= n_prime <= m:
        raise ValueError(f"committee size {n_prime} outside [1,{m}]")
    delta = float(params.get("delta", 0.25))
    t_prime = int(params.get("t_prime", int((0.5 - delta) * n_prime)))
    if 2 * t_prime >= n_prime:
        raise ValueError(f"need t' < n'/2, got t'={t_prime}, n'={n_prime}")
    return {
        "m": m,
        "n_prime": n_prime,
        "delta": delta,
        "t_prime": t_prime,
        "f": params.get("f", "xor"),
        "ideal_mode": params.get("ideal_mode", "oracle"),
        "sig_slack": int(params.get("sig_slack", max(1, n // 4))),
    }


def enc_committee(indices: list[int]) -> int:
    return FIELD.encode_bytes(b"committee|" + canonical_json(sorted(indices)).encode())


def enc_index(index: int) -> int:
    return FIELD.encode_bytes(f"index|{index}".encode())


def sig_to_rec(sigs: list[Signature]) -> list[list[int]]:
    return [s.coeffs for s in sigs]


def sig_from_rec(rec: list[list[int]]) -> list[Signature]:
    return [Signature(coeffs=list(c)) for c in rec]


def shares_to_rec(shares: dict[int, EcssShare]) -> dict[str, dict]:
    return {str(i): s.to_rec() for i, s in shares.items()}


def shares_from_rec(rec: dict[str, dict]) -> dict[int, EcssShare]:
    return {int(i): EcssShare.from_rec(r) for i, r in rec.items()}


def _host_verify(message: int, sigs: list[Signature], transcript: SetupTranscript,
                 slack: int, verifier: int = 0) -> bool:
    """Trusted-host verification; uses counter-free copies of the keys."""
    good = 0
    for signer, sig in enumerate(sigs):
        vk = dc_replace(transcript.keysets[signer].vks[verifier], verifies_used=0,
                        verify_cap=1 << 30)
        if itsig_verify(message, sig, vk):
            good += 1
    return good >= len(sigs) - slack


class CommitteeBridge(Protocol):
    id = "committee_bridge"

    ELECT, BRIDGE_OUT, RECON, BRIDGE_BACK, DISTRIBUTE = 1, 2, 3, 4, 5

    def resolved(self, n: int) -> dict:
        return bridge_params(n, self.params)

    def n_rounds(self, n, params):
        return 5

    def setup(self, n, params, rng):
        transcript = setup_pki(n, rng, sign_cap=self._sign_cap(n), verify_cap=2)
        return list(transcript.per_party), transcript

    def _sign_cap(self, n: int) -> int:
        return 2  # each left key signs the two committee encodings

    def round_plan(self, r, n, params):
        p = self.resolved(n)
        m, mode = p["m"], p["ideal_mode"]
        left = tuple(range(m))
        right = tuple(range(m, n))
        if r == self.ELECT:
            return ("ideal", "elect_share", left, mode)
        if r == self.RECON:
            return ("ideal", "recon_compute", right, mode)
        if r == self.DISTRIBUTE:
            return ("ideal", "out_dist", left, mode)
        return ("message",)

    def init_state(self, i, n, params, x, setup, rng):
        p = self.resolved(n)
        return {"i": i, "n": n, "x": x, "setup": setup, "p": p,
                "elect": None, "bridge": None, "ballots": [], "y": None,
                "sig_cache": set()}

    # -- round 1: election ---------------------------------------------------

    def ideal_input(self, state, fid, r):
        i, p = state["i"], state["p"]
        if fid == "elect_share":
            return {"x": state["x"], "sk": state["setup"].signing_key}
        if fid == "recon_compute":
            bridge = state["bridge"]
            z = None
            if bridge is not None:
                z = {"c2": bridge["c2"], "sig2": bridge["sig2"],
                     "shares": bridge.get("shares")}
            return {"x": state["x"], "z": z}
        if fid == "out_dist":
            if state["elect"] is not None and state["y"] is not None:
                return {"y": state["y"]}
            return None
        raise KeyError(fid)

    def ideal_output(self, state, fid, r, out):
        if fid == "elect_share":
            state["c1"] = None if out is None else out.get("c1")
            if out is not None and "sig1" in out:
                state["elect"] = out
                state["reply_from"] = {state["p"]["m"] + i2 for i2 in out["c2"]}
        elif fid == "recon_compute":
            if out is not None:
                state["y"] = out["y"]
        elif fid == "out_dist":
            if out is not None:
                state["y"] = out["y"]

    # -- round 2: bridge out ---------------------------------------------------

    def sends(self, state, r):
        i, p = state["i"], state["p"]
        m, n_prime = p["m"], p["n_prime"]
        if r == self.BRIDGE_OUT and state.get("elect"):
            elect = state["elect"]
            pos = elect["pos"]
            base = {"c1": elect["c1"], "sig1": elect["sig1"],
                    "c2": elect["c2"], "sig2": elect["sig2"]}
            vec = {}
            for j, i2 in enumerate(elect["c2"]):
                payload = dict(base)
                if j == pos:
                    payload["shares"] = elect["shares"]
                vec[m + i2] = payload
            return vec
        if r == self.BRIDGE_BACK and state["i"] >= m and state.get("bridge") and state["y"] is not None:
            c1 = state["bridge"]["c1"]
            return {i1: {"y": state["y"]} for i1 in c1}
        return {}

    def filter(self, state, r, sender, payload):
        i, p = state["i"], state["p"]
        m = p["m"]
        if r == self.BRIDGE_OUT and i >= m:
            if not isinstance(payload, dict) or not {"c1", "sig1", "c2", "sig2"} <= set(payload):
                return False, "malformed"
            if sender not in payload["c1"]:
                return False, "sender-not-in-committee"
            if (i - m) not in payload["c2"]:
                return False, "receiver-not-in-committee"
            if not self._check_multi(state, enc_committee(payload["c1"]), payload["sig1"], "sig1"):
                return False, "bad-committee-signature"
            if not self._check_multi(state, enc_committee(payload["c2"]), payload["sig2"], "sig2"):
                return False, "bad-partner-signature"
            return True, "ok"
        if r == self.BRIDGE_BACK and i < m:
            if not isinstance(payload, dict) or "y" not in payload:
                return False, "malformed"
            bridge_peers = state.get("reply_from")
            if bridge_peers is not None and sender not in bridge_peers:
                return False, "unexpected-sender"
            return True, "ok"
        return False, "unexpected-round"

    def _check_multi(self, state, message: int, sig_rec, cache_tag: str) -> bool:
        """Threshold-verify with this party's own keys, once per distinct blob."""
        key = (cache_tag, canonical_json(sig_rec), message)
        if key in state["sig_cache"]:
            return True
        p = state["p"]
        sigs = sig_from_rec(sig_rec)
        if len(sigs) != p["m"]:
            return False
        good = 0
        for signer, sig in enumerate(sigs):
            vk = state["setup"].verify_keys[signer]
            try:
                if itsig_verify(message, sig, vk):
                    good += 1
            except Exception:
                return False
        ok = good >= p["m"] - p["sig_slack"]
        if ok:
            state["sig_cache"].add(key)
        return ok

    def deliver(self, state, r, accepted):
        i, p = state["i"], state["p"]
        m = p["m"]
        if r == self.BRIDGE_OUT and i >= m:
            for sender, payload in accepted:
                if state["bridge"] is None:
                    state["bridge"] = {"c1": payload["c1"], "c2": payload["c2"],
                                       "sig2": payload["sig2"], "shares": None}
                if "shares" in payload and state["bridge"].get("shares") is None:
                    state["bridge"]["shares"] = payload["shares"]
        elif r == self.BRIDGE_BACK and i < m:
            for sender, payload in accepted:
                state["ballots"].append(payload["y"])
            if state["ballots"]:
                counts: dict[str, int] = {}
                for y in state["ballots"]:
                    counts[canonical_json(y)] = counts.get(canonical_json(y), 0) + 1
                top = max(counts.values())
                state["y"] = json.loads(min(k for k, c in counts.items() if c == top))

    def output(self, state):
        return state["y"]

    # -- functionality hosts ---------------------------------------------------

    def functionality(self, fid):
        return {
            "elect_share": self._f_elect_share,
            "recon_compute": self._f_recon_compute,
            "out_dist": self._f_out_dist,
        }[fid]

    def _f_elect_share(self, inputs, participants, transcript, inst, rng):
        p = self.resolved(inst.n)
        m, n_prime, t_prime = p["m"], p["n_prime"], p["t_prime"]
        xs, sks = {}, {}
        for i in participants:
            rec = inputs.get(i)
            if isinstance(rec, dict) and "x" in rec:
                xs[i] = rec["x"]
            else:
                xs[i] = 0
            sk = rec.get("sk") if isinstance(rec, dict) else None
            if sk is None or not hasattr(sk, "coeffs"):
                logger.warning("elect_share: party %s submitted a malformed key", i)
                sk = transcript.keysets[i].sk
            sks[i] = sk
        c1 = sorted(rng.sample(range(m), n_prime))
        c2 = sorted(rng.sample(range(m), n_prime))
        key_list = [sks[i] for i in sorted(participants)]
        sig1 = sig_to_rec(multi_sign(enc_committee(c1), key_list))
        sig2 = sig_to_rec(multi_sign(enc_committee(c2), key_list))
        share_table: dict[int, dict[int, EcssShare]] = {j: {} for j in range(n_prime)}
        for i in sorted(participants):
            shares = ecss_share(int(xs[i]) % FIELD.p, t_prime, n_prime, FIELD, rng)
            for j in range(n_prime):
                share_table[j][i] = shares[j]
        outputs = {}
        for i in participants:
            outputs[i] = {"c1": c1}
        for pos, member in enumerate(c1):
            outputs[member] = {"c1": c1, "c2": c2, "pos": pos,
                               "sig1": sig1, "sig2": sig2,
                               "shares": shares_to_rec(share_table[pos])}
        self._last_c1, self._last_c2 = c1, c2
        return outputs

    def _f_recon_compute(self, inputs, participants, transcript, inst, rng):
        p = self.resolved(inst.n)
        m, n_prime, t_prime = p["m"], p["n_prime"], p["t_prime"]
        f = reducer(p["f"])
        right_xs = {}
        claims: list[tuple[int, dict]] = []
        for i in participants:
            rec = inputs.get(i)
            right_xs[i] = rec["x"] if isinstance(rec, dict) and "x" in rec else 0
            z = rec.get("z") if isinstance(rec, dict) else None
            if not isinstance(z, dict) or z.get("c2") is None:
                continue
            if not _host_verify(enc_committee(z["c2"]), sig_from_rec(z["sig2"]),
                                transcript, p["sig_slack"]):
                logger.warning("recon_compute: party %s submitted a badly signed committee", i)
                continue
            claims.append((i, z))
        c2_values = {canonical_json(z["c2"]) for _i, z in claims}
        if len(c2_values) > 1:
            logger.warning("recon_compute: ambiguous committee, default output")
            y = f([0] * m + [right_xs[i] for i in sorted(participants)])
            return {i: {"y": y} for i in participants}
        left_values = [0] * m
        if claims:
            c2 = claims[0][1]["c2"]
            by_position: dict[int, dict[int, EcssShare]] = {}
            for i, z in claims:
                if (i - m) not in c2 or not isinstance(z.get("shares"), dict):
                    continue
                pos = c2.index(i - m)
                by_position[pos] = shares_from_rec(z["shares"])
            for left in range(m):
                shares = []
                for pos in range(n_prime):
                    share = by_position.get(pos, {}).get(left)
                    if share is None:
                        share = EcssShare(index=pos + 1, value=0)
                    shares.append(share)
                try:
                    left_values[left] = ecss_recon(shares, t_prime, FIELD)
                except ReconstructionFailure:
                    logger.warning("recon_compute: reconstruction failed for input %s", left)
                    left_values[left] = 0
        y = f(left_values + [right_xs[i] for i in sorted(participants)])
        return {i: {"y": y} for i in participants}

    def _f_out_dist(self, inputs, participants, transcript, inst, rng):
        allowed = set(getattr(self, "_last_c1", participants))
        ballots = []
        for i in sorted(participants):
            if i not in allowed:
                continue
            rec = inputs.get(i)
            if isinstance(rec, dict) and "y" in rec:
                ballots.append(rec["y"])
        if not ballots:
            logger.warning("out_dist: empty ballot set, default output")
            y = 0
        else:
            counts: dict[str, int] = {}
            for b in ballots:
                counts[canonical_json(b)] = counts.get(canonical_json(b), 0) + 1
            top = max(counts.values())
            y = json.loads(min(k for k, c in counts.items() if c == top))
        return {i: {"y": y} for i in participants}


class CommitteeBridgeAdaptive(CommitteeBridge):
    """Hidden-committee variant: single partners, index signatures.

    Committee-one members learn only their own partner; bridge traffic is one
    message per pair, so corrupting a bridge member exposes exactly one
    additional identity. Designed for the hidden-channel mode.
    """

    id = "committee_bridge_adaptive"

    def _sign_cap(self, n):
        p = self.resolved(n)
        return 2 * p["n_prime"]  # one index signature per committee slot, both committees

    def round_plan(self, r, n, params):
        p = self.resolved(n)
        m, mode = p["m"], p["ideal_mode"]
        if r == self.ELECT:
            return ("ideal", "a_elect_share", tuple(range(m)), mode)
        if r == self.RECON:
            return ("ideal", "a_recon_compute", tuple(range(m, n)), mode)
        if r == self.DISTRIBUTE:
            return ("ideal", "a_out_dist", tuple(range(m)), mode)
        return ("message",)

    def ideal_input(self, state, fid, r):
        if fid == "a_elect_share":
            return {"x": state["x"], "sk": state["setup"].signing_key}
        if fid == "a_recon_compute":
            bridge = state["bridge"]
            z = None
            if bridge is not None:
                z = {"sig2": bridge["sig2"], "shares": bridge.get("shares")}
            return {"x": state["x"], "z": z}
        if fid == "a_out_dist":
            if state["elect"] is not None and state["y"] is not None:
                return {"y": state["y"], "sig1": state["elect"]["sig1"]}
            return None
        raise KeyError(fid)

    def ideal_output(self, state, fid, r, out):
        if fid == "a_elect_share":
            if out is not None:
                state["elect"] = out
                state["reply_from"] = {state["p"]["m"] + out["partner"]}
        elif fid in ("a_recon_compute", "a_out_dist"):
            if out is not None:
                state["y"] = out["y"]

    def sends(self, state, r):
        i, p = state["i"], state["p"]
        m = p["m"]
        if r == self.BRIDGE_OUT and state.get("elect"):
            elect = state["elect"]
            return {m + elect["partner"]: {"sig1": elect["sig1"], "sig2": elect["sig2"],
                                           "shares": elect["shares"], "from": i}}
        if r == self.BRIDGE_BACK and i >= m and state.get("bridge") and state["y"] is not None:
            return {state["bridge"]["reply_to"]: {"y": state["y"]}}
        return {}

    def filter(self, state, r, sender, payload):
        i, p = state["i"], state["p"]
        m = p["m"]
        if r == self.BRIDGE_OUT and i >= m:
            if not isinstance(payload, dict) or not {"sig1", "sig2", "shares"} <= set(payload):
                return False, "malformed"
            if not self._check_multi(state, enc_index(sender), payload["sig1"], "sig1"):
                return False, "bad-sender-signature"
            if not self._check_multi(state, enc_index(i), payload["sig2"], "sig2"):
                return False, "bad-receiver-signature"
            return True, "ok"
        if r == self.BRIDGE_BACK and i < m:
            if not isinstance(payload, dict) or "y" not in payload:
                return False, "malformed"
            if state.get("reply_from") is not None and sender not in state["reply_from"]:
                return False, "unexpected-sender"
            return True, "ok"
        return False, "unexpected-round"

    def deliver(self, state, r, accepted):
        i, p = state["i"], state["p"]
        m = p["m"]
        if r == self.BRIDGE_OUT and i >= m:
            for sender, payload in accepted:
                if state["bridge"] is None:
                    state["bridge"] = {"sig2": payload["sig2"],
                                       "shares": payload["shares"],
                                       "reply_to": sender}
        elif r == self.BRIDGE_BACK and i < m:
            for sender, payload in accepted:
                state["ballots"].append(payload["y"])
            if state["ballots"]:
                state["y"] = state["ballots"][0]

    def functionality(self, fid):
        return {
            "a_elect_share": self._f_a_elect_share,
            "a_recon_compute": self._f_a_recon_compute,
            "a_out_dist": self._f_a_out_dist,
        }[fid]

    def _f_a_elect_share(self, inputs, participants, transcript, inst, rng):
        p = self.resolved(inst.n)
        m, n_prime, t_prime = p["m"], p["n_prime"], p["t_prime"]
        xs, sks = {}, {}
        for i in participants:
            rec = inputs.get(i)
            xs[i] = rec["x"] if isinstance(rec, dict) and "x" in rec else 0
            sk = rec.get("sk") if isinstance(rec, dict) else None
            if sk is None or not hasattr(sk, "coeffs"):
                logger.warning("a_elect_share: party %s submitted a malformed key", i)
                sk = transcript.keysets[i].sk
            sks[i] = sk
        c1 = sorted(rng.sample(range(m), n_prime))
        c2 = sorted(rng.sample(range(m), n_prime))
        key_list = [sks[i] for i in sorted(participants)]
        share_table: dict[int, dict[int, EcssShare]] = {j: {} for j in range(n_prime)}
        for i in sorted(participants):
            shares = ecss_share(int(xs[i]) % FIELD.p, t_prime, n_prime, FIELD, rng)
            for j in range(n_prime):
                share_table[j][i] = shares[j]
        outputs: dict[int, Any] = {i: None for i in participants}
        for pos, member in enumerate(c1):
            partner = c2[pos]
            outputs[member] = {
                "partner": partner,
                "pos": pos,
                "sig1": sig_to_rec(multi_sign(enc_index(member), key_list)),
                "sig2": sig_to_rec(multi_sign(enc_index(m + partner), key_list)),
                "shares": shares_to_rec(share_table[pos]),
            }
        self._last_c1, self._last_c2 = c1, c2
        return outputs

    def _f_a_recon_compute(self, inputs, participants, transcript, inst, rng):
        p = self.resolved(inst.n)
        m, n_prime, t_prime = p["m"], p["n_prime"], p["t_prime"]
        f = reducer(p["f"])
        right_xs = {}
        by_position: dict[int, dict[int, EcssShare]] = {}
        for i in sorted(participants):
            rec = inputs.get(i)
            right_xs[i] = rec["x"] if isinstance(rec, dict) and "x" in rec else 0
            z = rec.get("z") if isinstance(rec, dict) else None
            if not isinstance(z, dict) or not isinstance(z.get("shares"), dict):
                continue
            if not _host_verify(enc_index(i), sig_from_rec(z["sig2"]), transcript,
                                p["sig_slack"]):
                logger.warning("a_recon_compute: party %s lacks a valid index signature", i)
                continue
            shares = shares_from_rec(z["shares"])
            pos = next(iter(shares.values())).index - 1 if shares else 0
            by_position[pos] = shares
        left_values = [0] * m
        for left in range(m):
            shares = []
            for pos in range(n_prime):
                share = by_position.get(pos, {}).get(left)
                if share is None:
                    share = EcssShare(index=pos + 1, value=0)
                shares.append(share)
            try:
                left_values[left] = ecss_recon(shares, t_prime, FIELD)
            except ReconstructionFailure:
                logger.warning("a_recon_compute: reconstruction failed for input %s", left)
                left_values[left] = 0
        y = f(left_values + [right_xs[i] for i in sorted(participants)])
        return {i: {"y": y} for i in participants}

    def _f_a_out_dist(self, inputs, participants, transcript, inst, rng):
        p = self.resolved(inst.n)
        ballots = []
        for i in sorted(participants):
            rec = inputs.get(i)
            if not isinstance(rec, dict) or "y" not in rec or "sig1" not in rec:
                continue
            if not _host_verify(enc_index(i), sig_from_rec(rec["sig1"]), transcript,
                                p["sig_slack"]):
                logger.warning("a_out_dist: party %s lacks a valid index signature", i)
                continue
            ballots.append(rec["y"])
        if not ballots:
            logger.warning("a_out_dist: empty ballot set, default output")
            y = 0
        else:
            counts: dict[str, int] = {}
            for b in ballots:
                counts[canonical_json(b)] = counts.get(canonical_json(b), 0) + 1
            top = max(counts.values())
            y = json.loads(min(k for k, c in counts.items() if c == top))
        return {i: {"y": y} for i in participants}
