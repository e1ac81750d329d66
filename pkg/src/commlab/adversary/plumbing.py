"""Simple adversaries: plumbing for tests and robustness experiments."""

from __future__ import annotations

from ..netsim.engine import Adversary


class Passive(Adversary):
    """Corrupts the static set and otherwise watches."""

    id = "passive"


class StaticFlooder(Adversary):
    """Corrupted parties spam every honest party with junk each round."""

    id = "static_flooder"

    def corrupted_sends(self, i, r, default, ctl):
        vec = dict(default)
        for j in range(self.inst.n):
            if j != i and not ctl.is_corrupted(j):
                vec[j] = {"junk": r}
        return vec


class GreedyCorruptor(Adversary):
    """Requests corruptions past the budget; exists to trip the budget check."""

    id = "greedy_corruptor"

    def round_begin(self, r, ctl):
        if r == 1:
            for i in range(self.inst.n):
                ctl.corrupt(i)
        return []


class SigBreaker(Adversary):
    """Corrupted bridge members garble the committee signatures they forward."""

    id = "sig_breaker"

    def corrupted_sends(self, i, r, default, ctl):
        vec = {}
        for t, payload in default.items():
            if isinstance(payload, dict) and "sig1" in payload:
                payload = dict(payload)
                payload["sig1"] = [[(c + 1) for c in comp] for comp in payload["sig1"]]
            vec[t] = payload
        return vec


class BridgeMangler(Adversary):
    """Static malicious set for the committee-bridge robustness experiments.

    Corrupted parties substitute their reducer inputs, garble every share
    vector they carry across the bridge, and vote a wrong result in the
    output-distribution round; committee signatures are forwarded unchanged
    (they cannot be re-signed).
    """

    id = "bridge_mangler"

    def __init__(self, inst, params=None):
        super().__init__(inst, params)
        self.sub_input = self.params.get("substitute_input", 0)
        self.wrong_y = self.params.get("wrong_y", 1)
        self.rng = inst.adv_rng("mangler")

    def _garble_shares(self, shares_rec: dict | None) -> dict | None:
        if not isinstance(shares_rec, dict):
            return shares_rec
        out = {}
        for key, rec in shares_rec.items():
            rec = dict(rec)
            rec["value"] = self.rng.randrange(1 << 30)
            out[key] = rec
        return out

    def corrupted_sends(self, i, r, default, ctl):
        vec = {}
        for t, payload in default.items():
            if isinstance(payload, dict) and "shares" in payload:
                payload = dict(payload)
                payload["shares"] = self._garble_shares(payload["shares"])
            if isinstance(payload, dict) and "y" in payload:
                payload = {"y": self.wrong_y}
            vec[t] = payload
        return vec

    def ideal_inputs(self, fid, r, defaults, ctl):
        out = {}
        for i, rec in defaults.items():
            if not isinstance(rec, dict):
                out[i] = rec
                continue
            rec = dict(rec)
            if "x" in rec:
                rec["x"] = self.sub_input
            if fid in ("recon_compute", "a_recon_compute") and isinstance(rec.get("z"), dict):
                z = dict(rec["z"])
                z["shares"] = self._garble_shares(z.get("shares"))
                rec["z"] = z
            if fid in ("out_dist", "a_out_dist") and "y" in rec:
                rec["y"] = self.wrong_y
            out[i] = rec
        return out
