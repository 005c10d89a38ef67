"""The on-ledger anti-piracy contract.

State per licensee: a status machine NORMAL -> ACCUSED -> {GUILTY,
EXONERATED}, the accused version, the accusation period, a report counter
and the set of informer addresses awaiting their deferred payout. Reports
arrive as commit (store "cm") / reveal (verify_report) pairs bound to the
identity tree; appeals disclose the licensee's transfer record and are
checked in constant work regardless of the version count.

Handlers meter their primitive operations (hashes, storage, signature and
group checks) through the environment, so modeled gas tracks the actual
verification work including the Merkle path cache.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from . import crypto, incentive, ot
from .crypto import H, be32
from .group import Group, Point
from .ledger import HandlerRevert
from .merkle import (
    MerklePath,
    MerkleTree,
    PathCache,
    cached_verify,
    composite_leaf_position,
    tree_depth,
    verify as merkle_verify,
)


class Status(enum.Enum):
    NORMAL = "normal"
    ACCUSED = "accused"
    GUILTY = "guilty"
    EXONERATED = "exonerated"


_TERMINAL = (Status.GUILTY, Status.EXONERATED)


@dataclass
class LicenseeSlot:
    address: str
    pub: Point
    status: Status = Status.NORMAL
    version: Optional[int] = None
    report_time: Optional[int] = None
    report_number: int = 0
    is_informer: Dict[str, bool] = field(default_factory=dict)
    paid: Fraction = Fraction(0)


@dataclass
class ContractState:
    plist: List[bytes] = field(default_factory=list)  # encoded P_i, in order
    p_root: Optional[bytes] = None
    rt: Optional[bytes] = None
    cmlists: Dict[int, List[Tuple[bytes, int, int]]] = field(default_factory=dict)
    slots: List[LicenseeSlot] = field(default_factory=list)
    path_cache: PathCache = field(default_factory=PathCache)


@dataclass(frozen=True)
class ContractConfig:
    n_versions: int
    k_periods: int
    timeout: int
    schedule: incentive.RewardSchedule
    plist_root_committed: bool = False
    enable_baseline_appeal: bool = False


def plist_leaf(point_bytes: bytes) -> bytes:
    return H(b"plist-leaf", point_bytes)


def build_plist_tree(points) -> MerkleTree:
    """Owner-side tree over the published transfer points (root-committed
    mode); verify_appeal then takes a membership proof for P_l."""
    return MerkleTree([plist_leaf(p.encode()) for p in points])


class ArgusContract:
    """Dispatchable contract instance for :class:`argus.ledger.Ledger`."""

    def __init__(
        self,
        group: Group,
        config: ContractConfig,
        owner_address: str,
        owner_pub: Point,
        licensees: List[Tuple[str, Point]],
    ):
        self.group = group
        self.config = config
        self.owner_address = owner_address
        self.owner_pub = owner_pub
        self.state = ContractState(
            slots=[LicenseeSlot(addr, pub) for addr, pub in licensees]
        )
        self._by_address = {addr: i + 1 for i, (addr, _pub) in enumerate(licensees)}

    # -- helpers -----------------------------------------------------------

    @property
    def m_licensees(self) -> int:
        return len(self.state.slots)

    def slot(self, x: int) -> LicenseeSlot:
        if not 1 <= x <= self.m_licensees:
            raise HandlerRevert(f"licensee index {x} out of range")
        return self.state.slots[x - 1]

    def licensee_index(self, address: str) -> int:
        if address not in self._by_address:
            raise HandlerRevert(f"{address} is not a registered licensee")
        return self._by_address[address]

    def bounty_per_licensee(self) -> Fraction:
        return self.config.schedule.total_bounty

    # -- calldata ----------------------------------------------------------

    def encode_calldata(self, method: str, params: dict) -> bytes:
        enc = getattr(self, f"_calldata_{method}", None)
        if enc is None:
            raise HandlerRevert(f"unknown method {method}")
        return method.encode() + enc(params)

    def _calldata_store(self, p) -> bytes:
        tp, dat = p["tp"], p["dat"]
        if tp == "cm":
            cm1, x, y = dat
            return b"cm" + cm1 + be32(x) + be32(y)
        if tp in ("rt", "p_root"):
            return tp.encode() + dat
        if tp == "p":
            return b"p" + dat
        raise HandlerRevert(f"unknown store type {tp!r}")

    def _path_bytes(self, path: MerklePath) -> bytes:
        return path.leaf + path.leaf_position.to_bytes(8, "big") + b"".join(path.siblings)

    def _calldata_verify_report(self, p) -> bytes:
        return p["rv1"] + self._path_bytes(p["path"]) + p["rv3"].encode()

    def _appeal_core_bytes(self, p) -> bytes:
        sub: ot.AppealSubmission = p["submission"]
        return sub.encode(self.group)

    def _calldata_verify_appeal(self, p) -> bytes:
        blob = self._appeal_core_bytes(p)
        if self.config.plist_root_committed:
            blob += p["p_point"].encode() + self._path_bytes(p["p_proof"])
        return blob

    def _calldata_baseline_appeal(self, p) -> bytes:
        blob = self._appeal_core_bytes(p)
        blob += p["a_s"].encode()
        for slot_bytes in p["e_vector"]:
            blob += slot_bytes
        return blob

    def _calldata_allocate_bounty(self, p) -> bytes:
        return p["pk"].encode() + be32(p["x"])

    def _calldata_set_guilty(self, p) -> bytes:
        return be32(p["x"])

    # -- dispatch ----------------------------------------------------------

    def handle(self, env, method: str, params: dict):
        handler = getattr(self, f"_do_{method}", None)
        if handler is None:
            raise HandlerRevert(f"unknown method {method}")
        return handler(env, params)

    # -- store ---------------------------------------------------------------

    def _do_store(self, env, p):
        tp, dat = p["tp"], p["dat"]
        words = lambda blob: (len(blob) + 31) // 32
        if tp == "p":
            if env.caller != self.owner_address:
                raise HandlerRevert("only the owner stores transfer points")
            self.group.decode(dat)  # must be a valid point encoding
            self.state.plist.append(dat)
            env.meter.swrite_new(max(1, words(dat)))
            return len(self.state.plist)
        if tp == "rt":
            if env.caller != self.owner_address:
                raise HandlerRevert("only the owner stores the identity root")
            if self.state.rt is not None:
                raise HandlerRevert("identity root already set")
            self.state.rt = dat
            env.meter.swrite_new(1)
            return True
        if tp == "p_root":
            if env.caller != self.owner_address:
                raise HandlerRevert("only the owner stores the point-list root")
            if self.state.p_root is not None:
                raise HandlerRevert("point-list root already set")
            self.state.p_root = dat
            env.meter.swrite_new(1)
            return True
        if tp == "cm":
            cm1, x, y = dat
            period = env.period
            self.state.cmlists.setdefault(period, []).append((cm1, x, y))
            env.meter.swrite_new(2)
            return True
        raise HandlerRevert(f"unknown store type {tp!r}")

    # -- verify_report -------------------------------------------------------

    def _do_verify_report(self, env, p):
        rv1: bytes = p["rv1"]
        path: MerklePath = p["path"]
        rv3: str = p["rv3"]
        if self.state.rt is None:
            raise HandlerRevert("campaign has no identity root yet")
        t_now = env.period
        entries = self.state.cmlists.get(t_now - 1, [])
        addr_bytes = rv3.encode()
        expected_cm = H(rv1, addr_bytes)
        env.meter.hash_bytes(crypto.hash_input_len(rv1, addr_bytes))
        found = None
        for entry in entries:
            env.meter.sread()
            if entry[0] == expected_cm:
                found = entry
                break
        if found is None:
            raise HandlerRevert("no matching commitment in the previous period")
        _cm1, x, y = found
        if not (1 <= x <= self.m_licensees and 1 <= y <= self.config.n_versions):
            raise HandlerRevert("commitment names an unknown copy")
        leaf = H(rv1, be32(x), be32(y))
        env.meter.hash_bytes(crypto.hash_input_len(rv1, be32(x), be32(y)))
        if path.leaf != leaf:
            raise HandlerRevert("path leaf does not bind the revealed report")
        expected_pos = composite_leaf_position(
            self.m_licensees, self.config.n_versions, self.config.k_periods, x, y, t_now - 1
        )
        if path.leaf_position != expected_pos:
            raise HandlerRevert("path does not sit at the commit-period timestamp")
        cache = self.state.path_cache
        cached_before = len(cache)
        result = cached_verify(cache, self.state.rt, path)
        env.meter.hash_bytes(64, ops=result.hash_ops)
        if len(path.siblings) < tree_depth(self.m_licensees) + tree_depth(
            self.config.n_versions
        ) + tree_depth(self.config.k_periods):
            env.meter.sread()  # truncated path: one cache lookup at the stub
        if not result.ok:
            raise HandlerRevert("merkle path rejected")
        env.meter.swrite_update(len(cache) - cached_before)  # cache refresh
        slot = self.slot(x)
        if slot.status is Status.NORMAL:
            slot.report_time = t_now - 1
            slot.version = y
            slot.status = Status.ACCUSED
            env.meter.swrite_update(3)
            env.emit("Accused", licensee=x, version=y, period=t_now - 1)
        slot.report_number += 1
        env.meter.swrite_update(1)
        slot.is_informer[rv3] = True
        env.meter.swrite_new(1)
        env.emit("Reported", licensee=x, number=slot.report_number, informer=rv3)
        bounty = incentive.immediate(self.config.schedule, slot.report_number)
        self._pay_bounty(env, slot, rv3, bounty, "immediate")
        return slot.report_number

    def _pay_bounty(self, env, slot: LicenseeSlot, to: str, amount: Fraction, kind: str):
        if amount > 0:
            env.pay(to, amount)
        slot.paid += amount
        if slot.paid > self.bounty_per_licensee():
            raise HandlerRevert("bounty pool for this licensee exhausted")
        env.emit("BountyPaid", pk=to, amount=amount, kind=kind)

    # -- verify_appeal ---------------------------------------------------------

    def _appeal_gates(self, env, x: int) -> LicenseeSlot:
        slot = self.slot(x)
        env.meter.sread(2)
        if slot.status is not Status.ACCUSED:
            raise HandlerRevert("appeal requires ACCUSED status")
        if env.period - slot.report_time > self.config.timeout:
            raise HandlerRevert("appeal window has closed")
        return slot

    def _check_appeal_signatures(self, env, slot: LicenseeSlot, sub: ot.AppealSubmission):
        env.meter.sig_verify(2)
        if not ot.verify_evidence(self.group, sub.evidence, self.owner_pub, slot.pub):
            raise HandlerRevert("evidence is not signed by both parties")

    def _plist_point(self, env, p, l: int) -> Point:
        if self.config.plist_root_committed:
            point: Point = p["p_point"]
            proof: MerklePath = p["p_proof"]
            if self.state.p_root is None:
                raise HandlerRevert("no point-list root on chain")
            if proof.leaf != plist_leaf(point.encode()):
                raise HandlerRevert("point proof leaf mismatch")
            if proof.leaf_position != (1 << tree_depth(self.config.n_versions)) + (l - 1):
                raise HandlerRevert("point proof position mismatch")
            env.meter.hash_bytes(64, ops=len(proof.siblings))
            if not merkle_verify(self.state.p_root, proof):
                raise HandlerRevert("point membership proof rejected")
            return point
        if len(self.state.plist) < l:
            raise HandlerRevert("transfer point missing on chain")
        env.meter.sread()
        return self.group.decode(self.state.plist[l - 1])

    def _do_verify_appeal(self, env, p):
        sub: ot.AppealSubmission = p["submission"]
        x = self.licensee_index(env.caller)
        slot = self._appeal_gates(env, x)
        self._check_appeal_signatures(env, slot, sub)
        l_claim = sub.record.l
        if not 1 <= l_claim <= self.config.n_versions:
            raise HandlerRevert("claimed version out of range")
        point = self._plist_point(env, p, l_claim)
        env.meter.group_op(2)  # base mul + subtraction
        if point - self.group.base_mul(sub.record.r) != sub.evidence.r_point:
            raise HandlerRevert("record does not reproduce the signed evidence")
        if l_claim == slot.version:
            raise HandlerRevert("record matches the accused version")
        slot.status = Status.EXONERATED
        env.meter.swrite_update(1)
        env.emit("Exonerated", licensee=x, claimed=l_claim)
        return True

    def _do_baseline_appeal(self, env, p):
        """O(N) comparison handler: the whole transfer transcript goes on
        chain and is reprocessed slot by slot. Measurement only."""
        if not self.config.enable_baseline_appeal:
            raise HandlerRevert("baseline appeal handler is disabled")
        sub: ot.AppealSubmission = p["submission"]
        e_vector = p["e_vector"]
        a_s: Point = p["a_s"]
        if len(e_vector) != self.config.n_versions:
            raise HandlerRevert("transcript must cover every version")
        x = self.licensee_index(env.caller)
        slot = self._appeal_gates(env, x)
        self._check_appeal_signatures(env, slot, sub)
        record = sub.record
        if not 1 <= record.l <= self.config.n_versions:
            raise HandlerRevert("claimed version out of range")
        # per-slot transcript scan: the Theta(N) on-chain work
        for blob in e_vector:
            env.meter.hash_bytes(len(blob))
        env.meter.group_op(2)
        stream = crypto.keystream(record.r * a_s, a_s, record.l, len(e_vector[record.l - 1]))
        try:
            ot.unseal(crypto.xor_bytes(e_vector[record.l - 1], stream))
        except ot.OtError as exc:
            raise HandlerRevert(f"transcript does not open at the claimed slot: {exc}")
        if record.l == slot.version:
            raise HandlerRevert("record matches the accused version")
        slot.status = Status.EXONERATED
        env.meter.swrite_update(1)
        env.emit("Exonerated", licensee=x, claimed=record.l)
        return True

    # -- allocate_bounty ---------------------------------------------------

    def _do_allocate_bounty(self, env, p):
        pk, x = p["pk"], p["x"]
        slot = self.slot(x)
        env.meter.sread(2)
        if env.period < self.config.k_periods:
            raise HandlerRevert("collection period still running")
        if not slot.is_informer.get(pk, False):
            raise HandlerRevert("no deferred bounty pending for this address")
        slot.is_informer[pk] = False
        env.meter.swrite_update(1)
        amount = incentive.deferred(self.config.schedule, slot.report_number)
        self._pay_bounty(env, slot, pk, amount, "deferred")
        return True

    # -- set_guilty ---------------------------------------------------------

    def _do_set_guilty(self, env, p):
        x = p["x"]
        slot = self.slot(x)
        env.meter.sread(2)
        if slot.status is not Status.ACCUSED:
            raise HandlerRevert("only an accused licensee can be convicted")
        if env.period - slot.report_time <= self.config.timeout:
            raise HandlerRevert("appeal window still open")
        slot.status = Status.GUILTY
        env.meter.swrite_update(1)
        env.emit("Guilty", licensee=x)
        return True
