"""Bandwidth-efficient delivery: encrypt everything, move keys by OT,
fetch the one ciphertext by two-server XOR PIR.

Shipping the whole N-slot OT vector costs N * |D| bytes downstream. The
hybrid instead encrypts each version under its own 32-byte key offline,
transfers only the key vector obliviously, and retrieves the single
ciphertext with a information-theoretic two-server PIR (random mask to
one server, the same mask with the target bit flipped to the other; the
XOR of the answers is the target). Each server sees a uniformly random
mask, independent of the index, as long as the two do not collude.

Every byte moved is tallied in a BandwidthLedger, per phase and party.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from . import crypto, ot
from .group import Point

KEY_LEN = 32


class PirError(Exception):
    pass


class BandwidthLedger:
    """Byte counters keyed by (phase, party)."""

    def __init__(self):
        self.counters: Dict[Tuple[str, str], int] = {}

    def add(self, phase: str, party: str, nbytes: int) -> None:
        key = (phase, party)
        self.counters[key] = self.counters.get(key, 0) + nbytes

    def total(self, party: str = None, phase: str = None) -> int:
        return sum(
            n
            for (ph, pa), n in self.counters.items()
            if (party is None or pa == party) and (phase is None or ph == phase)
        )

    def rows(self) -> List[Tuple[str, str, int]]:
        return sorted((ph, pa, n) for (ph, pa), n in self.counters.items())


def sym_encrypt(key: bytes, data: bytes, width: int = None) -> bytes:
    """Seal then XOR-stream ``data`` under ``key``, padded to ``width``."""
    framed = ot.seal(data)
    if width is not None:
        if width < len(framed):
            raise PirError("width smaller than sealed payload")
        framed += bytes(width - len(framed))
    return crypto.stream_xor(key, framed)


def sym_decrypt(key: bytes, blob: bytes) -> bytes:
    return ot.unseal(crypto.stream_xor(key, blob))


@dataclass(frozen=True)
class CipherStore:
    """Equal-width ciphertexts C_i = SymEnc(K_i, D_i), one per version."""

    ciphertexts: Tuple[bytes, ...]

    @property
    def n(self) -> int:
        return len(self.ciphertexts)

    @property
    def width(self) -> int:
        return len(self.ciphertexts[0])


def encrypt_all(payloads: Sequence[bytes], keys: Sequence[bytes]) -> CipherStore:
    """Offline phase: encrypt every version under its own key."""
    if len(payloads) != len(keys):
        raise PirError("key/payload count mismatch")
    if not payloads:
        raise PirError("nothing to encrypt")
    width = ot.sealed_len(max(len(p) for p in payloads))
    return CipherStore(
        tuple(sym_encrypt(k, p, width) for p, k in zip(payloads, keys))
    )


class PirServer:
    """Passive responder: answers a mask with the XOR of selected slots."""

    def __init__(self, store: CipherStore):
        self.store = store

    def answer(self, mask: Sequence[int]) -> bytes:
        if len(mask) != self.store.n:
            raise PirError("mask length mismatch")
        acc = bytes(self.store.width)
        for bit, ct in zip(mask, self.store.ciphertexts):
            if bit:
                acc = crypto.xor_bytes(acc, ct)
        return acc


def mask_bytes(n: int) -> int:
    return (n + 7) // 8


def pir_fetch(
    servers: Tuple[PirServer, PirServer],
    index: int,
    rng: random.Random,
    ledger: BandwidthLedger = None,
    party: str = "licensee",
) -> bytes:
    """Retrieve ciphertext ``index`` (1-based) without revealing it to
    either server. Exactly two non-colluding replicas are required."""
    if len(servers) != 2:
        raise PirError("two-server scheme needs exactly two servers")
    n = servers[0].store.n
    if servers[1].store.n != n:
        raise PirError("server replicas disagree on size")
    if not 1 <= index <= n:
        raise PirError("index out of range")
    q1 = [rng.getrandbits(1) for _ in range(n)]
    q2 = list(q1)
    q2[index - 1] ^= 1
    a1 = servers[0].answer(q1)
    a2 = servers[1].answer(q2)
    if ledger is not None:
        ledger.add("pir-query", party, 2 * mask_bytes(n))
        ledger.add("pir-response", party, len(a1) + len(a2))
    return crypto.xor_bytes(a1, a2)


# -- the hybrid ShareData pipeline -------------------------------------------


@dataclass
class HybridResult:
    payload: bytes
    ledger: BandwidthLedger


def hybrid_share(
    params: ot.OtPublicParams,
    owner_secret: ot.OwnerOtSecret,
    evidence: ot.OtEvidence,
    payloads: Sequence[bytes],
    record: ot.OtRecord,
    rng: random.Random,
    store: CipherStore = None,
    keys: Sequence[bytes] = None,
) -> HybridResult:
    """Keys travel through the OT in key-only mode; the data travels as a
    single PIR-fetched ciphertext. Returns D_l plus the bandwidth ledger.

    ``store``/``keys`` may be precomputed (the encryption phase is offline
    and licensee-independent); otherwise they are derived here.
    """
    ledger = BandwidthLedger()
    if (store is None) != (keys is None):
        raise PirError("store and keys must be supplied together")
    if store is None:
        keys = [rng.randbytes(KEY_LEN) for _ in range(params.n)]
        store = encrypt_all(payloads, keys)
    slots = ot.transfer(params, owner_secret, evidence, keys)
    ledger.add("ot-keys", "licensee", sum(len(s) for s in slots))
    key_l = ot.receive(slots, record, params.a_s)
    servers = (PirServer(store), PirServer(store))
    cipher_l = pir_fetch(servers, record.l, rng, ledger)
    payload = sym_decrypt(key_l, cipher_l)
    return HybridResult(payload, ledger)


def direct_share(
    params: ot.OtPublicParams,
    owner_secret: ot.OwnerOtSecret,
    evidence: ot.OtEvidence,
    payloads: Sequence[bytes],
    record: ot.OtRecord,
) -> HybridResult:
    """Baseline: the full encrypted vector goes over the wire."""
    ledger = BandwidthLedger()
    slots = ot.transfer(params, owner_secret, evidence, payloads)
    ledger.add("ot-data", "licensee", sum(len(s) for s in slots))
    return HybridResult(ot.receive(slots, record, params.a_s), ledger)
