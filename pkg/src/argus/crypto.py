"""Hashing, keystream derivation and Schnorr signatures.

One symmetric primitive runs the whole show: SHA-256. Concatenation inside
a hash is always length-prefixed (4-byte big-endian length before each
part), which kills ambiguity between e.g. H(a || bc) and H(ab || c).
Stream encryption is counter-mode expansion of a hash seed XORed onto the
payload.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass

from .group import Group, Point

DIGEST_LEN = 32


def be32(value: int) -> bytes:
    return value.to_bytes(4, "big")


def be64(value: int) -> bytes:
    return value.to_bytes(8, "big")


def H(*parts: bytes) -> bytes:
    """SHA-256 over the length-prefixed concatenation of the parts."""
    h = hashlib.sha256()
    for part in parts:
        h.update(len(part).to_bytes(4, "big"))
        h.update(part)
    return h.digest()


def hash_input_len(*parts: bytes) -> int:
    """Bytes fed to the hash by ``H(*parts)``; used for gas metering."""
    return sum(4 + len(part) for part in parts)


def expand(seed: bytes, length: int) -> bytes:
    """Expand a 32-byte seed into ``length`` bytes, counter-mode."""
    out = bytearray()
    counter = 0
    while len(out) < length:
        out += hashlib.sha256(seed + be64(counter)).digest()
        counter += 1
    return bytes(out[:length])


def xor_bytes(a: bytes, b: bytes) -> bytes:
    if len(a) != len(b):
        raise ValueError("xor operands must have equal length")
    return (int.from_bytes(a, "big") ^ int.from_bytes(b, "big")).to_bytes(len(a), "big")


def keystream(q_point: Point, a_s: Point, index: int, length: int) -> bytes:
    """Deterministic stream for slot ``index``, keyed by (Q_i, a_s, i)."""
    if length < 1:
        raise ValueError("keystream length must be >= 1")
    seed = H(b"ot-stream", q_point.encode(), a_s.encode(), be32(index))
    return expand(seed, length)


def stream_xor(key: bytes, data: bytes, domain: bytes = b"sym") -> bytes:
    """Symmetric encryption/decryption: XOR with a hash-counter stream."""
    if not data:
        return b""
    seed = H(domain, key)
    return xor_bytes(data, expand(seed, len(data)))


# -- Schnorr signatures ----------------------------------------------------


@dataclass(frozen=True)
class KeyPair:
    group: Group
    secret: int
    public: Point


def keygen(group: Group, rng: random.Random) -> KeyPair:
    secret = group.rand_scalar(rng)
    return KeyPair(group, secret, group.base_mul(secret))


def _challenge(group: Group, commit: Point, public: Point, digest: bytes) -> int:
    e = H(b"schnorr-chal", commit.encode(), public.encode(), digest)
    return int.from_bytes(e, "big") % group.order


def sign(keypair: KeyPair, msg: bytes) -> bytes:
    """Schnorr signature over Digest(msg). Deterministic nonce."""
    if not msg:
        raise ValueError("refusing to sign an empty message")
    group = keypair.group
    digest = H(b"schnorr-msg", msg)
    k = 0
    bump = 0
    while k == 0:
        k = int.from_bytes(
            H(b"schnorr-nonce", group.scalar_encode(keypair.secret), digest, be32(bump)),
            "big",
        ) % group.order
        bump += 1
    commit = group.base_mul(k)
    e = _challenge(group, commit, keypair.public, digest)
    s = (k + e * keypair.secret) % group.order
    return commit.encode() + group.scalar_encode(s)


def verify(group: Group, public: Point, msg: bytes, sig: bytes) -> bool:
    """True iff ``sig`` is a valid signature on ``msg``. Never raises."""
    try:
        if len(sig) != group.point_bytes + group.scalar_bytes:
            return False
        commit = group.decode(sig[: group.point_bytes])
        s = group.scalar_decode(sig[group.point_bytes:])
        digest = H(b"schnorr-msg", msg)
        e = _challenge(group, commit, public, digest)
        return group.base_mul(s) == commit + e * public
    except Exception:
        return False


def cosign(keypair: KeyPair, msg: bytes, inner_sig: bytes) -> bytes:
    """Counter-signature: a signature over (msg || inner signature)."""
    return sign(keypair, msg + inner_sig)


def verify_cosigned(
    group: Group,
    outer_public: Point,
    inner_public: Point,
    msg: bytes,
    inner_sig: bytes,
    outer_sig: bytes,
) -> bool:
    return verify(group, inner_public, msg, inner_sig) and verify(
        group, outer_public, msg + inner_sig, outer_sig
    )


def sig_len(group: Group) -> int:
    return group.point_bytes + group.scalar_bytes
