"""1-out-of-N oblivious transfer with a constant-size appeal.

Setup publishes N random points {P_i} and a_s = s*G while the owner keeps
{s * P_i}. The licensee picks (r, l), sends the dual-signed evidence
R = P_l - r*G, and receives every payload encrypted under slot streams

    E_i = stream(Q_i, a_s, i) XOR D_i     with  Q_i = s*P_i - s*R.

Only slot l satisfies Q_l = r * a_s, so only D_l is recoverable. The
evidence pins the choice: in a dispute the licensee reveals (r, l) and the
verifier checks P_l - r*G == R against the accused index. The submission
is a few group elements regardless of N.

Payloads are framed with a length header and an 8-byte checksum before
encryption, so decrypting the wrong slot (or with the wrong key) is
detected rather than silently returning noise.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from . import crypto
from .crypto import H, be32
from .group import Group, Point


class OtError(Exception):
    pass


class ProtocolAbort(OtError):
    """A party presented an invalid signature or malformed message."""


class ChecksumError(OtError):
    """Decrypted bytes fail the integrity check."""


CHECKSUM_LEN = 8
SEAL_OVERHEAD = 4 + CHECKSUM_LEN


def seal(data: bytes) -> bytes:
    """Frame ``data`` with its length and a truncated-hash checksum."""
    return be32(len(data)) + data + H(b"seal", data)[:CHECKSUM_LEN]


def unseal(blob: bytes) -> bytes:
    """Inverse of :func:`seal`; raises ChecksumError on any mismatch."""
    if len(blob) < SEAL_OVERHEAD:
        raise ChecksumError("sealed payload too short")
    length = int.from_bytes(blob[:4], "big")
    if 4 + length + CHECKSUM_LEN > len(blob):
        raise ChecksumError("declared length exceeds payload")
    data = blob[4:4 + length]
    if H(b"seal", data)[:CHECKSUM_LEN] != blob[4 + length:4 + length + CHECKSUM_LEN]:
        raise ChecksumError("checksum mismatch")
    return data


def sealed_len(data_len: int) -> int:
    return data_len + SEAL_OVERHEAD


@dataclass(frozen=True)
class OtPublicParams:
    group: Group
    n: int
    points: Tuple[Point, ...]  # P_1..P_N
    a_s: Point
    owner_pub: Point
    points_sig: bytes  # owner's signature over the published list

    def point(self, index: int) -> Point:
        if not 1 <= index <= self.n:
            raise OtError(f"index {index} outside 1..{self.n}")
        return self.points[index - 1]

    def points_digest(self) -> bytes:
        return H(b"ot-points", self.a_s.encode(), *[p.encode() for p in self.points])

    def verify_points_sig(self) -> bool:
        return crypto.verify(self.group, self.owner_pub, self.points_digest(), self.points_sig)


@dataclass(frozen=True)
class OwnerOtSecret:
    s: int
    p_primes: Tuple[Point, ...]  # s * P_i


@dataclass(frozen=True)
class OtRecord:
    """Licensee's secret: blinding scalar and chosen slot (1-based)."""

    r: int
    l: int


@dataclass(frozen=True)
class OtEvidence:
    """Dual-signed R = P_l - r*G."""

    r_point: Point
    licensee_pub: Point
    sig_licensee: bytes
    sig_owner: bytes

    def message(self) -> bytes:
        return evidence_message(self.r_point)

    def byte_size(self) -> int:
        return (
            len(self.r_point.encode())
            + len(self.licensee_pub.encode())
            + len(self.sig_licensee)
            + len(self.sig_owner)
        )


def evidence_message(r_point: Point) -> bytes:
    return H(b"ot-evidence", r_point.encode())


def initialize(
    group: Group, n: int, owner_kp: crypto.KeyPair, rng: random.Random
) -> Tuple[OtPublicParams, OwnerOtSecret]:
    """Owner setup: publish signed {P_i} and a_s, keep s and {s*P_i}."""
    if n < 2:
        raise OtError("need at least two versions")
    s = group.rand_scalar(rng)
    points = tuple(group.rand_point(rng) for _ in range(n))
    a_s = group.base_mul(s)
    params_unsig = OtPublicParams(group, n, points, a_s, owner_kp.public, b"")
    sig = crypto.sign(owner_kp, params_unsig.points_digest())
    params = OtPublicParams(group, n, points, a_s, owner_kp.public, sig)
    secret = OwnerOtSecret(s, tuple(s * p for p in points))
    return params, secret


def new_record(params: OtPublicParams, choice: int, rng: random.Random) -> OtRecord:
    if not 1 <= choice <= params.n:
        raise OtError(f"choice {choice} outside 1..{params.n}")
    return OtRecord(params.group.rand_field(rng), choice)


def evidence_point(params: OtPublicParams, record: OtRecord) -> Point:
    """R = P_l - r*G."""
    return params.point(record.l) - params.group.base_mul(record.r)


def licensee_sign_evidence(
    params: OtPublicParams, record: OtRecord, licensee_kp: crypto.KeyPair
) -> Tuple[Point, bytes]:
    r_point = evidence_point(params, record)
    return r_point, crypto.sign(licensee_kp, evidence_message(r_point))


def owner_countersign(
    params: OtPublicParams,
    r_point: Point,
    licensee_pub: Point,
    sig_licensee: bytes,
    owner_kp: crypto.KeyPair,
) -> OtEvidence:
    msg = evidence_message(r_point)
    if not crypto.verify(params.group, licensee_pub, msg, sig_licensee):
        raise ProtocolAbort("licensee signature over R is invalid")
    sig_owner = crypto.cosign(owner_kp, msg, sig_licensee)
    return OtEvidence(r_point, licensee_pub, sig_licensee, sig_owner)


def generate_evidence(
    params: OtPublicParams,
    record: OtRecord,
    licensee_kp: crypto.KeyPair,
    owner_kp: crypto.KeyPair,
) -> OtEvidence:
    """Both halves of the evidence exchange in one call."""
    r_point, sig_l = licensee_sign_evidence(params, record, licensee_kp)
    return owner_countersign(params, r_point, licensee_kp.public, sig_l, owner_kp)


def verify_evidence(
    group: Group, evidence: OtEvidence, owner_pub: Point, licensee_pub: Point
) -> bool:
    return crypto.verify_cosigned(
        group,
        owner_pub,
        licensee_pub,
        evidence.message(),
        evidence.sig_licensee,
        evidence.sig_owner,
    )


def transfer(
    params: OtPublicParams,
    secret: OwnerOtSecret,
    evidence: OtEvidence,
    payloads: Sequence[bytes],
) -> List[bytes]:
    """Owner side: encrypt all N payloads against the evidence.

    Payloads are sealed, padded to a common length, and streamed per slot.
    Refuses to run on evidence that is not properly dual-signed.
    """
    if len(payloads) != params.n:
        raise OtError(f"expected {params.n} payloads, got {len(payloads)}")
    if not verify_evidence(params.group, evidence, params.owner_pub, evidence.licensee_pub):
        raise ProtocolAbort("refusing transfer: evidence not dual-signed")
    width = sealed_len(max(len(p) for p in payloads))
    r_prime = secret.s * evidence.r_point
    slots = []
    for i, payload in enumerate(payloads, start=1):
        q_i = secret.p_primes[i - 1] - r_prime
        framed = seal(payload)
        framed += bytes(width - len(framed))
        slots.append(crypto.xor_bytes(framed, crypto.keystream(q_i, params.a_s, i, width)))
    return slots


def receive(slots: Sequence[bytes], record: OtRecord, a_s: Point) -> bytes:
    """Licensee side: open slot l with the stream keyed by r * a_s."""
    if not 1 <= record.l <= len(slots):
        raise OtError("record index outside the received vector")
    blob = slots[record.l - 1]
    stream = crypto.keystream(record.r * a_s, a_s, record.l, len(blob))
    return unseal(crypto.xor_bytes(blob, stream))


class AppealVerdict(enum.Enum):
    FALSELY_ACCUSED = "falsely_accused"
    APPEAL_FAILS = "appeal_fails"


@dataclass(frozen=True)
class AppealSubmission:
    """What the accused licensee discloses: the record plus the evidence."""

    record: OtRecord
    evidence: OtEvidence

    def encode(self, group: Group) -> bytes:
        """Canonical wire form; constant size for a fixed group backend."""
        ev = self.evidence
        return b"".join(
            (
                group.scalar_encode(self.record.r),
                be32(self.record.l),
                ev.r_point.encode(),
                ev.licensee_pub.encode(),
                ev.sig_licensee,
                ev.sig_owner,
            )
        )


def appeal_verdict(
    params: OtPublicParams,
    owner_pub: Point,
    licensee_pub: Point,
    submission: AppealSubmission,
    accused_index: int,
) -> AppealVerdict:
    """FALSELY_ACCUSED iff the dual signatures hold, P_l - r*G equals the
    signed R, and the disclosed l differs from the accused index. Never
    raises on malformed input; any defect fails the appeal."""
    try:
        record = submission.record
        if not 1 <= record.l <= params.n:
            return AppealVerdict.APPEAL_FAILS
        if not verify_evidence(params.group, submission.evidence, owner_pub, licensee_pub):
            return AppealVerdict.APPEAL_FAILS
        expected = params.point(record.l) - params.group.base_mul(record.r)
        if expected != submission.evidence.r_point:
            return AppealVerdict.APPEAL_FAILS
        if record.l == accused_index:
            return AppealVerdict.APPEAL_FAILS
        return AppealVerdict.FALSELY_ACCUSED
    except Exception:
        return AppealVerdict.APPEAL_FAILS
