"""Multi-period commit-and-reveal.

A collection window of total duration T is cut into K sub-periods. A
commitment made in period i is revealable only in period i+1, and the
reveal is bound to its period through a precomputed tag list:

    L[i]  = H(H(X || i))        (public, per secret X)
    cm    = H(H(X || i) || nonce)
    rv    = H(X || i)

Replaying an observed reveal in a later period fails because H(rv) no
longer matches the tag for that period.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .crypto import H, be32

NONCE_BYTES = 16  # lambda = 128


@dataclass(frozen=True)
class PeriodLayout:
    """Collection window of ``total_duration`` seconds cut into K periods."""

    total_duration: int
    k_periods: int

    def __post_init__(self):
        if self.k_periods < 2:
            raise ValueError("need at least two sub-periods")
        if self.total_duration <= 0:
            raise ValueError("duration must be positive")

    @property
    def period_len(self) -> Fraction:
        return Fraction(self.total_duration, self.k_periods)


@dataclass(frozen=True)
class Commitment:
    cm: bytes
    period: int  # period the commitment was recorded in


@dataclass(frozen=True)
class Reveal:
    rv: bytes
    nonce: bytes
    period: int  # period the reveal arrived in


def tag_preimage(secret: bytes, period_i: int) -> bytes:
    """rv for period i: H(X || i)."""
    return H(secret, be32(period_i))


def build_tag_list(secret: bytes, k_periods: int) -> list:
    """L[i] = H(H(X || i)) for i = 1..K (list is 0-indexed internally)."""
    if k_periods < 1:
        raise ValueError("need at least one period")
    return [H(tag_preimage(secret, i)) for i in range(1, k_periods + 1)]


def commit(secret: bytes, period_i: int, nonce: bytes) -> Commitment:
    if period_i < 1:
        raise ValueError("period index starts at 1")
    if len(nonce) != NONCE_BYTES:
        raise ValueError(f"nonce must be {NONCE_BYTES} bytes")
    return Commitment(H(tag_preimage(secret, period_i), nonce), period_i)


def make_reveal(secret: bytes, period_i: int, nonce: bytes) -> Reveal:
    """The honest reveal for a commitment made in period i."""
    return Reveal(tag_preimage(secret, period_i), nonce, period_i + 1)


def random_nonce(rng: random.Random) -> bytes:
    return rng.randbytes(NONCE_BYTES)


def verify_reveal(
    commitment: Commitment,
    reveal: Reveal,
    tags: list,
    claimed_period: int,
) -> bool:
    """Accept iff the hash equations hold, the commitment sits in the
    claimed period, and the reveal arrived exactly one period later."""
    if not 1 <= claimed_period <= len(tags):
        return False
    if commitment.period != claimed_period:
        return False
    if reveal.period != claimed_period + 1:
        return False
    if H(reveal.rv, reveal.nonce) != commitment.cm:
        return False
    return H(reveal.rv) == tags[claimed_period - 1]


@dataclass(frozen=True)
class ConfirmationBound:
    """Report-confirmation delay for a period layout, in hours.

    ``nominal_hours`` is one period length (commit at period end, reveal
    right after the boundary) -- the conventional headline number.
    ``worst_case_hours`` covers a commit at a period's start confirmed at
    the end of the next period: two full periods.
    """

    nominal_hours: Fraction
    worst_case_hours: Fraction


def confirmation_bound(layout: PeriodLayout) -> ConfirmationBound:
    nominal = Fraction(layout.total_duration, 3600) / layout.k_periods
    return ConfirmationBound(nominal, 2 * nominal)
