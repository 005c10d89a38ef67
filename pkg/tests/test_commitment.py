"""Multi-period commitment tests, including exhaustive replay soundness."""

import random
import time
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from argus.commitment import (
    Commitment,
    PeriodLayout,
    Reveal,
    build_tag_list,
    commit,
    confirmation_bound,
    make_reveal,
    random_nonce,
    tag_preimage,
    verify_reveal,
)
from argus.crypto import H, be32

RNG = random.Random(42)


def test_tag_list_definition():
    secret = b"campaign-secret"
    tags = build_tag_list(secret, 3)
    assert len(tags) == 3
    for i in (1, 2, 3):
        assert tags[i - 1] == H(H(secret, be32(i)))


def test_tag_lists_differ_for_different_secrets():
    t1 = build_tag_list(b"alpha", 16)
    t2 = build_tag_list(b"bravo", 16)
    assert all(a != b for a, b in zip(t1, t2))


def test_tag_list_of_1000_is_fast():
    start = time.monotonic()
    tags = build_tag_list(b"timing", 1000)
    assert len(tags) == 1000
    assert time.monotonic() - start < 1.0


def test_honest_commit_reveal_roundtrip():
    secret = b"report-payload"
    tags = build_tag_list(secret, 8)
    nonce = random_nonce(RNG)
    cm = commit(secret, 3, nonce)
    rv = make_reveal(secret, 3, nonce)
    assert verify_reveal(cm, rv, tags, 3)


def test_commit_hiding_under_nonce():
    n1, n2 = random_nonce(RNG), random_nonce(RNG)
    assert commit(b"x", 3, n1).cm != commit(b"x", 3, n2).cm


def test_commit_bounds_and_nonce_length():
    with pytest.raises(ValueError):
        commit(b"x", 0, random_nonce(RNG))
    with pytest.raises(ValueError):
        commit(b"x", 1, b"short")


def test_wrong_nonce_rejected():
    secret = b"payload"
    tags = build_tag_list(secret, 8)
    cm = commit(secret, 3, random_nonce(RNG))
    rv = make_reveal(secret, 3, random_nonce(RNG))
    assert not verify_reveal(cm, rv, tags, 3)


def test_replayed_reveal_rejected_exhaustively():
    """An observed (rv, nonce) pair recommitted in any other period fails."""
    secret = b"leak"
    for k in (4, 8, 16):
        tags = build_tag_list(secret, k)
        for orig in range(1, k):
            nonce = random_nonce(RNG)
            stolen_rv = tag_preimage(secret, orig)
            for later in range(1, k + 1):
                if later == orig:
                    continue
                replay_cm = Commitment(H(stolen_rv, nonce), later)
                replay_rv = Reveal(stolen_rv, nonce, later + 1)
                assert not verify_reveal(replay_cm, replay_rv, tags, later)


def test_reveal_must_arrive_in_next_period():
    secret = b"timing"
    tags = build_tag_list(secret, 8)
    nonce = random_nonce(RNG)
    cm = commit(secret, 3, nonce)
    honest = make_reveal(secret, 3, nonce)
    late = Reveal(honest.rv, honest.nonce, 5)
    early = Reveal(honest.rv, honest.nonce, 3)
    assert not verify_reveal(cm, late, tags, 3)
    assert not verify_reveal(cm, early, tags, 3)
    # claimed period must match where the commitment actually sits
    assert not verify_reveal(cm, honest, tags, 4)


@settings(max_examples=50)
@given(
    secret=st.binary(min_size=1, max_size=64),
    period=st.integers(1, 15),
    seed=st.integers(0, 2**32 - 1),
)
def test_completeness_property(secret, period, seed):
    tags = build_tag_list(secret, 16)
    nonce = random.Random(seed).randbytes(16)
    cm = commit(secret, period, nonce)
    rv = make_reveal(secret, period, nonce)
    assert verify_reveal(cm, rv, tags, period)


def test_no_commitment_collisions_across_secret_nonce_pairs():
    # ledger-visible cm values don't collide across distinct inputs
    seen = set()
    for trial in range(10_000):
        secret = trial.to_bytes(4, "big")
        nonce = RNG.randbytes(16)
        seen.add(commit(secret, 1 + trial % 8, nonce).cm)
    assert len(seen) == 10_000


def test_confirmation_bound_paper_arithmetic():
    layout = PeriodLayout(180 * 24 * 3600, 1000)
    bound = confirmation_bound(layout)
    assert bound.nominal_hours == Fraction(432, 100)  # 4.32 hours exactly
    assert bound.worst_case_hours == 2 * bound.nominal_hours


def test_confirmation_bound_other_layouts():
    assert confirmation_bound(PeriodLayout(10 * 24 * 3600, 10)).nominal_hours == 24
    fine = PeriodLayout(3600, 3600)
    assert fine.period_len == 1  # one-second periods
    with pytest.raises(ValueError):
        PeriodLayout(3600, 1)
