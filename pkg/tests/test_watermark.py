"""Watermark embed/detect and version-family tests."""

import random

import pytest

from argus.watermark import (
    Asset,
    DetectionError,
    MARK_LEN,
    VersionFamily,
    WatermarkError,
    detect,
    detect_bits,
    detect_version_index,
    embed,
    segment_generate,
    version_id,
)

RNG = random.Random(2024)


def asset(size=4096):
    return Asset(RNG.randbytes(size))


def test_roundtrip_identity():
    a = asset()
    wid = b"\x00" * 15 + b"\x01"
    assert detect(embed(a, wid)) == wid


def test_roundtrip_many_random_pairs():
    for _ in range(200):
        a = Asset(RNG.randbytes(RNG.randrange(MARK_LEN, 2048)))
        wid = RNG.randbytes(16)
        assert detect(embed(a, wid)) == wid


def test_distinct_ids_distinct_copies():
    a = asset()
    assert embed(a, b"\x01" * 16) != embed(a, b"\x02" * 16)


def test_payload_outside_marks_unchanged():
    a = asset(1000)
    copy = embed(a, b"\x07" * 16, segments=2)
    # two segments of 500 bytes; marks occupy the first MARK_LEN of each
    assert copy[MARK_LEN:500] == a.payload[MARK_LEN:500]
    assert copy[500 + MARK_LEN:] == a.payload[500 + MARK_LEN:]


def test_unwatermarked_detection_error():
    with pytest.raises(DetectionError):
        detect(b"\x00" * 256)


def test_payload_too_small():
    with pytest.raises(WatermarkError):
        embed(Asset(b"tiny"), b"\x01" * 16)
    with pytest.raises(WatermarkError):
        segment_generate(Asset(b"x" * (MARK_LEN * 2)), 4)


def test_bad_id_length():
    with pytest.raises(WatermarkError):
        embed(asset(), b"short")


# -- version families ---------------------------------------------------


def test_family_bit_selection():
    fam = segment_generate(asset(), 3)
    v5 = fam.version(5)  # binary 101: variants (w2, w1, w2)
    assert detect_bits(v5)[1] == 5
    marks = [v5[0:MARK_LEN], v5[1365:1365 + MARK_LEN]]
    # segment 0 carries bit 1, segment 1 carries bit 0
    assert marks[0][9] == 1
    assert marks[1][9] == 0


def test_family_size_and_bounds():
    fam = segment_generate(asset(), 4)
    assert fam.size == 16
    with pytest.raises(WatermarkError):
        fam.version(16)
    with pytest.raises(WatermarkError):
        segment_generate(asset(), 0)
    with pytest.raises(WatermarkError):
        segment_generate(asset(1 << 21), 21)


def test_embed_call_counter():
    fam = segment_generate(asset(), 10)
    for j in range(fam.size):
        fam.version(j)
    assert fam.embed_calls == 20


def test_family_detect_exhaustive():
    for l_seg in (1, 2, 4, 8):
        fam = segment_generate(asset(), l_seg, family_key=b"k" * 16)
        for j in range(fam.size):
            copy = fam.version(j)
            assert detect_version_index(copy) == j
            assert detect(copy) == version_id(b"k" * 16, j)
            assert detect(copy) == fam.version_id(j)


def test_family_versions_pairwise_distinct():
    for l_seg in (2, 4, 6, 8):
        fam = segment_generate(asset(), l_seg)
        versions = {fam.version(j) for j in range(fam.size)}
        assert len(versions) == fam.size


def test_direct_copy_is_not_family():
    copy = embed(asset(), b"\x05" * 16)
    with pytest.raises(DetectionError):
        detect_version_index(copy)
