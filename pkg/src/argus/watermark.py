"""Toy watermarking with a segment-and-combine version generator.

The scheme splices identifiers into reserved regions at segment starts; no
imperceptibility or robustness is modeled (robust embedding is a trust
assumption here, not a deliverable). Two modes share one mark layout:

* direct: a 128-bit id written into every segment region.
* family: each segment is embedded once per variant bit; assembling the
  variants by the bits of an index j yields 2^L distinguishable versions
  at the cost of exactly 2L segment embeddings. A family key rides along
  in the marks so a detector can map j back to the version's 128-bit id.
"""

from __future__ import annotations

from dataclasses import dataclass

from .crypto import H, be32

ID_LEN = 16  # lambda = 128
MAGIC = b"WMRK"
MODE_DIRECT = 1
MODE_FAMILY = 2
MARK_LEN = 4 + 1 + 2 + 2 + 1 + ID_LEN  # magic, mode, segs, seg idx, bit, payload
MAX_FAMILY_BITS = 20


class WatermarkError(Exception):
    pass


class DetectionError(WatermarkError):
    """No readable mark in the data."""


@dataclass(frozen=True)
class Asset:
    """Opaque payload to be watermarked."""

    payload: bytes


def version_id(family_key: bytes, index: int) -> bytes:
    """The 128-bit id carried by family version ``index`` (0-based)."""
    return H(b"wm-id", family_key, be32(index))[:ID_LEN]


def _mark(mode: int, segments: int, seg_idx: int, bit: int, payload: bytes) -> bytes:
    return MAGIC + bytes([mode]) + segments.to_bytes(2, "big") + seg_idx.to_bytes(2, "big") + bytes([bit]) + payload


def _chunk_bounds(total: int, segments: int):
    if segments < 1:
        raise WatermarkError("need at least one segment")
    size = total // segments
    if size < MARK_LEN:
        raise WatermarkError(
            f"payload too small: need {MARK_LEN} bytes of mark region per segment"
        )
    bounds = []
    for s in range(segments):
        start = s * size
        end = start + size if s < segments - 1 else total
        bounds.append((start, end))
    return bounds


def embed(asset: Asset, wid: bytes, segments: int = 1) -> bytes:
    """Watermarked copy carrying ``wid`` directly."""
    if len(wid) != ID_LEN:
        raise WatermarkError(f"id must be {ID_LEN} bytes")
    out = bytearray(asset.payload)
    for s, (start, _end) in enumerate(_chunk_bounds(len(out), segments)):
        out[start:start + MARK_LEN] = _mark(MODE_DIRECT, segments, s, 0, wid)
    return bytes(out)


def _parse_mark(data: bytes, offset: int):
    mark = data[offset:offset + MARK_LEN]
    if len(mark) < MARK_LEN or mark[:4] != MAGIC:
        raise DetectionError("no watermark found")
    mode = mark[4]
    segments = int.from_bytes(mark[5:7], "big")
    seg_idx = int.from_bytes(mark[7:9], "big")
    bit = mark[9]
    payload = mark[10:]
    return mode, segments, seg_idx, bit, payload


def detect_bits(copy: bytes):
    """(mode, version bits, key/id payload) of a marked copy."""
    mode, segments, _idx, bit0, payload = _parse_mark(copy, 0)
    if mode == MODE_DIRECT:
        return mode, 0, payload
    bits = [bit0]
    for _s, (start, _end) in enumerate(_chunk_bounds(len(copy), segments)[1:], start=1):
        m, _segs, _idx, bit, p = _parse_mark(copy, start)
        if m != MODE_FAMILY or p != payload:
            raise DetectionError("inconsistent family marks")
        bits.append(bit)
    index = 0
    for bit in bits:  # segment 0 carries the most significant bit
        index = (index << 1) | (bit & 1)
    return mode, index, payload


def detect(copy: bytes) -> bytes:
    """Recover the 128-bit id from a watermarked copy."""
    mode, index, payload = detect_bits(copy)
    if mode == MODE_DIRECT:
        return payload
    return version_id(payload, index)


def detect_version_index(copy: bytes) -> int:
    """Version index j of a family copy."""
    mode, index, _payload = detect_bits(copy)
    if mode != MODE_FAMILY:
        raise DetectionError("not a version-family copy")
    return index


class VersionFamily:
    """2^L versions assembled from per-segment variant pairs.

    Building the family embeds each segment twice (once per variant);
    assembling a version is pure concatenation.
    """

    def __init__(self, asset: Asset, l_seg: int, family_key: bytes):
        if not 1 <= l_seg <= MAX_FAMILY_BITS:
            raise WatermarkError(f"need 1 <= l_seg <= {MAX_FAMILY_BITS}")
        if len(family_key) != ID_LEN:
            raise WatermarkError(f"family key must be {ID_LEN} bytes")
        self.l_seg = l_seg
        self.family_key = family_key
        self.embed_calls = 0
        self._bounds = _chunk_bounds(len(asset.payload), l_seg)
        self._variants = []
        for s, (start, end) in enumerate(self._bounds):
            chunk = asset.payload[start:end]
            self._variants.append(
                (self._embed_segment(chunk, s, 0), self._embed_segment(chunk, s, 1))
            )

    def _embed_segment(self, chunk: bytes, seg_idx: int, bit: int) -> bytes:
        self.embed_calls += 1
        out = bytearray(chunk)
        out[:MARK_LEN] = _mark(MODE_FAMILY, self.l_seg, seg_idx, bit, self.family_key)
        return bytes(out)

    @property
    def size(self) -> int:
        return 1 << self.l_seg

    def version(self, index: int) -> bytes:
        """Copy number ``index`` (0-based), assembled by the bits of the index."""
        if not 0 <= index < self.size:
            raise WatermarkError("version index out of range")
        parts = []
        for s in range(self.l_seg):
            bit = (index >> (self.l_seg - 1 - s)) & 1
            parts.append(self._variants[s][bit])
        return b"".join(parts)

    def version_id(self, index: int) -> bytes:
        if not 0 <= index < self.size:
            raise WatermarkError("version index out of range")
        return version_id(self.family_key, index)


def segment_generate(asset: Asset, l_seg: int, family_key: bytes = None) -> VersionFamily:
    """Version family of size 2^l_seg over ``asset``."""
    if family_key is None:
        family_key = H(b"wm-family", asset.payload)[:ID_LEN]
    return VersionFamily(asset, l_seg, family_key)
