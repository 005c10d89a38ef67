"""Merkle trees, cached path verification, and the three-layer ID tree.

Internal nodes are H(left || right) over raw 32-byte digests. A level with
an odd node count duplicates its last node. Every node has a heap-order
position: the root is 1, the children of node p are 2p and 2p+1, so the
parent of p is p >> 1 and p's direction bit under its parent is p & 1.
Positions make paths self-describing and give the contract-side cache a
stable key.

The ID tree is three stacked stages: M licensee subtrees over N version
subtrees over K timestamp leaves

    leaf(x, y, T) = H(H(id_xy || T) || x || y)

The owner persists only the N version-subtree roots per licensee plus the
H(id) -> (x, y) lookup map: Theta(M*N) digests, independent of K. Queriers
supply the id and the timestamp stage is recomputed on the fly.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from .crypto import H, be32

DIGEST_LEN = 32


class MerkleError(Exception):
    pass


class NotFoundError(MerkleError):
    """Unknown id hash, or id inconsistent with the claimed coordinates."""


def fold(left: bytes, right: bytes) -> bytes:
    return hashlib.sha256(left + right).digest()


def tree_depth(n_leaves: int) -> int:
    if n_leaves < 1:
        raise MerkleError("need at least one leaf")
    return (n_leaves - 1).bit_length()


@dataclass(frozen=True)
class MerklePath:
    """Bottom-up inclusion path. ``leaf_position`` is the heap position of
    the leaf in the (possibly composite) tree; ancestor positions follow by
    shifting. A truncated path simply carries fewer siblings."""

    leaf: bytes
    leaf_position: int
    siblings: Tuple[bytes, ...]

    def byte_size(self) -> int:
        return DIGEST_LEN + 8 + DIGEST_LEN * len(self.siblings)


class MerkleTree:
    """Binary Merkle tree over a fixed leaf list."""

    def __init__(self, leaves: Sequence[bytes]):
        if not leaves:
            raise MerkleError("need at least one leaf")
        self.levels: List[List[bytes]] = [list(leaves)]
        level = self.levels[0]
        while len(level) > 1:
            nxt = []
            for i in range(0, len(level), 2):
                left = level[i]
                right = level[i + 1] if i + 1 < len(level) else left
                nxt.append(fold(left, right))
            self.levels.append(nxt)
            level = nxt

    @property
    def root(self) -> bytes:
        return self.levels[-1][0]

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def prove(self, index: int) -> MerklePath:
        if not 0 <= index < len(self.levels[0]):
            raise MerkleError(f"leaf index {index} out of range")
        siblings = []
        j = index
        for level in self.levels[:-1]:
            sib = j ^ 1
            siblings.append(level[sib] if sib < len(level) else level[j])
            j >>= 1
        return MerklePath(self.levels[0][index], (1 << self.depth) + index, tuple(siblings))


def _fold_path(leaf: bytes, position: int, siblings: Sequence[bytes]):
    """Yield (position, digest) for each ancestor computed while folding."""
    digest = leaf
    pos = position
    for sib in siblings:
        digest = fold(sib, digest) if pos & 1 else fold(digest, sib)
        pos >>= 1
        yield pos, digest


def verify(root: bytes, path: MerklePath) -> bool:
    """Full verification: the path must fold all the way to position 1."""
    digest, pos = path.leaf, path.leaf_position
    for pos, digest in _fold_path(path.leaf, path.leaf_position, path.siblings):
        pass
    return pos == 1 and digest == root


class PathCache:
    """Contract-side memo of verified internal nodes, keyed by position."""

    def __init__(self):
        self.nodes: Dict[int, bytes] = {}

    def get(self, position: int):
        return self.nodes.get(position)

    def __len__(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class CacheVerifyResult:
    ok: bool
    hash_ops: int


def cached_verify(cache: PathCache, root: bytes, path: MerklePath) -> CacheVerifyResult:
    """Verify a full or truncated ``path`` against ``root``.

    All submitted siblings are folded; a truncated path must terminate at
    a cached position (or the root), otherwise it is rejected and the
    caller must resubmit in full. On success, newly computed internal
    nodes and internal siblings enter the cache. On full paths the
    accept/reject outcome is exactly that of :func:`verify`.
    """
    digest, pos = path.leaf, path.leaf_position
    ops = 0
    new_nodes = []
    for height, sib in enumerate(path.siblings):
        if height >= 1:
            new_nodes.append((pos ^ 1, sib))
        digest = fold(sib, digest) if pos & 1 else fold(digest, sib)
        pos >>= 1
        ops += 1
        new_nodes.append((pos, digest))
    if pos == 1:
        ok = digest == root
    else:
        known = cache.get(pos)
        if known is None:
            return CacheVerifyResult(False, ops)  # truncation point not cached
        ok = known == digest
    if ok:
        for node_pos, node_digest in new_nodes:
            cache.nodes[node_pos] = node_digest
    return CacheVerifyResult(ok, ops)


def truncate_for_cache(path: MerklePath, cache: PathCache) -> MerklePath:
    """Client-side: drop the sibling suffix above the lowest cached ancestor."""
    pos = path.leaf_position
    ancestors = dict(_fold_path(path.leaf, path.leaf_position, path.siblings))
    for height in range(1, len(path.siblings) + 1):
        apos = pos >> height
        known = cache.get(apos)
        if known is not None and known == ancestors.get(apos):
            return MerklePath(path.leaf, path.leaf_position, path.siblings[:height])
    return path


# -- three-layer ID tree ----------------------------------------------------


def composite_leaf_position(m: int, n: int, k: int, x: int, y: int, t: int) -> int:
    """Global heap position of leaf (x, y, t) in the M/N/K stacked tree."""
    pos = (1 << tree_depth(m)) + (x - 1)
    pos = (pos << tree_depth(n)) + (y - 1)
    return (pos << tree_depth(k)) + (t - 1)


def id_leaf(id_xy: bytes, x: int, y: int, t: int) -> bytes:
    """Timestamp leaf for licensee x, version y, period t (all 1-based)."""
    return H(H(id_xy, be32(t)), be32(x), be32(y))


def _stage_root(id_xy: bytes, x: int, y: int, k: int) -> MerkleTree:
    return MerkleTree([id_leaf(id_xy, x, y, t) for t in range(1, k + 1)])


class IdTreeOwner:
    """Owner-side store: per-licensee version-subtree roots plus the id map."""

    def __init__(self, m: int, n: int, k: int, layer2: List[List[bytes]],
                 idmap: Dict[bytes, Tuple[int, int]], root: bytes):
        self.m = m
        self.n = n
        self.k = k
        self.layer2 = layer2
        self.idmap = idmap
        self.root = root

    # -- storage accounting

    def digest_count(self) -> int:
        return self.m * self.n + len(self.idmap)

    def storage_bytes(self) -> int:
        """Digest bytes persisted by the owner (layer-2 roots + id-map keys)."""
        return DIGEST_LEN * self.digest_count()

    def storage_bytes_per_licensee(self) -> int:
        return self.storage_bytes() // self.m

    # -- queries

    def locate(self, id_xy: bytes) -> Tuple[int, int]:
        key = H(id_xy)
        if key not in self.idmap:
            raise NotFoundError("unknown id hash")
        return self.idmap[key]

    def leaf_position(self, x: int, y: int, t: int) -> int:
        return composite_leaf_position(self.m, self.n, self.k, x, y, t)

    def query(self, x: int, y: int, t: int, id_xy: bytes) -> MerklePath:
        """Full path from leaf(x, y, t) to the global root.

        The timestamp stage is recomputed from the supplied id; the two
        upper stages are served from the persisted digests.
        """
        if not (1 <= x <= self.m and 1 <= y <= self.n and 1 <= t <= self.k):
            raise MerkleError("coordinates out of range")
        if self.locate(id_xy) != (x, y):
            raise NotFoundError("id does not belong to the claimed coordinates")
        stage_k = _stage_root(id_xy, x, y, self.k)
        if stage_k.root != self.layer2[x - 1][y - 1]:
            raise NotFoundError("recomputed version subtree mismatches the stored root")
        path_k = stage_k.prove(t - 1)
        stage_n = MerkleTree(self.layer2[x - 1])
        path_n = stage_n.prove(y - 1)
        stage_m = MerkleTree([MerkleTree(row).root for row in self.layer2])
        path_m = stage_m.prove(x - 1)
        return MerklePath(
            path_k.leaf,
            self.leaf_position(x, y, t),
            path_k.siblings + path_n.siblings + path_m.siblings,
        )


def build_id_tree(ids: Sequence[Sequence[bytes]], k: int) -> IdTreeOwner:
    """Build the composite tree over an M x N id matrix and K periods.

    Returns the owner store; the global root is ``owner.root``. Raises on
    duplicate ids.
    """
    m = len(ids)
    if m < 1 or k < 1:
        raise MerkleError("need at least one licensee and one period")
    n = len(ids[0])
    if n < 1 or any(len(row) != n for row in ids):
        raise MerkleError("id matrix must be rectangular and nonempty")
    flat = [i for row in ids for i in row]
    if len(set(flat)) != len(flat):
        raise MerkleError("duplicate ids")
    layer2 = []
    idmap: Dict[bytes, Tuple[int, int]] = {}
    for xi, row in enumerate(ids, start=1):
        roots = []
        for yi, id_xy in enumerate(row, start=1):
            roots.append(_stage_root(id_xy, xi, yi, k).root)
            idmap[H(id_xy)] = (xi, yi)
        layer2.append(roots)
    root = MerkleTree([MerkleTree(row).root for row in layer2]).root
    return IdTreeOwner(m, n, k, layer2, idmap, root)
