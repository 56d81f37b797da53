"""Identity-keyed deterministic randomness.

Every draw is a pure function of ``(seed, structural key)``.  Nothing depends
on call order or on how many draws happened before, so replaying the same tape
against a graph and a perturbed copy of it yields identical values wherever
the keys coincide.  That is the device that makes coupled runs of a randomized
algorithm directly comparable: the only output differences are the ones forced
by the structural difference of the inputs.

Keys are built from three ingredients:

* a domain tag (edge rank, vertex side, matched-edge slot, ...),
* an :class:`InvocationPath` identifying the call site (phase, round, loop
  iteration, ...), which by construction never depends on graph content,
* the identity of the object drawn for (a vertex id, an unordered vertex
  pair, an oriented pair of layered-graph copies).

The mixing function is pinned so results are bit-for-bit reproducible across
machines and Python versions:

    mix(x)     = splitmix64 finalizer
                 (x ^= x >> 30; x *= 0xBF58476D1CE4E5B9;
                  x ^= x >> 27; x *= 0x94D049BB133111EB; x ^= x >> 31)
    fold(h, c) = mix((h * 0x9E3779B97F4A7C15 + c) mod 2**64)

A draw folds, in order: the tape base (fold of a fixed constant with the
seed), the domain tag, the invocation-path digest, and the identity
components.  Edge ranks are the raw 64-bit value scaled to [0, 1); restricting
ranks to any edge subset induces a uniformly random order on that subset, so
one tape plays the role of a random permutation of all vertex pairs.
"""

from __future__ import annotations

import hashlib

import numpy as np

_M64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

# Domain tags.  Never reuse a value.
TAG_EDGE_RANK = 1
TAG_VERTEX_SIDE = 2
TAG_EDGE_SLOT = 3
TAG_H_EDGE_RANK = 4
TAG_GENERATOR = 5
TAG_TRIAL = 6

_ROOT_DIGEST = 0x243F6A8885A308D3  # arbitrary fixed constant


def mix64(x: int) -> int:
    """splitmix64 finalizer on a 64-bit value."""
    x &= _M64
    x = ((x ^ (x >> 30)) * _MIX1) & _M64
    x = ((x ^ (x >> 27)) * _MIX2) & _M64
    return x ^ (x >> 31)


def fold(h: int, c: int) -> int:
    """Fold one key component into a running 64-bit digest."""
    return mix64((h * _GOLDEN + (c & _M64)) & _M64)


def _fold_np(h: np.ndarray, c) -> np.ndarray:
    x = (h * np.uint64(_GOLDEN) + c) & np.uint64(_M64)
    x = (x ^ (x >> np.uint64(30))) * np.uint64(_MIX1)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(_MIX2)
    return x ^ (x >> np.uint64(31))


_label_codes: dict[str, int] = {}


def _label_code(label: str) -> int:
    code = _label_codes.get(label)
    if code is None:
        digest = hashlib.blake2b(label.encode("utf-8"), digest_size=8).digest()
        code = int.from_bytes(digest, "little")
        _label_codes[label] = code
    return code


class InvocationPath:
    """A call-site identifier: a sequence of (label, index) frames.

    Two executions that take the same structural control path produce the
    same InvocationPath sequence regardless of graph content; algorithms in
    this package arrange their control flow so that this holds.
    """

    __slots__ = ("frames", "digest")

    def __init__(self, frames: tuple = (), digest: int = _ROOT_DIGEST):
        self.frames = frames
        self.digest = digest

    def child(self, label: str, index: int = 0) -> "InvocationPath":
        return InvocationPath(
            self.frames + ((label, index),),
            fold(fold(self.digest, _label_code(label)), index),
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, InvocationPath) and self.frames == other.frames

    def __hash__(self) -> int:
        return hash(self.frames)

    def __repr__(self) -> str:
        inner = "/".join(f"{lab}:{idx}" for lab, idx in self.frames)
        return f"InvocationPath({inner})"


ROOT = InvocationPath()


def derive_seed(base_seed: int, index: int) -> int:
    """Derive a child seed (e.g. one per trial) from a base seed."""
    return fold(fold(base_seed & _M64, TAG_TRIAL), index)


class RandomTape:
    """Deterministic source of identity-keyed random values."""

    __slots__ = ("seed", "_base")

    def __init__(self, seed: int):
        self.seed = seed
        self._base = fold(mix64(_GOLDEN), seed & _M64)

    # -- edge ranks ---------------------------------------------------------

    def edge_rank_bits(self, pair: tuple[int, int], scope: InvocationPath) -> int:
        u, v = pair
        if u > v:
            u, v = v, u
        h = fold(self._base, TAG_EDGE_RANK)
        h = fold(h, scope.digest)
        return fold(fold(h, u), v)

    def edge_rank(self, pair: tuple[int, int], scope: InvocationPath) -> float:
        """Rank of an unordered vertex pair, uniform on [0, 1)."""
        return self.edge_rank_bits(pair, scope) / 2.0**64

    def edge_rank_bits_bulk(
        self, us: np.ndarray, vs: np.ndarray, scope: InvocationPath
    ) -> np.ndarray:
        """Vectorized :meth:`edge_rank_bits`; pairs must satisfy us < vs."""
        h = fold(fold(self._base, TAG_EDGE_RANK), scope.digest)
        with np.errstate(over="ignore"):
            hs = _fold_np(np.full(len(us), h, dtype=np.uint64), us.astype(np.uint64))
            return _fold_np(hs, vs.astype(np.uint64))

    # -- layered-graph activation draws -------------------------------------

    def free_vertex_side(self, v: int, ell: int, scope: InvocationPath) -> int:
        """Boundary layer (0 or ell+1) for a free vertex, each with prob 1/2."""
        h = fold(self._base, TAG_VERTEX_SIDE)
        h = fold(h, scope.digest)
        bits = fold(fold(h, v), ell)
        return 0 if bits & 1 == 0 else ell + 1

    def matched_edge_slot(
        self, pair: tuple[int, int], ell: int, scope: InvocationPath
    ) -> tuple[tuple[int, int], int]:
        """Oriented copy and internal layer for a matched edge.

        Uniform over the 2*ell (orientation, layer) combinations.
        """
        if ell < 1:
            raise ValueError(f"ell must be >= 1, got {ell}")
        u, v = pair
        if u > v:
            u, v = v, u
        h = fold(self._base, TAG_EDGE_SLOT)
        h = fold(h, scope.digest)
        bits = fold(fold(fold(h, u), v), ell)
        j = bits % (2 * ell)
        orientation = (u, v) if j < ell else (v, u)
        return orientation, (j % ell) + 1

    # -- layered-graph bipartite greedy ranks --------------------------------

    def h_edge_rank_bits(
        self,
        lo: tuple[int, ...],
        hi: tuple[int, ...],
        scope: InvocationPath,
    ) -> int:
        """Rank bits for an edge between two layered-graph copies.

        ``lo`` and ``hi`` are copy keys (layer, coord0, coord1); the caller
        passes the lower-layer copy first.
        """
        h = fold(self._base, TAG_H_EDGE_RANK)
        h = fold(h, scope.digest)
        for c in lo:
            h = fold(h, c)
        for c in hi:
            h = fold(h, c)
        return h
