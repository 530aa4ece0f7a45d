"""Hypergraph coverage: pools, inverted indexes, greedy seed selection.

Two pool layouts back the estimators:

- PairPool: hyperedges split into three disjoint node sections (only-first,
  only-second, both). A seed set fully covers a hyperedge when it hits the
  first walk (sections 1 or 3) and the second walk (sections 2 or 3).
- SinglePool: one node set per hyperedge, covered when hit at all.

greedy_pair_cover keeps every node's marginal gain (number of hyperedges the
node would newly fully cover) incrementally up to date while selecting; the
identity it relies on is that a node's gain decomposes into its both-sections
memberships not yet fully covered plus the partial memberships whose opposite
walk is already covered. CoverageState/marginal_gain implement the same
quantity naively from scratch and exist so tests can audit the incremental
version step by step.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .polling import PairHyperedge


class _ColumnPool:
    """Growable column store: flat node array plus section pointers."""

    stride = 1

    def __init__(self, n: int):
        self.n = int(n)
        self._blocks: list[tuple[np.ndarray, np.ndarray]] = []
        self._nodes = np.empty(0, dtype=np.int32)
        self._ptr = np.zeros(1, dtype=np.int64)
        self._dirty = False

    def append_block(self, nodes: np.ndarray, ptr: np.ndarray) -> None:
        if (ptr.shape[0] - 1) % self.stride != 0:
            raise ValueError("block pointer array does not match the pool stride")
        self._blocks.append((nodes, ptr))
        self._dirty = True

    def _consolidate(self) -> None:
        if not self._dirty:
            return
        blocks = [(self._nodes, self._nodes.shape[0], self._ptr)] + \
                 [(nd, nd.shape[0], pt) for nd, pt in self._blocks]
        total_nodes = sum(b[1] for b in blocks)
        total_h = sum((b[2].shape[0] - 1) // self.stride for b in blocks)
        nodes = np.empty(total_nodes, dtype=np.int32)
        ptr = np.empty(self.stride * total_h + 1, dtype=np.int64)
        ptr[0] = 0
        npos = 0
        hpos = 0
        for bnodes, used, bptr in blocks:
            nodes[npos:npos + used] = bnodes[:used]
            ptr[hpos + 1:hpos + bptr.shape[0]] = bptr[1:] + npos
            npos += used
            hpos += bptr.shape[0] - 1
        self._nodes = nodes
        self._ptr = ptr
        self._blocks = []
        self._dirty = False

    @property
    def nodes(self) -> np.ndarray:
        self._consolidate()
        return self._nodes

    @property
    def ptr(self) -> np.ndarray:
        self._consolidate()
        return self._ptr

    def __len__(self) -> int:
        self._consolidate()
        return (self._ptr.shape[0] - 1) // self.stride


class PairPool(_ColumnPool):
    """Pool of pair hyperedges (three node sections per hyperedge)."""

    stride = 3

    def get(self, h: int) -> PairHyperedge:
        nodes, ptr = self.nodes, self.ptr
        a, b, c, d = ptr[3 * h], ptr[3 * h + 1], ptr[3 * h + 2], ptr[3 * h + 3]
        return PairHyperedge(
            n1=frozenset(int(x) for x in nodes[a:b]),
            n2=frozenset(int(x) for x in nodes[b:c]),
            n3=frozenset(int(x) for x in nodes[c:d]))

    @classmethod
    def from_hyperedges(cls, hyperedges: Sequence[PairHyperedge], n: int) -> "PairPool":
        pool = cls(n)
        flat: list[int] = []
        ptr = [0]
        for he in hyperedges:
            for part in (he.n1, he.n2, he.n3):
                flat.extend(sorted(part))
                ptr.append(len(flat))
        pool.append_block(np.asarray(flat, dtype=np.int32),
                          np.asarray(ptr, dtype=np.int64))
        return pool


class SinglePool(_ColumnPool):
    """Pool of single-set hyperedges."""

    stride = 1

    def get(self, h: int) -> frozenset:
        nodes, ptr = self.nodes, self.ptr
        return frozenset(int(x) for x in nodes[ptr[h]:ptr[h + 1]])

    @classmethod
    def from_sets(cls, sets: Sequence, n: int) -> "SinglePool":
        pool = cls(n)
        flat: list[int] = []
        ptr = [0]
        for s in sets:
            flat.extend(sorted(s))
            ptr.append(len(flat))
        pool.append_block(np.asarray(flat, dtype=np.int32),
                          np.asarray(ptr, dtype=np.int64))
        return pool


@dataclass
class PairIndex:
    """Inverted per-node membership lists for one PairPool snapshot."""

    pool: PairPool
    H: int
    e1_ptr: np.ndarray
    e1: np.ndarray
    e2_ptr: np.ndarray
    e2: np.ndarray
    e3_ptr: np.ndarray
    e3: np.ndarray

    def memberships(self, v: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (self.e1[self.e1_ptr[v]:self.e1_ptr[v + 1]],
                self.e2[self.e2_ptr[v]:self.e2_ptr[v + 1]],
                self.e3[self.e3_ptr[v]:self.e3_ptr[v + 1]])


@dataclass
class SingleIndex:
    pool: SinglePool
    H: int
    ptr: np.ndarray
    ids: np.ndarray

    def memberships(self, v: int) -> np.ndarray:
        return self.ids[self.ptr[v]:self.ptr[v + 1]]


def build_index(pool):
    """Inverted index over a PairPool or SinglePool."""
    nodes, ptr = pool.nodes, pool.ptr
    H = len(pool)
    n = pool.n
    if isinstance(pool, PairPool):
        e1_ptr, e1 = kernels.build_section_index(nodes, ptr, 3, 0, H, n)
        e2_ptr, e2 = kernels.build_section_index(nodes, ptr, 3, 1, H, n)
        e3_ptr, e3 = kernels.build_section_index(nodes, ptr, 3, 2, H, n)
        return PairIndex(pool, H, e1_ptr, e1, e2_ptr, e2, e3_ptr, e3)
    if isinstance(pool, SinglePool):
        iptr, ids = kernels.build_section_index(nodes, ptr, 1, 0, H, n)
        return SingleIndex(pool, H, iptr, ids)
    raise TypeError(f"cannot index {type(pool).__name__}")


def degree(pool, seeds) -> int:
    """Number of hyperedges fully covered by the seed set."""
    s = set(int(x) for x in seeds)
    count = 0
    if isinstance(pool, (PairIndex, SingleIndex)):
        pool = pool.pool
    if isinstance(pool, PairPool):
        for h in range(len(pool)):
            he = pool.get(h)
            if (s & (he.n1 | he.n3)) and (s & (he.n2 | he.n3)):
                count += 1
        return count
    for h in range(len(pool)):
        if s & pool.get(h):
            count += 1
    return count


class CoverageState:
    """Reference coverage bookkeeping over a PairIndex (sets, from scratch).

    Tracks the selected set and the three disjoint hyperedge classes: first
    walk covered only (E1), second walk covered only (E2), fully covered (E3).
    """

    def __init__(self, index: PairIndex):
        self.index = index
        self.selected: list[int] = []
        self.E1: set[int] = set()
        self.E2: set[int] = set()
        self.E3: set[int] = set()

    def select(self, v: int) -> None:
        self.selected.append(int(v))
        self._recompute()

    def _recompute(self) -> None:
        pool = self.index.pool
        s = set(self.selected)
        self.E1.clear()
        self.E2.clear()
        self.E3.clear()
        for h in range(self.index.H):
            he = pool.get(h)
            c1 = bool(s & (he.n1 | he.n3))
            c2 = bool(s & (he.n2 | he.n3))
            if c1 and c2:
                self.E3.add(h)
            elif c1:
                self.E1.add(h)
            elif c2:
                self.E2.add(h)


def marginal_gain(state: CoverageState, v: int) -> int:
    """Hyperedges newly fully covered if v joined the selection.

    Counts v's both-sections memberships not already fully covered, plus its
    first-only memberships whose second walk is covered, plus its second-only
    memberships whose first walk is covered. Equals
    degree(S + v) - degree(S).
    """
    e1, e2, e3 = state.index.memberships(v)
    gain = sum(1 for h in e3 if h not in state.E3)
    gain += sum(1 for h in e1 if h in state.E2)
    gain += sum(1 for h in e2 if h in state.E1)
    return gain


@dataclass
class GreedyResult:
    seeds: list[int]
    covered: int
    mg_trace: np.ndarray | None = None


def greedy_pair_cover(index: PairIndex, k: int, record_trace: bool = False) -> GreedyResult:
    """Select k nodes greedily by incremental marginal gain on pair coverage.

    Ties go to the node with the larger partial-coverage potential
    (memberships whose own walk is not yet covered), then to the smaller id.
    """
    n = index.pool.n
    if k <= 0 or k > n:
        raise ValueError(f"k must be in 1..{n}")
    trace = np.zeros((k, n), dtype=np.int64) if record_trace \
        else np.zeros((1, 1), dtype=np.int64)
    chosen, covered = kernels.pair_greedy(
        index.pool.nodes, index.pool.ptr,
        index.e1_ptr, index.e1, index.e2_ptr, index.e2, index.e3_ptr, index.e3,
        n, index.H, k, record_trace, trace)
    return GreedyResult(seeds=[int(v) for v in chosen], covered=int(covered),
                        mg_trace=trace if record_trace else None)


def greedy_single_cover(index: SingleIndex, k: int) -> GreedyResult:
    """Exact greedy max coverage over single-set hyperedges; ties to smaller id."""
    n = index.pool.n
    if k <= 0 or k > n:
        raise ValueError(f"k must be in 1..{n}")
    chosen, covered = kernels.single_greedy(
        index.pool.nodes, index.pool.ptr, index.ptr, index.ids, n, index.H, k)
    return GreedyResult(seeds=[int(v) for v in chosen], covered=int(covered))
