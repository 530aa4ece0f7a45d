"""Randomized hyperedge generation.

The estimators in this package poll the graph with reverse-reachable walks:

- A *pair hyperedge* is drawn by sampling an arc (u, v) with probability
  proportional to its interaction strength, then running two reverse walks
  from u and from v inside one lazily sampled live-edge world. The walk
  results N1, N2 are stored as the disjoint partition (N1 minus N2,
  N2 minus N1, N1 intersect N2). A seed set S "fully covers" the hyperedge
  when it intersects both N1 and N2; the fraction of fully covered hyperedges
  times the total interaction strength T is an unbiased activity estimate.
- A *lower-bound hyperedge* keeps only the intersection N1 and N2; hitting it
  means one common seed reaches both endpoints.
- An *upper-bound hyperedge* is a single reverse walk from a node sampled
  proportionally to its incident strength w; the covered fraction times
  W = sum(w) estimates the upper bound. With uniform root sampling the same
  machinery estimates plain influence (scaled by n).

Both walks of a pair share one EdgeStateCache, so they observe a single
consistent random world without materializing it.
"""

from __future__ import annotations

from dataclasses import dataclass
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import kernels
from .errors import DegenerateWeightsError, ModelViolationError
from .graph import Graph
from .rng import stream_state

IC = "ic"
LT = "lt"
_MODEL_FLAGS = {IC: kernels.IC_FLAG, LT: kernels.LT_FLAG}

_LT_TOL = 1e-9


@dataclass(frozen=True)
class PairHyperedge:
    """Disjoint partition of the two reverse-reachable sets of a sampled arc."""

    n1: frozenset  # reaches only the arc's source
    n2: frozenset  # reaches only the arc's target
    n3: frozenset  # reaches both

    def first(self) -> frozenset:
        """Nodes covering the source-side walk."""
        return self.n1 | self.n3

    def second(self) -> frozenset:
        """Nodes covering the target-side walk."""
        return self.n2 | self.n3

    def covered_by(self, seeds) -> bool:
        s = set(seeds)
        return bool(s & self.first()) and bool(s & self.second())


# -- alias sampling -----------------------------------------------------------


def build_alias(weights) -> tuple[np.ndarray, np.ndarray]:
    """Vose alias table for O(1) draws from a finite non-negative distribution."""
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.shape[0] == 0:
        raise ValueError("weights must be a nonempty 1-d array")
    if not np.all(np.isfinite(w)) or w.min() < 0.0:
        raise ValueError("weights must be finite and non-negative")
    total = float(w.sum())
    if total <= 0.0:
        raise DegenerateWeightsError("all sampling weights are zero")
    k = w.shape[0]
    scaled = w * (k / total)
    prob = np.ones(k, dtype=np.float64)
    alias = np.arange(k, dtype=np.int64)
    small = [i for i in range(k) if scaled[i] < 1.0]
    large = [i for i in range(k) if scaled[i] >= 1.0]
    while small and large:
        s = small.pop()
        l = large.pop()
        prob[s] = scaled[s]
        alias[s] = l
        scaled[l] -= 1.0 - scaled[s]
        if scaled[l] < 1.0:
            small.append(l)
        else:
            large.append(l)
    # float residue: whatever is left gets probability one of itself
    return prob, alias


def alias_sample(prob: np.ndarray, alias: np.ndarray, rng: np.random.Generator) -> int:
    k = prob.shape[0]
    r = float(rng.random()) * k
    j = min(int(r), k - 1)
    return int(j if r - j < prob[j] else alias[j])


def sample_activity_arc(g: Graph, rng: np.random.Generator) -> int:
    """Draw one arc id with probability A(arc) / T."""
    prob, alias = build_alias(g.A)
    return alias_sample(prob, alias, rng)


# -- single-draw API ----------------------------------------------------------


class EdgeStateCache:
    """Lazily sampled live-edge world shared by reverse walks.

    IC arc states are cached per arc, LT in-arc choices per node. reset()
    starts a fresh random world; between resets every query of the same arc
    state sees the same value.
    """

    def __init__(self, g: Graph):
        p = g.packed()
        self.graph = g
        self.ic_state = np.zeros(p.m, dtype=np.uint8)
        self.ic_stamp = np.zeros(p.m, dtype=np.int64)
        self.lt_choice = np.full(p.n, -1, dtype=np.int64)
        self.lt_stamp = np.zeros(p.n, dtype=np.int64)
        self.gen = 1
        self._vis = np.zeros(p.n, dtype=np.int64)
        self._vgen = 0
        self._queue = np.empty(p.n, dtype=np.int64)
        self._arc_in_pos = None

    def reset(self) -> None:
        self.gen += 1

    def _in_pos(self, arc: int) -> int:
        if self._arc_in_pos is None:
            pos = np.empty(self.graph.m, dtype=np.int64)
            pos[self.graph.in_arcs] = np.arange(self.graph.m, dtype=np.int64)
            self._arc_in_pos = pos
        return int(self._arc_in_pos[arc])

    def ic_arc_state(self, arc: int):
        """True/False if the arc's IC state was sampled this world, else None."""
        p = self._in_pos(arc)
        if self.ic_stamp[p] != self.gen:
            return None
        return bool(self.ic_state[p])

    def lt_chosen_arc(self, v: int):
        """Arc id the node picked (-1 for none), or None if not yet decided."""
        if self.lt_stamp[v] != self.gen:
            return None
        p = self.lt_choice[v]
        return -1 if p < 0 else int(self.graph.in_arcs[p])


def check_lt_mass(g: Graph) -> None:
    mass = g.lt_in_mass()
    worst = float(mass.max())
    if worst > 1.0 + _LT_TOL:
        raise ModelViolationError(
            f"LT needs per-node incoming probability mass <= 1, found {worst:.12g}")


def _model_flag(model: str, g: Graph) -> int:
    if model not in _MODEL_FLAGS:
        raise ValueError(f"unknown diffusion model {model!r}")
    if model == LT:
        check_lt_mass(g)
    return _MODEL_FLAGS[model]


def reverse_reachable(g: Graph, model: str, target: int,
                      cache: EdgeStateCache, rng: np.random.Generator) -> frozenset:
    """Reverse-reachable set of `target` in the cache's live-edge world."""
    if target < 0 or target >= g.n:
        raise ValueError("target out of range")
    flag = _model_flag(model, g)
    p = g.packed()
    state = stream_state(int(rng.integers(0, 2 ** 63)), 0)
    cache._vgen += 1
    count, _ = kernels._rr_collect(
        target, flag, p.in_ptr, p.in_src, p.in_B,
        cache.ic_state, cache.ic_stamp, cache.lt_choice, cache.lt_stamp, cache.gen,
        cache._vis, cache._vgen, cache._queue, state,
        kernels.STOP_NONE, cache._vis, 0, cache._vis, 0)
    return frozenset(int(x) for x in cache._queue[:count])


def generate_pair_hyperedge(g: Graph, model: str, rng: np.random.Generator,
                            cache: EdgeStateCache | None = None, debug: bool = False):
    """One pair hyperedge; with debug=True also the arc and the raw walk sets."""
    arc = sample_activity_arc(g, rng)
    if cache is None:
        cache = EdgeStateCache(g)
    cache.reset()
    r1 = reverse_reachable(g, model, int(g.src[arc]), cache, rng)
    r2 = reverse_reachable(g, model, int(g.dst[arc]), cache, rng)
    he = PairHyperedge(n1=r1 - r2, n2=r2 - r1, n3=r1 & r2)
    if debug:
        return he, arc, r1, r2
    return he


def generate_lower_hyperedge(g: Graph, model: str, rng: np.random.Generator,
                             cache: EdgeStateCache | None = None) -> frozenset:
    """Intersection of the two walks of a freshly sampled pair."""
    he = generate_pair_hyperedge(g, model, rng, cache=cache)
    return he.n3


def generate_upper_hyperedge(g: Graph, model: str, rng: np.random.Generator,
                             cache: EdgeStateCache | None = None) -> frozenset:
    """Single reverse walk from a node sampled proportionally to w."""
    if g.W <= 0.0:
        raise DegenerateWeightsError("graph has zero total node weight")
    prob, alias = build_alias(g.w)
    root = alias_sample(prob, alias, rng)
    if cache is None:
        cache = EdgeStateCache(g)
    cache.reset()
    return reverse_reachable(g, model, root, cache, rng)


# -- batch engine -------------------------------------------------------------


class _Workspace:
    def __init__(self, n: int, m: int):
        self.ic_state = np.zeros(m, dtype=np.uint8)
        self.ic_stamp = np.zeros(m, dtype=np.int64)
        self.lt_choice = np.full(n, -1, dtype=np.int64)
        self.lt_stamp = np.zeros(n, dtype=np.int64)
        self.vis1 = np.zeros(n, dtype=np.int64)
        self.vis2 = np.zeros(n, dtype=np.int64)
        self.queue = np.empty(n, dtype=np.int64)
        self.nbuf = np.empty(n, dtype=np.int64)
        self.seed_stamp = np.zeros(n, dtype=np.int64)
        self.gen = 0
        self.sgen = 0


class PollingEngine:
    """Deterministic batched hyperedge generation and stopping counts.

    Work is cut into fixed-size chunks; chunk i of a batch consumes stream id
    (base + i) derived from the master seed, so results are identical for any
    worker count and reproducible for a fixed seed.
    """

    CHUNK = 4096

    def __init__(self, g: Graph, model: str, seed: int, threads: int = 1):
        self.g = g
        self.model = model
        self.flag = _model_flag(model, g)
        self.packed = g.packed()
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.threads = max(1, int(threads))
        self._stream = 0
        self._workspaces: list[_Workspace] = []
        self._arc_alias = None
        self._w_alias = None
        self._uniform_alias = None
        self.generated = 0  # total hyperedges drawn through this engine

    # workspace / sampler plumbing

    def _ws(self, i: int) -> _Workspace:
        while len(self._workspaces) <= i:
            self._workspaces.append(_Workspace(self.packed.n, self.packed.m))
        return self._workspaces[i]

    def _next_streams(self, count: int) -> int:
        base = self._stream
        self._stream += count
        return base

    def _arcs(self):
        if self._arc_alias is None:
            if self.g.T <= 0.0:
                raise DegenerateWeightsError("graph has zero total interaction strength")
            self._arc_alias = build_alias(self.g.A)
        return self._arc_alias

    def _nodes(self, uniform: bool):
        if uniform:
            if self._uniform_alias is None:
                self._uniform_alias = build_alias(np.ones(self.g.n))
            return self._uniform_alias
        if self._w_alias is None:
            if self.g.W <= 0.0:
                raise DegenerateWeightsError("graph has zero total node weight")
            self._w_alias = build_alias(self.g.w)
        return self._w_alias

    def _run_chunks(self, total: int, job) -> list:
        """Split `total` into CHUNK-sized pieces and run job(chunk_size, stream_id, ws)."""
        sizes = []
        left = total
        while left > 0:
            take = min(self.CHUNK, left)
            sizes.append(take)
            left -= take
        base = self._next_streams(len(sizes))
        results: list = [None] * len(sizes)

        def work(worker_id: int):
            ws = self._ws(worker_id)
            for ci in range(worker_id, len(sizes), self.threads):
                results[ci] = job(sizes[ci], base + ci, ws)

        if self.threads == 1 or len(sizes) == 1:
            work(0)
        else:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                list(pool.map(work, range(min(self.threads, len(sizes)))))
        return results

    @staticmethod
    def _merge(batches, stride: int):
        """Concatenate (nodes, used, ptr) chunk results into one pool block."""
        total_nodes = sum(int(u) for _, u, _ in batches)
        total_h = sum((p.shape[0] - 1) // stride for _, _, p in batches)
        nodes = np.empty(total_nodes, dtype=np.int32)
        ptr = np.empty(stride * total_h + 1, dtype=np.int64)
        ptr[0] = 0
        npos = 0
        hpos = 0
        for bnodes, used, bptr in batches:
            used = int(used)
            nodes[npos:npos + used] = bnodes[:used]
            ptr[hpos + 1:hpos + bptr.shape[0]] = bptr[1:] + npos
            npos += used
            hpos += bptr.shape[0] - 1
        return nodes, ptr

    # pools

    def pair_pool(self, count: int):
        p = self.packed
        prob, alias = self._arcs()

        def job(size, stream, ws):
            state = stream_state(self.seed, stream)
            nodes, used, ptr, gen = kernels.pair_pool_batch(
                size, self.flag, p.in_ptr, p.in_src, p.in_B,
                prob, alias, self.g.src, self.g.dst,
                ws.ic_state, ws.ic_stamp, ws.lt_choice, ws.lt_stamp,
                ws.vis1, ws.vis2, ws.queue, ws.nbuf, state, ws.gen)
            ws.gen = gen
            return nodes, used, ptr

        out = self._merge(self._run_chunks(count, job), 3)
        self.generated += count
        return out

    def lower_pool(self, count: int):
        p = self.packed
        prob, alias = self._arcs()

        def job(size, stream, ws):
            state = stream_state(self.seed, stream)
            nodes, used, ptr, gen = kernels.lower_pool_batch(
                size, self.flag, p.in_ptr, p.in_src, p.in_B,
                prob, alias, self.g.src, self.g.dst,
                ws.ic_state, ws.ic_stamp, ws.lt_choice, ws.lt_stamp,
                ws.vis1, ws.vis2, ws.queue, ws.nbuf, state, ws.gen)
            ws.gen = gen
            return nodes, used, ptr

        out = self._merge(self._run_chunks(count, job), 1)
        self.generated += count
        return out

    def single_pool(self, count: int, uniform: bool = False):
        p = self.packed
        prob, alias = self._nodes(uniform)

        def job(size, stream, ws):
            state = stream_state(self.seed, stream)
            nodes, used, ptr, gen = kernels.single_pool_batch(
                size, self.flag, p.in_ptr, p.in_src, p.in_B,
                prob, alias,
                ws.ic_state, ws.ic_stamp, ws.lt_choice, ws.lt_stamp,
                ws.vis1, ws.queue, state, ws.gen)
            ws.gen = gen
            return nodes, used, ptr

        out = self._merge(self._run_chunks(count, job), 1)
        self.generated += count
        return out

    # stopping counts (sequential by construction)

    def _seed_array(self, seeds) -> np.ndarray:
        arr = np.asarray(sorted(set(int(s) for s in seeds)), dtype=np.int64)
        if arr.shape[0] == 0:
            raise ValueError("seed set must be nonempty")
        if arr.min() < 0 or arr.max() >= self.g.n:
            raise ValueError("seed id out of range")
        return arr

    def stopping_covered(self, objective: str, seeds, ups1: float, max_m: int):
        """Generate hyperedges until `ups1` are covered by `seeds` or max_m drawn.

        Returns (covered, generated).
        """
        p = self.packed
        arr = self._seed_array(seeds)
        ws = self._ws(0)
        ws.sgen += 1
        ws.seed_stamp[arr] = ws.sgen
        state = stream_state(self.seed, self._next_streams(1))
        if objective in ("activity", "lower"):
            prob, alias = self._arcs()
            covered, m, gen = kernels.estimate_pair_stop(
                objective == "activity", self.flag, p.in_ptr, p.in_src, p.in_B,
                prob, alias, self.g.src, self.g.dst,
                ws.ic_state, ws.ic_stamp, ws.lt_choice, ws.lt_stamp,
                ws.vis1, ws.vis2, ws.queue, state,
                arr, ws.seed_stamp, ws.sgen, float(ups1), np.int64(max_m), ws.gen)
        elif objective in ("upper", "influence"):
            prob, alias = self._nodes(objective == "influence")
            covered, m, gen = kernels.estimate_single_stop(
                self.flag, p.in_ptr, p.in_src, p.in_B,
                prob, alias,
                ws.ic_state, ws.ic_stamp, ws.lt_choice, ws.lt_stamp,
                ws.vis1, ws.queue, state,
                ws.seed_stamp, ws.sgen, float(ups1), np.int64(max_m), ws.gen)
        else:
            raise ValueError(f"unknown objective {objective!r}")
        ws.gen = gen
        self.generated += int(m)
        return int(covered), int(m)

    def scale(self, objective: str) -> float:
        """Multiplier turning a covered fraction into an objective estimate."""
        if objective in ("activity", "lower"):
            return self.g.T
        if objective == "upper":
            return self.g.W
        if objective == "influence":
            return float(self.g.n)
        raise ValueError(f"unknown objective {objective!r}")

    # forward simulation

    def forward_counts(self, seeds, trials: int):
        """Sum over trials of (both-endpoint arcs, touched arcs, active nodes)."""
        p = self.packed
        arr = self._seed_array(seeds)
        tot_deg = self.g.total_degree()

        def job(size, stream, ws):
            state = stream_state(self.seed, stream)
            both, any_, active, gen = kernels.forward_counts(
                size, self.flag, p.out_ptr, p.out_dst, p.out_B, p.out_in_pos,
                p.in_ptr, p.in_src, p.in_B, tot_deg,
                arr, ws.vis1, ws.lt_choice, ws.lt_stamp, ws.queue, state, ws.gen)
            ws.gen = gen
            return both, any_, active

        parts = self._run_chunks(trials, job)
        both = sum(int(b) for b, _, _ in parts)
        any_ = sum(int(a) for _, a, _ in parts)
        active = sum(int(c) for _, _, c in parts)
        return both, any_, active
