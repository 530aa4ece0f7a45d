"""Desk-scale exact oracles for the diffusion objectives.

Everything here is deliberately plain Python/NumPy, independent of the compiled
sampling kernels, so it can serve as the reference the estimators are tested
against. The enumeration routines walk every live-edge outcome of the cascade
model and therefore refuse instances beyond a hard outcome budget.

Objectives (for seed set S, live-edge outcome g, active set R = reachable(S)):

- "activity":  sum of A over arcs whose two endpoints are both in R.
- "lower":     sum of A over arcs whose two endpoints are both reachable from
               some single common seed (a lower bound on activity).
- "upper":     sum of the node weights w over R (an upper bound on activity,
               since each arc splits its strength over its endpoints).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import EnumerationLimitError, ModelViolationError
from .graph import Graph

IC = "ic"
LT = "lt"

OBJECTIVES = ("activity", "lower", "upper")

MAX_OUTCOMES = 1 << 20
_LT_TOL = 1e-9
_RESIDUAL_EPS = 1e-12


@dataclass(frozen=True)
class LiveEdgeGraph:
    """One realization of the random live-arc subgraph."""

    graph: Graph
    live: np.ndarray  # bool per arc


def _check_model(model: str) -> None:
    if model not in (IC, LT):
        raise ValueError(f"unknown diffusion model {model!r}")


def _check_lt_mass(g: Graph) -> None:
    mass = g.lt_in_mass()
    worst = float(mass.max()) if g.n else 0.0
    if worst > 1.0 + _LT_TOL:
        raise ModelViolationError(
            f"LT needs per-node incoming probability mass <= 1, found {worst:.12g}")


def _lt_choices(g: Graph):
    """Per node: list of (arc_id, probability) options, including (-1, residual)."""
    choices = []
    for v in range(g.n):
        arcs = g.in_arcs_of(v)
        opts = [(int(e), float(g.B[e])) for e in arcs if g.B[e] > 0.0]
        residual = 1.0 - sum(p for _, p in opts)
        if residual > _RESIDUAL_EPS:
            opts.append((-1, residual))
        if not opts:  # isolated target: always picks nothing
            opts = [(-1, 1.0)]
        choices.append(opts)
    return choices


def sample_live_edge(g: Graph, model: str, rng: np.random.Generator) -> LiveEdgeGraph:
    """Draw one live-edge outcome of the given cascade model."""
    _check_model(model)
    if model == IC:
        live = rng.random(g.m) < g.B
        return LiveEdgeGraph(g, live)
    _check_lt_mass(g)
    live = np.zeros(g.m, dtype=bool)
    for v in range(g.n):
        arcs = g.in_arcs_of(v)
        if arcs.shape[0] == 0:
            continue
        r = rng.random()
        acc = 0.0
        for e in arcs:
            acc += g.B[e]
            if r < acc:
                live[e] = True
                break
    return LiveEdgeGraph(g, live)


def forward_reachable(leg: LiveEdgeGraph, seeds) -> set[int]:
    """Nodes reachable from the seed set along live arcs (seeds included)."""
    g = leg.graph
    live = leg.live
    active = set(int(s) for s in seeds)
    frontier = list(active)
    while frontier:
        nxt = []
        for u in frontier:
            for e in g.out_arcs_of(u):
                if live[e]:
                    v = int(g.dst[e])
                    if v not in active:
                        active.add(v)
                        nxt.append(v)
        frontier = nxt
    return active


def enumerate_outcomes(g: Graph, model: str):
    """Yield (LiveEdgeGraph, probability) over every outcome of the model.

    Arcs with B in {0, 1} are deterministic under IC and do not blow up the
    outcome count. The outcome probabilities sum to 1 up to float rounding.
    Raises EnumerationLimitError when the outcome count would exceed
    MAX_OUTCOMES.
    """
    _check_model(model)
    if model == IC:
        free = np.flatnonzero((g.B > 0.0) & (g.B < 1.0))
        if free.shape[0] > 60 or 2 ** free.shape[0] > MAX_OUTCOMES:
            raise EnumerationLimitError(
                f"2^{free.shape[0]} IC outcomes exceed the enumeration budget")
        base = g.B >= 1.0
        probs = g.B[free]
        for bits in itertools.product((False, True), repeat=free.shape[0]):
            live = base.copy()
            p = 1.0
            for i, on in enumerate(bits):
                if on:
                    live[free[i]] = True
                    p *= probs[i]
                else:
                    p *= 1.0 - probs[i]
            yield LiveEdgeGraph(g, live), p
        return

    _check_lt_mass(g)
    choices = _lt_choices(g)
    total = 1
    for opts in choices:
        total *= len(opts)
        if total > MAX_OUTCOMES:
            raise EnumerationLimitError(
                "LT outcome count exceeds the enumeration budget")
    for combo in itertools.product(*choices):
        live = np.zeros(g.m, dtype=bool)
        p = 1.0
        for arc, prob in combo:
            p *= prob
            if arc >= 0:
                live[arc] = True
        yield LiveEdgeGraph(g, live), p


def _outcome_value(g: Graph, leg: LiveEdgeGraph, seeds, objective: str) -> float:
    if objective == "activity":
        active = forward_reachable(leg, seeds)
        return float(sum(g.A[e] for e in range(g.m)
                         if g.src[e] in active and g.dst[e] in active))
    if objective == "lower":
        covered = np.zeros(g.m, dtype=bool)
        for s in seeds:
            reach = forward_reachable(leg, [s])
            for e in range(g.m):
                if not covered[e] and g.src[e] in reach and g.dst[e] in reach:
                    covered[e] = True
        return float(g.A[covered].sum())
    if objective == "upper":
        active = forward_reachable(leg, seeds)
        return float(sum(g.w[v] for v in active))
    raise ValueError(f"unknown objective {objective!r}")


def exact_objective(g: Graph, model: str, seeds, objective: str) -> float:
    """Exact expected objective value by full outcome enumeration.

    An empty seed set is allowed and every objective values it at zero.
    """
    seeds = sorted(set(int(s) for s in seeds))
    if any(s < 0 or s >= g.n for s in seeds):
        raise ValueError("seed id out of range")
    if not seeds:
        return 0.0
    total = 0.0
    for leg, p in enumerate_outcomes(g, model):
        total += p * _outcome_value(g, leg, seeds, objective)
    return total


def mc_forward_estimate(g: Graph, model: str, seeds, trials: int,
                        rng: np.random.Generator) -> float:
    """Monte Carlo estimate of the activity objective by forward simulation."""
    seeds = list(set(int(s) for s in seeds))
    if trials <= 0:
        raise ValueError("trials must be positive")
    if not seeds:
        return 0.0
    acc = 0.0
    for _ in range(trials):
        leg = sample_live_edge(g, model, rng)
        active = forward_reachable(leg, seeds)
        acc += sum(g.A[e] for e in range(g.m)
                   if g.src[e] in active and g.dst[e] in active)
    return acc / trials


class ExactEvaluator:
    """Precomputed enumeration for evaluating many seed sets on one instance.

    Stores, per outcome, the single-source reachability closure of every node
    as a bitmask plus, per arc, the set of nodes whose closure contains both
    endpoints. Evaluating a seed set is then O(n + m) per outcome. Intended for
    brute-force optima and acceptance sweeps on instances with at most 63 nodes.
    """

    def __init__(self, g: Graph, model: str, max_outcomes: int = 1 << 16):
        if g.n > 63:
            raise EnumerationLimitError("bitmask evaluator supports up to 63 nodes")
        self.g = g
        self.model = model
        self.outcomes: list[tuple[float, list[int], list[int]]] = []
        count = 0
        for leg, p in enumerate_outcomes(g, model):
            count += 1
            if count > max_outcomes:
                raise EnumerationLimitError(
                    "instance has too many outcomes for the stored evaluator")
            adj: list[list[int]] = [[] for _ in range(g.n)]
            for e in np.flatnonzero(leg.live):
                adj[int(g.src[e])].append(int(g.dst[e]))
            closures = [0] * g.n
            for x in range(g.n):
                mask = 1 << x
                stack = [x]
                while stack:
                    u = stack.pop()
                    for v in adj[u]:
                        bit = 1 << v
                        if not mask & bit:
                            mask |= bit
                            stack.append(v)
                closures[x] = mask
            arc_cover = [0] * g.m
            for e in range(g.m):
                need = (1 << int(g.src[e])) | (1 << int(g.dst[e]))
                cov = 0
                for x in range(g.n):
                    if closures[x] & need == need:
                        cov |= 1 << x
                arc_cover[e] = cov
            self.outcomes.append((p, closures, arc_cover))

    def _seed_mask(self, seeds) -> int:
        mask = 0
        for s in seeds:
            if not 0 <= int(s) < self.g.n:
                raise ValueError("seed id out of range")
            mask |= 1 << int(s)
        return mask

    def objective(self, seeds, objective: str) -> float:
        g = self.g
        smask = self._seed_mask(seeds)
        sbits = [s for s in range(g.n) if smask >> s & 1]
        total = 0.0
        for p, closures, arc_cover in self.outcomes:
            if objective == "lower":
                val = 0.0
                for e in range(g.m):
                    if arc_cover[e] & smask:
                        val += g.A[e]
            else:
                reach = 0
                for s in sbits:
                    reach |= closures[s]
                if objective == "activity":
                    val = 0.0
                    for e in range(g.m):
                        if reach >> int(g.src[e]) & 1 and reach >> int(g.dst[e]) & 1:
                            val += g.A[e]
                elif objective == "upper":
                    val = float(sum(g.w[v] for v in range(g.n) if reach >> v & 1))
                elif objective == "influence":
                    val = float(bin(reach).count("1"))
                else:
                    raise ValueError(f"unknown objective {objective!r}")
            total += p * val
        return total

    def optimum(self, k: int, objective: str) -> tuple[float, tuple[int, ...]]:
        """Brute-force best seed set of size k."""
        best = -1.0
        best_set: tuple[int, ...] = ()
        for combo in itertools.combinations(range(self.g.n), k):
            val = self.objective(combo, objective)
            if val > best:
                best = val
                best_set = combo
        return best, best_set
