"""Seed selection: stopping rule, stop-and-stare loops, sandwich framework.

The activity objective is neither submodular nor supermodular, so it cannot be
greedily maximized with a guarantee. The sandwich approach runs the guaranteed
machinery on a submodular lower bound and a submodular upper bound, runs the
plain greedy heuristic on the activity pool as a third candidate, estimates
the true activity of all three seed sets, and returns the best. The quality of
the result relative to the (unknown) optimum is then bounded by a computable
ratio derived from how tight the upper bound is at its own maximizer.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import coverage
from .graph import Graph
from .polling import PollingEngine

ALGORITHMS = ("sandwich", "activity-greedy", "lower", "upper",
              "infmax", "degree", "pagerank")

DEFAULT_EPSILON = 0.1
DEFAULT_DELTA = 0.001
DEFAULT_GAMMA = 0.05
DEFAULT_MAX_SAMPLES = 10 ** 8


def upsilon(epsilon: float, delta: float) -> float:
    """Sample-count constant of the sequential stopping rule."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must be in (0, 1)")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must be in (0, 1)")
    return 4.0 * (math.e - 2.0) * math.log(2.0 / delta) / (epsilon * epsilon)


def upsilon1(epsilon: float, delta: float) -> float:
    """Covered-count threshold certifying a (epsilon, delta) relative estimate."""
    return 1.0 + (1.0 + epsilon) * upsilon(epsilon, delta)


@dataclass(frozen=True)
class StoppingConfig:
    """Error budget for selection runs.

    The selection guarantee splits (epsilon, delta) into an estimation half
    (epsilon1, delta1) governing the stopping threshold and an optimization
    half (epsilon2, delta2); the split satisfies
    epsilon1 + (1 - 1/e) * epsilon2 <= epsilon and delta1 + delta2 <= delta.
    gamma is the relative error of the standalone activity estimates used by
    the sandwich comparison step.
    """

    epsilon: float = DEFAULT_EPSILON
    delta: float = DEFAULT_DELTA
    gamma: float = DEFAULT_GAMMA
    max_samples: int = DEFAULT_MAX_SAMPLES

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0 - 1.0 / math.e:
            raise ValueError("epsilon must be in (0, 1 - 1/e)")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must be in (0, 1)")
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must be in (0, 1)")
        if self.max_samples < 1:
            raise ValueError("max_samples must be positive")

    @property
    def epsilon1(self) -> float:
        return self.epsilon / 2.0

    @property
    def epsilon2(self) -> float:
        return self.epsilon / (2.0 * (1.0 - 1.0 / math.e))

    @property
    def delta1(self) -> float:
        return self.delta / 2.0

    @property
    def delta2(self) -> float:
        return self.delta / 2.0

    @property
    def alpha(self) -> float:
        """Approximation factor of the guaranteed selection runs."""
        return 1.0 - 1.0 / math.e - self.epsilon


@dataclass
class StoppingEstimate:
    value: float
    samples: int
    covered: int
    certified: bool


def estimate_with_stopping(engine: PollingEngine, objective: str, seeds,
                           epsilon: float, delta: float,
                           max_samples: int = DEFAULT_MAX_SAMPLES) -> StoppingEstimate:
    """Relative-error estimate of an objective at a fixed seed set.

    Draws hyperedges until the covered count reaches the stopping threshold,
    which certifies a (epsilon, delta) multiplicative estimate. If max_samples
    is exhausted first the current ratio is returned flagged uncertified (this
    is the only possible outcome when the true value is zero).
    """
    ups1 = upsilon1(epsilon, delta)
    covered, m = engine.stopping_covered(objective, seeds, ups1, max_samples)
    certified = covered >= ups1
    value = engine.scale(objective) * covered / m if m > 0 else 0.0
    return StoppingEstimate(value=value, samples=m, covered=covered,
                            certified=certified)


# -- stop-and-stare selection ---------------------------------------------------


@dataclass
class SsaResult:
    objective: str
    seeds: list[int]
    estimate: float
    covered: int
    pool_size: int
    samples: int          # total hyperedges generated including doublings
    rounds: int
    certified: bool


def ssa_select(engine: PollingEngine, objective: str, k: int,
               config: StoppingConfig = StoppingConfig()) -> SsaResult:
    """Greedy selection over a growing hyperedge pool with a stopping exit.

    Generates an initial pool of ceil(threshold) hyperedges, selects k seeds
    by greedy coverage, and doubles the pool until the selected set covers at
    least the threshold, which certifies its estimate. For the submodular
    lower/upper/influence objectives the certified selection carries the
    (1 - 1/e - epsilon) guarantee; for the activity objective the same loop is
    a heuristic (the objective is not submodular) and the estimate returned
    for the chosen seeds is still certified by the same test.
    """
    if objective not in ("activity", "lower", "upper", "influence"):
        raise ValueError(f"unknown objective {objective!r}")
    if k <= 0 or k > engine.g.n:
        raise ValueError(f"k must be in 1..{engine.g.n}")
    ups1 = upsilon1(config.epsilon1, config.delta1)
    target = int(math.ceil(ups1))
    pool = coverage.PairPool(engine.g.n) if objective == "activity" \
        else coverage.SinglePool(engine.g.n)

    def fill(count: int) -> None:
        if objective == "activity":
            nodes, ptr = engine.pair_pool(count)
        elif objective == "lower":
            nodes, ptr = engine.lower_pool(count)
        else:
            nodes, ptr = engine.single_pool(count, uniform=objective == "influence")
        pool.append_block(nodes, ptr)

    total = 0
    rounds = 0
    fill(target)
    total += target
    while True:
        rounds += 1
        index = coverage.build_index(pool)
        if objective == "activity":
            res = coverage.greedy_pair_cover(index, k)
        else:
            res = coverage.greedy_single_cover(index, k)
        if res.covered >= ups1:
            certified = True
            break
        grow = len(pool)
        if total + grow > config.max_samples:
            certified = False
            break
        fill(grow)
        total += grow
    estimate = engine.scale(objective) * res.covered / len(pool)
    return SsaResult(objective=objective, seeds=res.seeds, estimate=estimate,
                     covered=res.covered, pool_size=len(pool), samples=total,
                     rounds=rounds, certified=certified)


# -- sandwich -------------------------------------------------------------------


@dataclass
class SandwichResult:
    seeds: list[int]
    source: str                   # which candidate won: "upper" | "lower" | "activity"
    activity_estimate: float
    ratio_bound: float
    certified: bool
    samples: int
    candidates: dict = field(default_factory=dict)


def sandwich_select(engine: PollingEngine, k: int,
                    config: StoppingConfig = StoppingConfig()) -> SandwichResult:
    """Best of the three candidate seed sets, with a computable quality bound.

    Runs the selection loop on the upper bound, the lower bound, and the
    activity heuristic; estimates the activity of each candidate with a
    (gamma, delta/4) stopping estimate; returns the argmax. The reported
    ratio bound is

        (1-gamma)^2 / (1+gamma)^2 * (1 - 1/e - epsilon)
        * activity(upper seeds) / upper(upper seeds)

    and lower-bounds the returned set's activity relative to the optimum
    whenever the upper chain certified.
    """
    res_u = ssa_select(engine, "upper", k, config)
    res_l = ssa_select(engine, "lower", k, config)
    res_a = ssa_select(engine, "activity", k, config)

    est_delta = config.delta / 4.0
    cache: dict[tuple[int, ...], StoppingEstimate] = {}

    def activity_of(seeds: list[int]) -> StoppingEstimate:
        key = tuple(sorted(seeds))
        if key not in cache:
            cache[key] = estimate_with_stopping(
                engine, "activity", seeds, config.gamma, est_delta,
                config.max_samples)
        return cache[key]

    est_au = activity_of(res_u.seeds)
    est_al = activity_of(res_l.seeds)
    est_aa = activity_of(res_a.seeds)
    est_uu = estimate_with_stopping(
        engine, "upper", res_u.seeds, config.gamma, est_delta, config.max_samples)

    gamma = config.gamma
    shrink = (1.0 - gamma) ** 2 / (1.0 + gamma) ** 2
    tightness = est_au.value / est_uu.value if est_uu.value > 0.0 else 0.0
    ratio_bound = shrink * config.alpha * tightness

    candidates = [("upper", res_u, est_au), ("lower", res_l, est_al),
                  ("activity", res_a, est_aa)]
    source, best_res, best_est = max(candidates, key=lambda c: c[2].value)

    certified = (res_u.certified and est_uu.certified
                 and est_au.certified and est_al.certified and est_aa.certified)
    samples = res_u.samples + res_l.samples + res_a.samples \
        + est_uu.samples + sum(e.samples for e in cache.values())
    detail = {
        name: {
            "seeds": res.seeds,
            "objective_estimate": res.estimate,
            "activity_estimate": est.value,
            "selection_certified": res.certified,
            "estimate_certified": est.certified,
        }
        for name, res, est in candidates
    }
    detail["upper"]["upper_estimate"] = est_uu.value
    detail["upper"]["upper_estimate_certified"] = est_uu.certified
    return SandwichResult(seeds=best_res.seeds, source=source,
                          activity_estimate=best_est.value,
                          ratio_bound=ratio_bound, certified=certified,
                          samples=samples, candidates=detail)


# -- baselines -----------------------------------------------------------------


def degree_seeds(g: Graph, k: int) -> list[int]:
    """Top-k nodes by total (in plus out) arc count; ties to smaller id."""
    if k <= 0 or k > g.n:
        raise ValueError(f"k must be in 1..{g.n}")
    deg = g.total_degree()
    order = np.lexsort((np.arange(g.n), -deg))
    return [int(v) for v in order[:k]]


def pagerank_scores(g: Graph, damping: float = 0.85, tol: float = 1e-9,
                    max_iters: int = 200) -> np.ndarray:
    """Power-iteration PageRank; dangling mass is spread uniformly."""
    n = g.n
    out_deg = g.out_degree.astype(np.float64)
    dangling = out_deg == 0.0
    scores = np.full(n, 1.0 / n)
    base = (1.0 - damping) / n
    for _ in range(max_iters):
        push = np.where(dangling, 0.0, scores / np.maximum(out_deg, 1.0))
        nxt = base + damping * (
            np.bincount(g.dst, weights=push[g.src], minlength=n)
            + scores[dangling].sum() / n)
        if np.abs(nxt - scores).sum() < tol:
            scores = nxt
            break
        scores = nxt
    return scores


def pagerank_seeds(g: Graph, k: int, damping: float = 0.85, tol: float = 1e-9,
                   max_iters: int = 200) -> list[int]:
    if k <= 0 or k > g.n:
        raise ValueError(f"k must be in 1..{g.n}")
    scores = pagerank_scores(g, damping=damping, tol=tol, max_iters=max_iters)
    order = np.lexsort((np.arange(g.n), -scores))
    return [int(v) for v in order[:k]]


def infmax_seeds(engine: PollingEngine, k: int,
                 config: StoppingConfig = StoppingConfig()) -> SsaResult:
    """Influence maximization: the upper-bound machinery with unit node weights."""
    return ssa_select(engine, "influence", k, config)


# -- evaluation metrics ---------------------------------------------------------


def interaction_ratio(engine: PollingEngine, seeds, trials: int = 10_000) -> float:
    """MC ratio of expected both-endpoint arcs to expected touched arcs."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    both, any_, _ = engine.forward_counts(seeds, trials)
    return both / any_ if any_ > 0 else 0.0


# -- selection orchestration -----------------------------------------------------


@dataclass
class SelectionReport:
    """Everything a selection run reports; seeds use the input file's ids."""

    algorithm: str
    k: int
    seeds: list[int]
    activity_estimate: float
    estimates: dict
    samples: int
    certified: bool
    runtime_ms: float
    model: str
    activity_setting: str
    rng_seed: int
    ratio_bound: float | None = None
    detail: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {
            "algorithm": self.algorithm,
            "k": self.k,
            "seeds": self.seeds,
            "activity_estimate": self.activity_estimate,
            "estimates": self.estimates,
            "samples": self.samples,
            "certified": self.certified,
            "runtime_ms": self.runtime_ms,
            "model": self.model,
            "activity_setting": self.activity_setting,
            "rng_seed": self.rng_seed,
        }
        if self.algorithm == "sandwich":
            out["ratio_bound"] = self.ratio_bound
        if self.detail:
            out["detail"] = self.detail
        return out


def select(g: Graph, model: str, algorithm: str, k: int,
           config: StoppingConfig = StoppingConfig(), seed: int = 0,
           threads: int = 1, activity_setting: str = "uniform") -> SelectionReport:
    """Run one selection algorithm end to end and package the report.

    Every algorithm's seeds also get a (gamma, delta/4) activity estimate so
    reports are comparable across algorithms.
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    engine = PollingEngine(g, model, seed, threads=threads)
    est_delta = config.delta / 4.0
    t0 = time.perf_counter()
    estimates: dict = {}
    detail: dict = {}
    ratio_bound = None

    if algorithm == "sandwich":
        res = sandwich_select(engine, k, config)
        seeds = res.seeds
        activity_est = res.activity_estimate
        ratio_bound = res.ratio_bound
        certified = res.certified
        estimates["activity"] = activity_est
        detail = dict(res.candidates)
        detail["winner"] = res.source
    elif algorithm in ("activity-greedy", "lower", "upper"):
        objective = "activity" if algorithm == "activity-greedy" else algorithm
        res = ssa_select(engine, objective, k, config)
        seeds = res.seeds
        estimates[objective] = res.estimate
        if objective == "activity":
            activity_est = res.estimate
            certified = res.certified
        else:
            est = estimate_with_stopping(engine, "activity", seeds, config.gamma,
                                         est_delta, config.max_samples)
            activity_est = est.value
            estimates["activity"] = est.value
            certified = res.certified and est.certified
    elif algorithm == "infmax":
        res = infmax_seeds(engine, k, config)
        seeds = res.seeds
        estimates["influence"] = res.estimate
        est = estimate_with_stopping(engine, "activity", seeds, config.gamma,
                                     est_delta, config.max_samples)
        activity_est = est.value
        estimates["activity"] = est.value
        certified = res.certified and est.certified
    else:  # degree, pagerank
        seeds = degree_seeds(g, k) if algorithm == "degree" else pagerank_seeds(g, k)
        est = estimate_with_stopping(engine, "activity", seeds, config.gamma,
                                     est_delta, config.max_samples)
        activity_est = est.value
        estimates["activity"] = est.value
        certified = est.certified

    runtime_ms = (time.perf_counter() - t0) * 1000.0
    original = [int(g.original_ids[v]) for v in seeds]
    return SelectionReport(
        algorithm=algorithm, k=k, seeds=original,
        activity_estimate=activity_est, estimates=estimates,
        samples=engine.generated, certified=certified, runtime_ms=runtime_ms,
        model=model, activity_setting=activity_setting, rng_seed=int(seed),
        ratio_bound=ratio_bound, detail=detail)
