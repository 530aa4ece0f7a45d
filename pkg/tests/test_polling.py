"""Hyperedge generation: weighted sampling, consistent pair walks, pools."""

import numpy as np
import pytest

from actmax import (DegenerateWeightsError, EdgeStateCache,
                    ModelViolationError, PollingEngine, build_index, degree,
                    exact_objective, from_arcs, generate_lower_hyperedge,
                    generate_pair_hyperedge, generate_upper_hyperedge,
                    reverse_reachable)
from actmax.polling import build_alias, alias_sample, sample_activity_arc
from actmax.coverage import PairPool, SinglePool
from conftest import (bidirected_triangle, chain_graph, ic_instance,
                      lt_instance, random_seed_set, single_arc)

SEED = 550211


# -- weighted arc sampling ---------------------------------------------------------


def test_alias_uniform_chi_square():
    g = from_arcs(5, [(0, 1, 1, 1), (1, 2, 1, 1), (2, 3, 1, 1), (3, 4, 1, 1)])
    rng = np.random.default_rng(SEED)
    draws = 100_000
    counts = np.zeros(4)
    for _ in range(draws):
        counts[sample_activity_arc(g, rng)] += 1
    expected = draws / 4
    chi2 = float(((counts - expected) ** 2 / expected).sum())
    # chi-square critical value at 3 degrees of freedom, alpha = 0.01
    assert chi2 < 11.345


def test_alias_three_to_one():
    g = from_arcs(3, [(0, 1, 1.0, 3.0), (1, 2, 1.0, 1.0)])
    rng = np.random.default_rng(SEED + 1)
    draws = 100_000
    hits = sum(sample_activity_arc(g, rng) == 0 for _ in range(draws))
    assert abs(hits / draws - 0.75) < 0.01


def test_alias_single_arc():
    g = single_arc(0.5)
    rng = np.random.default_rng(SEED)
    assert all(sample_activity_arc(g, rng) == 0 for _ in range(50))


def test_alias_rejects_zero_weights():
    with pytest.raises(DegenerateWeightsError):
        build_alias(np.zeros(3))


def test_alias_preserves_distribution():
    rng = np.random.default_rng(SEED + 2)
    weights = rng.random(7)
    prob, alias = build_alias(weights)
    draws = 200_000
    counts = np.zeros(7)
    for _ in range(draws):
        counts[alias_sample(prob, alias, rng)] += 1
    target = weights / weights.sum()
    assert np.abs(counts / draws - target).max() < 0.01


# -- reverse reachability ----------------------------------------------------------


def test_rr_deterministic_chain():
    g = chain_graph(b=1.0)
    rng = np.random.default_rng(SEED)
    cache = EdgeStateCache(g)
    cache.reset()
    assert reverse_reachable(g, "ic", 2, cache, rng) == {0, 1, 2}


def test_rr_blocked():
    g = chain_graph(b=0.0)
    rng = np.random.default_rng(SEED)
    cache = EdgeStateCache(g)
    for model in ("ic", "lt"):
        cache.reset()
        assert reverse_reachable(g, model, 2, cache, rng) == {2}


def test_rr_lt_choice_frequencies():
    g = from_arcs(3, [(0, 2, 0.3, 1.0), (1, 2, 0.7, 1.0)])
    rng = np.random.default_rng(SEED + 3)
    cache = EdgeStateCache(g)
    draws = 100_000
    with_a = 0
    for _ in range(draws):
        cache.reset()
        rr = reverse_reachable(g, "lt", 2, cache, rng)
        assert rr in ({2, 0}, {2, 1})
        if rr == {2, 0}:
            with_a += 1
    assert abs(with_a / draws - 0.3) < 0.01


def test_rr_lt_mass_violation():
    g = from_arcs(3, [(0, 2, 0.8, 1.0), (1, 2, 0.7, 1.0)])
    rng = np.random.default_rng(SEED)
    with pytest.raises(ModelViolationError):
        reverse_reachable(g, "lt", 2, EdgeStateCache(g), rng)


# -- pair hyperedges ---------------------------------------------------------------


def test_pair_single_live_arc():
    g = single_arc(1.0)
    rng = np.random.default_rng(SEED)
    he = generate_pair_hyperedge(g, "ic", rng)
    assert he.n3 == {0}
    assert he.n1 == frozenset()
    assert he.n2 == {1}


def test_pair_single_blocked_arc():
    g = single_arc(0.0)
    rng = np.random.default_rng(SEED)
    he = generate_pair_hyperedge(g, "ic", rng)
    assert he.n1 == {0}
    assert he.n2 == {1}
    assert he.n3 == frozenset()


def test_pair_strongly_connected():
    g = bidirected_triangle(b=1.0)
    rng = np.random.default_rng(SEED)
    he = generate_pair_hyperedge(g, "ic", rng)
    assert he.n3 == {0, 1, 2}
    assert he.n1 == he.n2 == frozenset()


def test_pair_partition_reconstructs_walks():
    rng = np.random.default_rng(SEED + 4)
    pyrng = np.random.default_rng(SEED + 5)
    for _ in range(12):
        for model, make in (("ic", ic_instance), ("lt", lt_instance)):
            g = make(rng)
            cache = EdgeStateCache(g)
            for _ in range(25):
                he, arc, r1, r2 = generate_pair_hyperedge(
                    g, model, pyrng, cache=cache, debug=True)
                assert he.n1 | he.n3 == r1
                assert he.n2 | he.n3 == r2
                assert not he.n1 & he.n2
                assert not he.n1 & he.n3
                assert not he.n2 & he.n3
                assert int(g.src[arc]) in r1
                assert int(g.dst[arc]) in r2


def test_pair_cache_consistency_ic():
    # within one generation every queried arc keeps one state; the sampled
    # graph restricted to touched arcs is consistent across both walks
    rng = np.random.default_rng(SEED + 6)
    g = ic_instance(rng, n_lo=6, n_hi=8)
    cache = EdgeStateCache(g)
    for _ in range(50):
        he, arc, r1, r2 = generate_pair_hyperedge(g, "ic", rng, cache=cache,
                                                  debug=True)
        for e in range(g.m):
            state = cache.ic_arc_state(e)
            if state is None:
                continue
            again = cache.ic_arc_state(e)
            assert state == again
            if state and g.B[e] == 0.0:
                raise AssertionError("impossible live state for B=0 arc")
            if state is False and g.B[e] == 1.0:
                raise AssertionError("impossible blocked state for B=1 arc")


def test_pair_cache_consistency_lt():
    rng = np.random.default_rng(SEED + 7)
    g = lt_instance(rng)
    cache = EdgeStateCache(g)
    for _ in range(50):
        generate_pair_hyperedge(g, "lt", rng, cache=cache)
        for v in range(g.n):
            chosen = cache.lt_chosen_arc(v)
            if chosen is None or chosen == -1:
                continue
            assert int(g.dst[chosen]) == v
            assert cache.lt_chosen_arc(v) == chosen


# -- bound hyperedges --------------------------------------------------------------


def test_lower_single_arc():
    rng = np.random.default_rng(SEED)
    assert generate_lower_hyperedge(single_arc(1.0), "ic", rng) == {0}
    assert generate_lower_hyperedge(single_arc(0.0), "ic", rng) == frozenset()


def test_upper_root_frequencies():
    g = chain_graph(b=0.0)  # w = (0.5, 1.0, 0.5); B=0 keeps hyperedge = {root}
    rng = np.random.default_rng(SEED + 8)
    cache = EdgeStateCache(g)
    draws = 100_000
    counts = np.zeros(3)
    for _ in range(draws):
        he = generate_upper_hyperedge(g, "ic", rng, cache=cache)
        assert len(he) == 1
        counts[next(iter(he))] += 1
    freq = counts / draws
    assert abs(freq[1] - 0.5) < 0.01
    assert abs(freq[0] - 0.25) < 0.01
    assert abs(freq[2] - 0.25) < 0.01


def test_upper_degenerate_weights():
    g = from_arcs(2, [(0, 1, 0.5, 0.0)])
    rng = np.random.default_rng(SEED)
    with pytest.raises(DegenerateWeightsError):
        generate_upper_hyperedge(g, "ic", rng)


# -- unbiasedness against the exact oracle -------------------------------------------


def _mean_indicator(samples, total):
    return sum(samples) / total


def test_pair_estimator_unbiased():
    rng = np.random.default_rng(SEED + 9)
    pyrng = np.random.default_rng(SEED + 10)
    m = 4000
    for model, make in (("ic", ic_instance), ("lt", lt_instance)):
        for _ in range(3):
            g = make(rng)
            seeds = random_seed_set(rng, g.n)
            exact = exact_objective(g, model, seeds, "activity")
            cache = EdgeStateCache(g)
            hits = sum(
                generate_pair_hyperedge(g, model, pyrng, cache=cache).covered_by(seeds)
                for _ in range(m))
            p = exact / g.T
            slack = 3.0 * g.T * np.sqrt(p * (1 - p) / m) + 1e-9
            assert abs(g.T * hits / m - exact) < max(slack, 1e-9)


def test_lower_estimator_unbiased():
    rng = np.random.default_rng(SEED + 11)
    pyrng = np.random.default_rng(SEED + 12)
    m = 4000
    for model, make in (("ic", ic_instance), ("lt", lt_instance)):
        for _ in range(3):
            g = make(rng)
            seeds = set(random_seed_set(rng, g.n))
            exact = exact_objective(g, model, sorted(seeds), "lower")
            cache = EdgeStateCache(g)
            hits = sum(
                bool(seeds & generate_lower_hyperedge(g, model, pyrng, cache=cache))
                for _ in range(m))
            p = exact / g.T
            slack = 3.0 * g.T * np.sqrt(p * (1 - p) / m) + 1e-9
            assert abs(g.T * hits / m - exact) < max(slack, 1e-9)


def test_upper_estimator_unbiased():
    rng = np.random.default_rng(SEED + 13)
    pyrng = np.random.default_rng(SEED + 14)
    m = 4000
    for model, make in (("ic", ic_instance), ("lt", lt_instance)):
        for _ in range(3):
            g = make(rng)
            seeds = set(random_seed_set(rng, g.n))
            exact = exact_objective(g, model, sorted(seeds), "upper")
            cache = EdgeStateCache(g)
            hits = sum(
                bool(seeds & generate_upper_hyperedge(g, model, pyrng, cache=cache))
                for _ in range(m))
            p = exact / g.W
            slack = 3.0 * g.W * np.sqrt(p * (1 - p) / m) + 1e-9
            assert abs(g.W * hits / m - exact) < max(slack, 1e-9)


# -- batch engine -------------------------------------------------------------------


def _pool_from(engine_output, n, stride):
    nodes, ptr = engine_output
    pool = PairPool(n) if stride == 3 else SinglePool(n)
    pool.append_block(nodes, ptr)
    return pool


def test_engine_pool_unbiased():
    rng = np.random.default_rng(SEED + 15)
    m = 20_000
    for model, make in (("ic", ic_instance), ("lt", lt_instance)):
        g = make(rng)
        engine = PollingEngine(g, model, seed=99)
        pool = _pool_from(engine.pair_pool(m), g.n, 3)
        index = build_index(pool)
        for _ in range(4):
            seeds = random_seed_set(rng, g.n)
            exact = exact_objective(g, model, seeds, "activity")
            p = exact / g.T
            slack = 3.0 * g.T * np.sqrt(p * (1 - p) / m) + 1e-9
            est = g.T * degree(index, seeds) / m
            assert abs(est - exact) < max(slack, 1e-9)


def test_engine_lower_and_upper_pools_unbiased():
    rng = np.random.default_rng(SEED + 16)
    m = 20_000
    g = ic_instance(rng)
    engine = PollingEngine(g, "ic", seed=5)
    lower_pool = _pool_from(engine.lower_pool(m), g.n, 1)
    upper_pool = _pool_from(engine.single_pool(m), g.n, 1)
    lower_index = build_index(lower_pool)
    upper_index = build_index(upper_pool)
    for _ in range(4):
        seeds = random_seed_set(rng, g.n)
        for objective, index, scale in (("lower", lower_index, g.T),
                                        ("upper", upper_index, g.W)):
            exact = exact_objective(g, "ic", seeds, objective)
            p = exact / scale
            slack = 3.0 * scale * np.sqrt(p * (1 - p) / m) + 1e-9
            est = scale * degree(index, seeds) / m
            assert abs(est - exact) < max(slack, 1e-9)


def test_engine_influence_pool_unbiased():
    rng = np.random.default_rng(SEED + 17)
    m = 20_000
    g = ic_instance(rng)
    from actmax import ExactEvaluator
    ev = ExactEvaluator(g, "ic")
    engine = PollingEngine(g, "ic", seed=6)
    pool = _pool_from(engine.single_pool(m, uniform=True), g.n, 1)
    index = build_index(pool)
    seeds = random_seed_set(rng, g.n)
    exact = ev.objective(seeds, "influence")
    p = exact / g.n
    slack = 3.0 * g.n * np.sqrt(p * (1 - p) / m) + 1e-9
    assert abs(g.n * degree(index, seeds) / m - exact) < slack


def test_engine_deterministic_across_threads():
    rng = np.random.default_rng(SEED + 18)
    g = ic_instance(rng, n_lo=8, n_hi=10)
    outs = []
    for threads in (1, 3):
        engine = PollingEngine(g, "ic", seed=1234, threads=threads)
        nodes_a, ptr_a = engine.pair_pool(10_000)
        nodes_b, ptr_b = engine.lower_pool(5_000)
        outs.append((nodes_a, ptr_a, nodes_b, ptr_b))
    for a, b in zip(outs[0], outs[1]):
        assert np.array_equal(a, b)


def test_engine_deterministic_rerun_and_seed_sensitivity():
    rng = np.random.default_rng(SEED + 19)
    g = ic_instance(rng)
    a = PollingEngine(g, "ic", seed=7).pair_pool(5_000)
    b = PollingEngine(g, "ic", seed=7).pair_pool(5_000)
    c = PollingEngine(g, "ic", seed=8).pair_pool(5_000)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
    assert not (np.array_equal(a[0], c[0]) and np.array_equal(a[1], c[1]))


def test_engine_stopping_matches_pool_statistics():
    # the sequential stopping counter must see the same distribution as pools
    rng = np.random.default_rng(SEED + 20)
    g = ic_instance(rng)
    seeds = random_seed_set(rng, g.n)
    exact = exact_objective(g, "ic", seeds, "activity")
    engine = PollingEngine(g, "ic", seed=77)
    covered, m = engine.stopping_covered("activity", seeds, 1500.0, 500_000)
    if covered >= 1500:
        est = g.T * covered / m
        p = exact / g.T
        slack = 3.0 * g.T * np.sqrt(p * (1 - p) / m) + 1e-9
        assert abs(est - exact) < max(slack, 1e-9)
    else:
        assert exact < 0.05 * g.T  # only near-zero objectives may fail to stop


def test_engine_forward_counts_expectations():
    g = chain_graph(b=1.0)
    engine = PollingEngine(g, "ic", seed=3)
    both, touched, active = engine.forward_counts([0], 500)
    assert both == 1000 and touched == 1000 and active == 1500
    g0 = bidirected_triangle(b=0.0)
    engine0 = PollingEngine(g0, "ic", seed=3)
    both0, touched0, active0 = engine0.forward_counts([0], 200)
    assert both0 == 0 and touched0 == 800 and active0 == 200


def test_engine_rejects_bad_seeds():
    g = chain_graph()
    engine = PollingEngine(g, "ic", seed=1)
    with pytest.raises(ValueError):
        engine.stopping_covered("activity", [], 10.0, 100)
    with pytest.raises(ValueError):
        engine.stopping_covered("activity", [9], 10.0, 100)
