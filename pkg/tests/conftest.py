"""Shared fixtures: random enumerable instances and small named graphs."""

import numpy as np

from actmax import from_arcs

IC_B_CHOICES = (0.0, 0.3, 0.5, 1.0)


def random_arc_pairs(rng, n, m):
    """Up to m distinct ordered (src, dst) pairs without self loops, sorted."""
    m = min(m, n * (n - 1))
    pairs = set()
    while len(pairs) < m:
        u = int(rng.integers(n))
        v = int(rng.integers(n))
        if u != v:
            pairs.add((u, v))
    return sorted(pairs)


def ic_instance(rng, n_lo=4, n_hi=10, m_hi=15, max_free=12, b_choices=IC_B_CHOICES):
    """Random IC instance small enough for full outcome enumeration.

    Arcs with B strictly between 0 and 1 each double the outcome count, so
    their number is capped; extras are forced deterministic.
    """
    n = int(rng.integers(n_lo, n_hi + 1))
    m = int(rng.integers(3, m_hi + 1))
    pairs = random_arc_pairs(rng, n, m)
    B = rng.choice(b_choices, size=len(pairs))
    free = np.flatnonzero((B > 0.0) & (B < 1.0))
    for idx in free[max_free:]:
        B[idx] = float(rng.choice((0.0, 1.0)))
    return from_arcs(n, [(u, v, float(b), 1.0) for (u, v), b in zip(pairs, B)])


def lt_instance(rng, n_lo=4, n_hi=8, m_hi=12, max_outcomes=4096):
    """Random LT instance with per-node in-arc mass <= 1 and a bounded
    enumeration cross-product."""
    while True:
        n = int(rng.integers(n_lo, n_hi + 1))
        m = int(rng.integers(3, m_hi + 1))
        pairs = random_arc_pairs(rng, n, m)
        by_dst = {}
        for i, (_, v) in enumerate(pairs):
            by_dst.setdefault(v, []).append(i)
        B = np.zeros(len(pairs))
        count = 1
        for idxs in by_dst.values():
            raw = rng.random(len(idxs))
            mass = 1.0 if rng.random() < 0.3 else float(rng.uniform(0.3, 0.9))
            B[idxs] = raw * (mass / raw.sum())
            count *= len(idxs) + (1 if 1.0 - mass > 1e-12 else 0)
        if count <= max_outcomes:
            arcs = [(u, v, float(B[i]), 1.0) for i, (u, v) in enumerate(pairs)]
            return from_arcs(n, arcs)


def random_seed_set(rng, n, k_hi=3):
    k = int(rng.integers(1, min(k_hi, n) + 1))
    return sorted(int(v) for v in rng.choice(n, size=k, replace=False))


# -- small named graphs ----------------------------------------------------------


def chain_graph(b=1.0, a=1.0):
    """0 -> 1 -> 2."""
    return from_arcs(3, [(0, 1, b, a), (1, 2, b, a)])


def single_arc(b, a=1.0):
    return from_arcs(2, [(0, 1, b, a)])


def bidirected_triangle(b=0.0, a=1.0, extra_isolated=0):
    arcs = []
    for u, v in [(0, 1), (0, 2), (1, 2)]:
        arcs.append((u, v, b, a))
        arcs.append((v, u, b, a))
    return from_arcs(3 + extra_isolated, arcs)


def star_out(leaves=3, b=1.0, a=1.0):
    """Center 0 with out-arcs to each leaf."""
    return from_arcs(leaves + 1, [(0, i + 1, b, a) for i in range(leaves)])
