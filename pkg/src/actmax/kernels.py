"""Compiled inner loops.

Plain functions over flat arrays, jitted with numba. Nothing in here knows
about Graph objects; the polling engine unpacks a graph once and hands the
arrays over. All randomness comes from explicit xoshiro states (see rng.py).

Conventions
-----------
- model flag: 0 = independent cascade, 1 = linear threshold.
- Lazy edge-state caches are stamped arrays: an entry is valid for the current
  hyperedge iff its stamp equals the hyperedge's generation number. IC states
  are cached per in-arc position, LT choices per node, so the two reverse
  walks of one pair hyperedge see one consistent live-edge world without ever
  materializing it.
- Visited marks use the same generation stamping with per-walk arrays.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .rng import next_f64

IC_FLAG = 0
LT_FLAG = 1

# early-stop modes for the reverse walk
STOP_NONE = 0
STOP_SEED = 1          # abort when a marked seed enters the walk
STOP_SEED_IN_FIRST = 2  # abort when a marked seed that the first walk reached enters


@njit(cache=True, nogil=True)
def alias_draw(prob, alias, rstate):
    k = prob.shape[0]
    r = next_f64(rstate) * k
    j = np.int64(r)
    if j >= k:
        j = k - 1
    if r - j < prob[j]:
        return j
    return alias[j]


@njit(cache=True, nogil=True)
def _rr_collect(target, model, in_ptr, in_src, in_B,
                ic_state, ic_stamp, lt_choice, lt_stamp, egen,
                vis, vgen, queue, rstate,
                stop_mode, seed_stamp, sgen, vis_first, fgen):
    """Reverse walk from `target` along live in-arcs.

    Fills queue[0:count] with the nodes that reach the target in the cached
    live-edge world and returns (count, hit) where hit reports whether the
    early-stop condition fired. Edge states are decided lazily on first touch
    and cached under generation `egen`.
    """
    qt = 0
    vis[target] = vgen
    queue[qt] = target
    qt += 1
    if stop_mode != STOP_NONE and seed_stamp[target] == sgen:
        if stop_mode == STOP_SEED or vis_first[target] == fgen:
            return qt, True
    qh = 0
    while qh < qt:
        x = queue[qh]
        qh += 1
        if model == IC_FLAG:
            for p in range(in_ptr[x], in_ptr[x + 1]):
                if ic_stamp[p] == egen:
                    live = ic_state[p] == 1
                else:
                    live = next_f64(rstate) < in_B[p]
                    ic_state[p] = 1 if live else 0
                    ic_stamp[p] = egen
                if live:
                    u = in_src[p]
                    if vis[u] != vgen:
                        vis[u] = vgen
                        queue[qt] = u
                        qt += 1
                        if stop_mode != STOP_NONE and seed_stamp[u] == sgen:
                            if stop_mode == STOP_SEED or vis_first[u] == fgen:
                                return qt, True
        else:
            if lt_stamp[x] == egen:
                p = lt_choice[x]
            else:
                p = np.int64(-1)
                lo = in_ptr[x]
                hi = in_ptr[x + 1]
                if hi > lo:
                    r = next_f64(rstate)
                    acc = 0.0
                    for q in range(lo, hi):
                        acc += in_B[q]
                        if r < acc:
                            p = q
                            break
                lt_choice[x] = p
                lt_stamp[x] = egen
            if p >= 0:
                u = in_src[p]
                if vis[u] != vgen:
                    vis[u] = vgen
                    queue[qt] = u
                    qt += 1
                    if stop_mode != STOP_NONE and seed_stamp[u] == sgen:
                        if stop_mode == STOP_SEED or vis_first[u] == fgen:
                            return qt, True
    return qt, False


# -- pool generation ---------------------------------------------------------


@njit(cache=True, nogil=True)
def _grow_i32(arr, need):
    cap = arr.shape[0]
    if need <= cap:
        return arr
    newcap = cap * 2
    if newcap < need:
        newcap = need
    out = np.empty(newcap, np.int32)
    out[:cap] = arr
    return out


@njit(cache=True, nogil=True)
def pair_pool_batch(count, model, in_ptr, in_src, in_B,
                    a_prob, a_alias, arc_src, arc_dst,
                    ic_state, ic_stamp, lt_choice, lt_stamp,
                    vis1, vis2, queue, nbuf, rstate, gen0):
    """Generate `count` pair hyperedges, each stored as n1|n2|n3 sections.

    Returns (nodes, used, ptr, gen): sections of hyperedge h live at
    nodes[ptr[3h+s] : ptr[3h+s+1]] for s = 0 (only first walk), 1 (only
    second walk), 2 (both walks).
    """
    nodes = np.empty(16 * count + 64, np.int32)
    ptr = np.empty(3 * count + 1, np.int64)
    ptr[0] = 0
    pos = np.int64(0)
    gen = gen0
    for i in range(count):
        gen += 1
        e = alias_draw(a_prob, a_alias, rstate)
        u = arc_src[e]
        v = arc_dst[e]
        qt1, _ = _rr_collect(u, model, in_ptr, in_src, in_B,
                             ic_state, ic_stamp, lt_choice, lt_stamp, gen,
                             vis1, gen, queue, rstate,
                             STOP_NONE, vis1, 0, vis1, 0)
        for j in range(qt1):
            nbuf[j] = queue[j]
        qt2, _ = _rr_collect(v, model, in_ptr, in_src, in_B,
                             ic_state, ic_stamp, lt_choice, lt_stamp, gen,
                             vis2, gen, queue, rstate,
                             STOP_NONE, vis1, 0, vis1, 0)
        nodes = _grow_i32(nodes, pos + qt1 + qt2)
        for j in range(qt1):
            x = nbuf[j]
            if vis2[x] != gen:
                nodes[pos] = np.int32(x)
                pos += 1
        ptr[3 * i + 1] = pos
        for j in range(qt2):
            x = queue[j]
            if vis1[x] != gen:
                nodes[pos] = np.int32(x)
                pos += 1
        ptr[3 * i + 2] = pos
        for j in range(qt1):
            x = nbuf[j]
            if vis2[x] == gen:
                nodes[pos] = np.int32(x)
                pos += 1
        ptr[3 * i + 3] = pos
    return nodes, pos, ptr, gen


@njit(cache=True, nogil=True)
def lower_pool_batch(count, model, in_ptr, in_src, in_B,
                     a_prob, a_alias, arc_src, arc_dst,
                     ic_state, ic_stamp, lt_choice, lt_stamp,
                     vis1, vis2, queue, nbuf, rstate, gen0):
    """Generate `count` lower-bound hyperedges (intersection of the two walks)."""
    nodes = np.empty(8 * count + 64, np.int32)
    ptr = np.empty(count + 1, np.int64)
    ptr[0] = 0
    pos = np.int64(0)
    gen = gen0
    for i in range(count):
        gen += 1
        e = alias_draw(a_prob, a_alias, rstate)
        u = arc_src[e]
        v = arc_dst[e]
        qt1, _ = _rr_collect(u, model, in_ptr, in_src, in_B,
                             ic_state, ic_stamp, lt_choice, lt_stamp, gen,
                             vis1, gen, queue, rstate,
                             STOP_NONE, vis1, 0, vis1, 0)
        for j in range(qt1):
            nbuf[j] = queue[j]
        _rr_collect(v, model, in_ptr, in_src, in_B,
                    ic_state, ic_stamp, lt_choice, lt_stamp, gen,
                    vis2, gen, queue, rstate,
                    STOP_NONE, vis1, 0, vis1, 0)
        nodes = _grow_i32(nodes, pos + qt1)
        for j in range(qt1):
            x = nbuf[j]
            if vis2[x] == gen:
                nodes[pos] = np.int32(x)
                pos += 1
        ptr[i + 1] = pos
    return nodes, pos, ptr, gen


@njit(cache=True, nogil=True)
def single_pool_batch(count, model, in_ptr, in_src, in_B,
                      n_prob, n_alias,
                      ic_state, ic_stamp, lt_choice, lt_stamp,
                      vis1, queue, rstate, gen0):
    """Generate `count` single reverse-reachable hyperedges from weighted roots."""
    nodes = np.empty(8 * count + 64, np.int32)
    ptr = np.empty(count + 1, np.int64)
    ptr[0] = 0
    pos = np.int64(0)
    gen = gen0
    for i in range(count):
        gen += 1
        t = alias_draw(n_prob, n_alias, rstate)
        qt, _ = _rr_collect(t, model, in_ptr, in_src, in_B,
                            ic_state, ic_stamp, lt_choice, lt_stamp, gen,
                            vis1, gen, queue, rstate,
                            STOP_NONE, vis1, 0, vis1, 0)
        nodes = _grow_i32(nodes, pos + qt)
        for j in range(qt):
            nodes[pos] = np.int32(queue[j])
            pos += 1
        ptr[i + 1] = pos
    return nodes, pos, ptr, gen


# -- stopping estimators -------------------------------------------------------


@njit(cache=True, nogil=True)
def estimate_pair_stop(need_both, model, in_ptr, in_src, in_B,
                       a_prob, a_alias, arc_src, arc_dst,
                       ic_state, ic_stamp, lt_choice, lt_stamp,
                       vis1, vis2, queue, rstate,
                       seeds, seed_stamp, sgen, ups1, max_m, gen0):
    """Draw pair hyperedges until `ups1` of them are covered by the seed set.

    need_both = True counts hyperedges whose two walks both contain a seed
    (the activity event); False counts hyperedges where one common seed lies
    in both walks (the lower-bound event). Walks stop early as soon as the
    covering event is decided; untouched edge states are simply never revealed,
    which leaves the coverage indicator's distribution unchanged.

    Returns (covered, generated, gen).
    """
    covered = np.int64(0)
    m = np.int64(0)
    gen = gen0
    while covered < ups1 and m < max_m:
        gen += 1
        m += 1
        e = alias_draw(a_prob, a_alias, rstate)
        u = arc_src[e]
        v = arc_dst[e]
        if need_both:
            _, hit1 = _rr_collect(u, model, in_ptr, in_src, in_B,
                                  ic_state, ic_stamp, lt_choice, lt_stamp, gen,
                                  vis1, gen, queue, rstate,
                                  STOP_SEED, seed_stamp, sgen, vis1, 0)
            if not hit1:
                continue
            _, hit2 = _rr_collect(v, model, in_ptr, in_src, in_B,
                                  ic_state, ic_stamp, lt_choice, lt_stamp, gen,
                                  vis2, gen, queue, rstate,
                                  STOP_SEED, seed_stamp, sgen, vis1, 0)
            if hit2:
                covered += 1
        else:
            _rr_collect(u, model, in_ptr, in_src, in_B,
                        ic_state, ic_stamp, lt_choice, lt_stamp, gen,
                        vis1, gen, queue, rstate,
                        STOP_NONE, seed_stamp, 0, vis1, 0)
            any_seed = False
            for si in range(seeds.shape[0]):
                if vis1[seeds[si]] == gen:
                    any_seed = True
                    break
            if not any_seed:
                continue
            _, hit2 = _rr_collect(v, model, in_ptr, in_src, in_B,
                                  ic_state, ic_stamp, lt_choice, lt_stamp, gen,
                                  vis2, gen, queue, rstate,
                                  STOP_SEED_IN_FIRST, seed_stamp, sgen, vis1, gen)
            if hit2:
                covered += 1
    return covered, m, gen


@njit(cache=True, nogil=True)
def estimate_single_stop(model, in_ptr, in_src, in_B,
                         n_prob, n_alias,
                         ic_state, ic_stamp, lt_choice, lt_stamp,
                         vis1, queue, rstate,
                         seed_stamp, sgen, ups1, max_m, gen0):
    """Stopping estimator over single reverse-reachable hyperedges."""
    covered = np.int64(0)
    m = np.int64(0)
    gen = gen0
    while covered < ups1 and m < max_m:
        gen += 1
        m += 1
        t = alias_draw(n_prob, n_alias, rstate)
        _, hit = _rr_collect(t, model, in_ptr, in_src, in_B,
                             ic_state, ic_stamp, lt_choice, lt_stamp, gen,
                             vis1, gen, queue, rstate,
                             STOP_SEED, seed_stamp, sgen, vis1, 0)
        if hit:
            covered += 1
    return covered, m, gen


# -- coverage greedy -----------------------------------------------------------


@njit(cache=True, nogil=True)
def build_section_index(nodes, ptr, stride, section, H, n):
    """Inverted index (node -> hyperedge ids) for one section of a pool."""
    counts = np.zeros(n + 1, np.int64)
    for h in range(H):
        for q in range(ptr[stride * h + section], ptr[stride * h + section + 1]):
            counts[nodes[q] + 1] += 1
    iptr = np.cumsum(counts)
    fill = iptr[:n].copy()
    idx = np.empty(iptr[n], np.int32)
    for h in range(H):
        for q in range(ptr[stride * h + section], ptr[stride * h + section + 1]):
            v = nodes[q]
            idx[fill[v]] = np.int32(h)
            fill[v] += 1
    return iptr, idx


@njit(cache=True, nogil=True)
def single_greedy(nodes, ptr, iptr, idx, n, H, k):
    """Exact greedy max coverage with decremental gains; ties to smaller id."""
    gain = np.empty(n, np.int64)
    for v in range(n):
        gain[v] = iptr[v + 1] - iptr[v]
    covered = np.zeros(H, np.uint8)
    sel = np.zeros(n, np.uint8)
    chosen = np.empty(k, np.int64)
    D = np.int64(0)
    for step in range(k):
        best = -1
        bg = np.int64(-1)
        for v in range(n):
            if sel[v] == 0 and gain[v] > bg:
                best = v
                bg = gain[v]
        chosen[step] = best
        sel[best] = 1
        for ii in range(iptr[best], iptr[best + 1]):
            h = idx[ii]
            if covered[h] == 0:
                covered[h] = 1
                D += 1
                for q in range(ptr[h], ptr[h + 1]):
                    gain[nodes[q]] -= 1
    return chosen, D


@njit(cache=True, nogil=True)
def pair_greedy(nodes, ptr, i1p, i1, i2p, i2, i3p, i3, n, H, k, record, trace):
    """Greedy pair coverage with incrementally maintained marginal gains.

    Hyperedge states: 0 untouched, 1 first walk covered, 2 second walk
    covered, 3 fully covered. A node's gain is the number of hyperedges it
    newly fully covers: its both-walks memberships that are not yet full,
    plus first-only memberships whose second walk is already covered, plus
    the mirror. Ties are broken by the larger partial-coverage potential and
    then by the smaller node id. When `record` is set, trace[step] holds the
    gain table the step's choice was made from.
    """
    state = np.zeros(H, np.uint8)
    mg = np.empty(n, np.int64)
    for v in range(n):
        mg[v] = i3p[v + 1] - i3p[v]
    sel = np.zeros(n, np.uint8)
    chosen = np.empty(k, np.int64)
    D = np.int64(0)
    for step in range(k):
        if record:
            for v in range(n):
                trace[step, v] = mg[v]
        bg = np.int64(-1)
        for v in range(n):
            if sel[v] == 0 and mg[v] > bg:
                bg = mg[v]
        best = -1
        bp = np.int64(-1)
        for v in range(n):
            if sel[v] == 0 and mg[v] == bg:
                pot = np.int64(0)
                for ii in range(i1p[v], i1p[v + 1]):
                    if state[i1[ii]] != 1:
                        pot += 1
                for ii in range(i2p[v], i2p[v + 1]):
                    if state[i2[ii]] != 2:
                        pot += 1
                if pot > bp:
                    best = v
                    bp = pot
        chosen[step] = best
        sel[best] = 1
        for ii in range(i3p[best], i3p[best + 1]):
            h = i3[ii]
            st = state[h]
            if st != 3:
                state[h] = 3
                D += 1
                for q in range(ptr[3 * h + 2], ptr[3 * h + 3]):
                    mg[nodes[q]] -= 1
                if st == 1:
                    for q in range(ptr[3 * h + 1], ptr[3 * h + 2]):
                        mg[nodes[q]] -= 1
                elif st == 2:
                    for q in range(ptr[3 * h], ptr[3 * h + 1]):
                        mg[nodes[q]] -= 1
        for ii in range(i1p[best], i1p[best + 1]):
            h = i1[ii]
            st = state[h]
            if st == 0:
                state[h] = 1
                for q in range(ptr[3 * h + 1], ptr[3 * h + 2]):
                    mg[nodes[q]] += 1
            elif st == 2:
                state[h] = 3
                D += 1
                for q in range(ptr[3 * h + 2], ptr[3 * h + 3]):
                    mg[nodes[q]] -= 1
                for q in range(ptr[3 * h], ptr[3 * h + 1]):
                    mg[nodes[q]] -= 1
        for ii in range(i2p[best], i2p[best + 1]):
            h = i2[ii]
            st = state[h]
            if st == 0:
                state[h] = 2
                for q in range(ptr[3 * h], ptr[3 * h + 1]):
                    mg[nodes[q]] += 1
            elif st == 1:
                state[h] = 3
                D += 1
                for q in range(ptr[3 * h + 2], ptr[3 * h + 3]):
                    mg[nodes[q]] -= 1
                for q in range(ptr[3 * h + 1], ptr[3 * h + 2]):
                    mg[nodes[q]] -= 1
    return chosen, D


# -- forward simulation ---------------------------------------------------------


@njit(cache=True, nogil=True)
def forward_counts(trials, model, out_ptr, out_dst, out_B, out_in_pos,
                   in_ptr, in_src, in_B, tot_deg,
                   seeds, act, lt_choice, lt_stamp, queue, rstate, gen0):
    """Forward cascades from a fixed seed set.

    Accumulates, over trials: arcs with both endpoints active, arcs with at
    least one active endpoint, and active node counts.
    Returns (sum_both, sum_any, sum_active, gen).
    """
    sum_both = np.int64(0)
    sum_any = np.int64(0)
    sum_active = np.int64(0)
    gen = gen0
    for _ in range(trials):
        gen += 1
        qt = 0
        for si in range(seeds.shape[0]):
            s = seeds[si]
            if act[s] != gen:
                act[s] = gen
                queue[qt] = s
                qt += 1
        qh = 0
        while qh < qt:
            u = queue[qh]
            qh += 1
            for q in range(out_ptr[u], out_ptr[u + 1]):
                v = out_dst[q]
                if act[v] == gen:
                    continue
                if model == IC_FLAG:
                    fired = next_f64(rstate) < out_B[q]
                else:
                    if lt_stamp[v] == gen:
                        p = lt_choice[v]
                    else:
                        p = np.int64(-1)
                        lo = in_ptr[v]
                        hi = in_ptr[v + 1]
                        if hi > lo:
                            r = next_f64(rstate)
                            acc = 0.0
                            for qq in range(lo, hi):
                                acc += in_B[qq]
                                if r < acc:
                                    p = qq
                                    break
                        lt_choice[v] = p
                        lt_stamp[v] = gen
                    fired = p == out_in_pos[q]
                if fired:
                    act[v] = gen
                    queue[qt] = v
                    qt += 1
        both = np.int64(0)
        degsum = np.int64(0)
        for i in range(qt):
            u = queue[i]
            degsum += tot_deg[u]
            for q in range(out_ptr[u], out_ptr[u + 1]):
                if act[out_dst[q]] == gen:
                    both += 1
        sum_both += both
        sum_any += degsum - both
        sum_active += qt
    return sum_both, sum_any, sum_active, gen
