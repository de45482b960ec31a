"""
Compiled kernels shared by the public modules.

All kernels address sites through the closed-form domain index (see
:class:`lowxing.lattice.Domain`) described by ``geom = (q_min, radius,
top_row)``.  Site states are read through a stamped cache: ``stamp[i] ==
cur`` means ``cache[i]`` holds the state of site ``i`` for the current
configuration, otherwise it is drawn from the counter-based hash.  An
explicit configuration is loaded by filling the cache and stamping every
site, after which the hash is never consulted.
"""

import numpy as np
from numba import njit

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
ONE53 = 1 << 53

DQ = np.array([1, 0, -1, -1, 0, 1], dtype=np.int64)
DR = np.array([0, 1, 1, 0, -1, -1], dtype=np.int64)

NO_SKIP = -1
_BIG_CAP = 1 << 30


# --- counter-based randomness -----------------------------------------


@njit(cache=True)
def mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True)
def trial_key(seed, trial):
    k = mix64(seed + GOLDEN)
    return mix64(k ^ mix64((trial + np.uint64(1)) * GOLDEN))


@njit(cache=True)
def site_uniform53(key, i):
    return mix64(key + (np.uint64(i) + np.uint64(1)) * GOLDEN) >> _S11


@njit(cache=True)
def sample_bits(seed, trial, thresh, count):
    key = trial_key(seed, trial)
    out = np.empty(count, dtype=np.uint8)
    for i in range(count):
        out[i] = 1 if site_uniform53(key, i) < thresh else 0
    return out


def threshold(p: float) -> np.uint64:
    """Integer cut so that ``uniform53 < threshold`` has probability ``p``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return np.uint64(int(round(p * ONE53)))


# --- geometry -----------------------------------------------------------


@njit(cache=True, inline="always")
def site_index(q, r, q_min, R, top):
    if r < 0 or r > top:
        return -1
    if q < q_min or q > q_min + 2 * R - 2 - r:
        return -1
    return r * (2 * R - 1) - (r * (r - 1)) // 2 + (q - q_min)


@njit(cache=True, inline="always")
def get_state(i, stamp, cache, cur, key, thresh):
    if stamp[i] != cur:
        stamp[i] = cur
        cache[i] = 1 if site_uniform53(key, i) < thresh else 0
    return cache[i]


# --- breadth-first search ---------------------------------------------


@njit(cache=True)
def bfs(geom, qs, rs, stamp, cache, cur, key, thresh, want, region, sources,
        target, skip, absorb, vis, vcur, queue):
    """
    Grow the ``want``-state cluster of ``sources`` inside ``region``.

    Returns ``(count, hit)``.  ``queue[:count]`` lists the reached sites.
    If ``target`` is nonempty the search stops at the first reached site
    with ``target[i] != 0`` and ``hit`` is that index, else -1.  ``skip``
    excludes one site.  With ``absorb`` target sites are not expanded.
    """
    q_min, R, top = geom
    has_target = target.shape[0] > 0
    count = 0
    for s in sources:
        if s == skip or region[s] == 0 or vis[s] == vcur:
            continue
        if get_state(s, stamp, cache, cur, key, thresh) != want:
            continue
        vis[s] = vcur
        queue[count] = s
        count += 1
        if has_target and target[s] != 0:
            return count, s
    head = 0
    while head < count:
        v = queue[head]
        head += 1
        if absorb and has_target and target[v] != 0:
            continue
        q = qs[v]
        r = rs[v]
        for d in range(6):
            w = site_index(q + DQ[d], r + DR[d], q_min, R, top)
            if w < 0 or w == skip or vis[w] == vcur or region[w] == 0:
                continue
            if get_state(w, stamp, cache, cur, key, thresh) != want:
                continue
            vis[w] = vcur
            queue[count] = w
            count += 1
            if has_target and target[w] != 0:
                return count, w
    return count, -1


# --- vertex-disjoint paths ----------------------------------------------


@njit(cache=True)
def disjoint_paths(geom, qs, rs, stamp, cache, cur, key, thresh, want, region,
                   sources, group, cap_a, cap_b, absorb, skip, cap,
                   on_path, pred, pvis, parent, queue, ctr):
    """
    Maximum number (capped at ``cap``) of vertex-disjoint ``want``-state
    paths from ``sources`` to the sites with ``group[i] > 0``.

    Every real site has capacity one.  Targets feed one of two virtual
    sinks (``group`` 1 or 2) with capacities ``cap_a`` and ``cap_b``; with
    both at one this forces one path into each group.  ``absorb`` makes
    target sites terminal (a path may not continue through them).

    Node encoding: ``2*v`` is the in-copy of site ``v``, ``2*v + 1`` its
    out-copy, ``2*N`` and ``2*N + 1`` the group sinks.  ``ctr`` holds the
    stamp counters ``[flow_stamp, bfs_stamp]``; both are advanced here.
    """
    q_min, R, top = geom
    N = qs.shape[0]
    ctr[0] += 1
    fcur = ctr[0]
    gsites = np.full((2, 8), -1, dtype=np.int64)
    gcount = np.zeros(2, dtype=np.int64)
    gcap = np.array([cap_a, cap_b], dtype=np.int64)
    flow = 0
    while flow < cap:
        ctr[1] += 1
        bcur = ctr[1]
        count = 0
        for s in sources:
            if s == skip or region[s] == 0:
                continue
            if get_state(s, stamp, cache, cur, key, thresh) != want:
                continue
            x = 2 * s
            if pvis[x] == bcur:
                continue
            pvis[x] = bcur
            parent[x] = -1
            queue[count] = x
            count += 1
        head = 0
        found = -1
        found_g = -1
        while head < count and found < 0:
            x = queue[head]
            head += 1
            if x >= 2 * N:
                g = x - 2 * N
                for j in range(gcount[g]):
                    y = 2 * gsites[g, j] + 1
                    if pvis[y] != bcur:
                        pvis[y] = bcur
                        parent[y] = x
                        queue[count] = y
                        count += 1
                continue
            v = x >> 1
            busy = on_path[v] == fcur
            if (x & 1) == 0:
                if not busy:
                    y = x + 1
                    if pvis[y] != bcur:
                        pvis[y] = bcur
                        parent[y] = x
                        queue[count] = y
                        count += 1
                elif pred[v] >= 0:
                    y = 2 * pred[v] + 1
                    if pvis[y] != bcur:
                        pvis[y] = bcur
                        parent[y] = x
                        queue[count] = y
                        count += 1
                continue
            g = group[v] - 1
            if g >= 0:
                if gcount[g] < gcap[g]:
                    found = x
                    found_g = g
                    break
                y = 2 * N + g
                if pvis[y] != bcur:
                    pvis[y] = bcur
                    parent[y] = x
                    queue[count] = y
                    count += 1
            if busy:
                y = 2 * v
                if pvis[y] != bcur:
                    pvis[y] = bcur
                    parent[y] = x
                    queue[count] = y
                    count += 1
            if absorb and g >= 0:
                continue
            q = qs[v]
            r = rs[v]
            for d in range(6):
                w = site_index(q + DQ[d], r + DR[d], q_min, R, top)
                if w < 0 or w == skip or region[w] == 0:
                    continue
                y = 2 * w
                if pvis[y] == bcur:
                    continue
                if get_state(w, stamp, cache, cur, key, thresh) != want:
                    continue
                pvis[y] = bcur
                parent[y] = x
                queue[count] = y
                count += 1
        if found < 0:
            break
        # augment: walk parents back from the out-copy that reached a sink
        t = found >> 1
        gsites[found_g, gcount[found_g]] = t
        gcount[found_g] += 1
        y = found
        while True:
            x = parent[y]
            if x == -1:
                pred[y >> 1] = -1
                break
            if x >= 2 * N:
                # group sink -> out(t'): the t' -> sink edge is cancelled
                g = x - 2 * N
                tt = y >> 1
                k = 0
                for j in range(gcount[g]):
                    if gsites[g, j] != tt:
                        gsites[g, k] = gsites[g, j]
                        k += 1
                gcount[g] = k
            elif y >= 2 * N:
                # out(t) -> group sink: new edge t -> sink
                g = y - 2 * N
                tt = x >> 1
                gsites[g, gcount[g]] = tt
                gcount[g] += 1
            else:
                a = x >> 1
                b = y >> 1
                if a == b:
                    if (x & 1) == 0:
                        on_path[a] = fcur
                    else:
                        on_path[a] = fcur - 1
                elif (x & 1) == 1:
                    pred[b] = a
            y = x
        flow += 1
    return flow


# --- lowest crossing: hull walk -------------------------------------------


@njit(cache=True, inline="always")
def _open(q, r, n, geom, stamp, cache, cur, key, thresh, wired):
    # virtual row r = -1: vacant under 0..n+1, occupied walls elsewhere
    if r == -1:
        return q <= -1 or q >= n + 2
    if r < -1:
        return False
    i = site_index(q, r, geom[0], geom[1], geom[2])
    if i < 0:
        return wired
    return get_state(i, stamp, cache, cur, key, thresh) == 1


@njit(cache=True)
def hull_walk(geom, n, stamp, cache, cur, key, thresh, mirror, wired, out_q, out_r):
    """
    Wall-follow along the occupied boundary of the vacant region attached
    to the floor under ``-1..n+1``.

    The default walk starts on the left wall, keeps vacant sites on its
    right and ends on the right wall.  ``mirror`` starts on the right wall
    with the mirrored rule.  ``wired`` treats half-plane sites outside the
    domain as occupied instead of vacant.  The raw walk (including virtual wall sites) is
    written to ``out_q``/``out_r``, which are replaced by larger copies
    when full.  Returns ``(out_q, out_r, length, success)``.
    """
    q_min = geom[0]
    R = geom[1]
    left_end = q_min - 1
    right_end = q_min + 2 * R - 1
    if mirror:
        q = n + 2
        b = 3
    else:
        q = -1
        b = 0
    r = -1
    out_q[0] = q
    out_r[0] = r
    length = 1
    while True:
        moved = False
        for j in range(1, 6):
            if mirror:
                d = (b - j) % 6
            else:
                d = (b + j) % 6
            nq = q + DQ[d]
            nr = r + DR[d]
            if _open(nq, nr, n, geom, stamp, cache, cur, key, thresh, wired):
                q = nq
                r = nr
                if mirror:
                    b = (d + 2) % 6
                else:
                    b = (d + 4) % 6
                moved = True
                break
        if not moved:
            return out_q, out_r, length, False
        if length >= out_q.shape[0]:
            bigger_q = np.empty(2 * out_q.shape[0], dtype=np.int64)
            bigger_r = np.empty(2 * out_q.shape[0], dtype=np.int64)
            bigger_q[:length] = out_q[:length]
            bigger_r[:length] = out_r[:length]
            out_q = bigger_q
            out_r = bigger_r
        out_q[length] = q
        out_r[length] = r
        length += 1
        if r == -1:
            if mirror:
                if q <= -1:
                    return out_q, out_r, length, True
                if q > right_end:
                    return out_q, out_r, length, False
            else:
                if q >= n + 2:
                    return out_q, out_r, length, True
                if q < left_end:
                    return out_q, out_r, length, False


@njit(cache=True)
def loop_erase(codes, pos, pstamp, pcur):
    """Chronological loop erasure of a sequence of nonnegative codes."""
    out = np.empty(codes.shape[0], dtype=np.int64)
    k = 0
    for c in codes:
        if pstamp[c] == pcur:
            j = pos[c]
            for t in range(j + 1, k):
                pstamp[out[t]] = pcur - 1
            k = j + 1
        else:
            pstamp[c] = pcur
            pos[c] = k
            out[k] = c
            k += 1
    return out[:k]


def code_space(geom, N):
    """Size of the site-code range used by :func:`extract_crossing`."""
    q_min, R, top = geom
    return N + 2 * R + 8 + (top + 2) * (2 * R + 4)


@njit(cache=True, inline="always")
def _encode(q, r, geom, N):
    # real sites keep their index; the virtual floor row and the ring of
    # exterior sites (wired mode) are coded past N
    q_min, R, top = geom[0], geom[1], geom[2]
    if r == -1:
        return N + (q - q_min + 2)
    i = site_index(q, r, q_min, R, top)
    if i >= 0:
        return i
    return N + 2 * R + 8 + r * (2 * R + 4) + (q - q_min + 2)


@njit(cache=True, inline="always")
def decode(c, geom, qs, rs):
    """Inverse of the site code: ``(q, r)``."""
    q_min, R = geom[0], geom[1]
    N = qs.shape[0]
    if c < N:
        return qs[c], rs[c]
    c -= N
    if c < 2 * R + 8:
        return c + q_min - 2, -1
    c -= 2 * R + 8
    return c % (2 * R + 4) + q_min - 2, c // (2 * R + 4)


@njit(cache=True)
def extract_crossing(geom, n, qs, rs, stamp, cache, cur, key, thresh, mirror, wired,
                     wq, wr, pos, pstamp, pcur, edge):
    """
    Lowest crossing as site codes in left-to-right order.

    Codes below ``N`` are domain indices; in ``wired`` mode the path may
    also contain exterior sites (see :func:`decode`).  Returns ``(path,
    touched, wq, wr)``; ``path`` is empty when no crossing exists.
    ``touched`` flags a walk that reached the domain edge, left the domain
    or failed.  ``wq``/``wr`` are the (possibly grown) walk buffers.
    """
    N = edge.shape[0]
    wq, wr, length, ok = hull_walk(geom, n, stamp, cache, cur, key, thresh, mirror,
                                   wired, wq, wr)
    touched = not ok
    codes = np.empty(length, dtype=np.int64)
    for t in range(length):
        c = _encode(wq[t], wr[t], geom, N)
        codes[t] = c
        if wr[t] >= 0 and (c >= N or edge[c] != 0):
            touched = True
    if not ok:
        return np.empty(0, dtype=np.int64), touched, wq, wr
    if mirror:
        codes = codes[::-1].copy()
    path = loop_erase(codes, pos, pstamp, pcur)
    # stretch after the last left-wall site, up to the next floor-row site
    start = 0
    for t in range(path.shape[0]):
        q, r = decode(path[t], geom, qs, rs)
        if r == -1 and q <= -1:
            start = t + 1
    stop = start
    while stop < path.shape[0]:
        q, r = decode(path[stop], geom, qs, rs)
        if r == -1:
            break
        stop += 1
    # exactly one ell-site (first) and one r-site (last)
    a = start
    for t in range(start, stop):
        q, r = decode(path[t], geom, qs, rs)
        if r == 0 and q < 0:
            a = t
    b = stop
    for t in range(a, stop):
        q, r = decode(path[t], geom, qs, rs)
        if r == 0 and q > n:
            b = t + 1
            break
    return path[a:b].copy(), touched, wq, wr


# --- event programs ---------------------------------------------------------
#
# An event detector is compiled to a small "program": an opcode plus the
# site sets it needs.  The same evaluator serves single configurations,
# exhaustive enumeration and Monte Carlo trial loops.

OP_PATH = 0      # one want-state path from src1 to mask1 inside region
OP_FLOW = 1      # `need` disjoint want-state paths from src1 to groups in `group`
OP_P = 2         # occupied src1 -> mask1 and vacant src2 -> mask2
OP_PUNION = 3    # some pair (extra[2i], extra[2i+1]) satisfies OP_P
OP_A = 4         # strict crossing from mask1 to mask2 through some site of extra

_EMPTY_U8 = np.zeros(0, dtype=np.uint8)


@njit(cache=True)
def _neighbor_sources(v, geom, qs, rs):
    out = np.empty(6, dtype=np.int64)
    k = 0
    for d in range(6):
        w = site_index(qs[v] + DQ[d], rs[v] + DR[d], geom[0], geom[1], geom[2])
        if w >= 0:
            out[k] = w
            k += 1
    return out[:k]


@njit(cache=True)
def eval_program(op, want, need, cap_a, cap_b, absorb, region, region_no_r,
                 region_no_l, src1, src2, extra, mask1, mask2, group,
                 geom, qs, rs, stamp, cache, cur, key, thresh,
                 vis, queue, on_path, pred, pvis, parent, fqueue, ctr):
    """Evaluate one event program on the current configuration."""
    empty = np.zeros(0, dtype=np.uint8)
    if op == OP_PATH:
        ctr[2] += 1
        _, hit = bfs(geom, qs, rs, stamp, cache, cur, key, thresh, want, region,
                     src1, mask1, NO_SKIP, absorb, vis, ctr[2], queue)
        return hit >= 0
    if op == OP_FLOW:
        f = disjoint_paths(geom, qs, rs, stamp, cache, cur, key, thresh, want, region,
                           src1, group, cap_a, cap_b, absorb, NO_SKIP, need,
                           on_path, pred, pvis, parent, fqueue, ctr)
        return f >= need
    if op == OP_P:
        ctr[2] += 1
        _, hit = bfs(geom, qs, rs, stamp, cache, cur, key, thresh, 1, region,
                     src1, mask1, NO_SKIP, True, vis, ctr[2], queue)
        if hit < 0:
            return False
        ctr[2] += 1
        _, hit = bfs(geom, qs, rs, stamp, cache, cur, key, thresh, 0, region,
                     src2, mask2, NO_SKIP, True, vis, ctr[2], queue)
        return hit >= 0
    if op == OP_PUNION:
        ctr[2] += 1
        occ = ctr[2]
        bfs(geom, qs, rs, stamp, cache, cur, key, thresh, 1, region,
            src1, empty, NO_SKIP, False, vis, occ, queue)
        ctr[2] += 1
        vac = ctr[2]
        bfs(geom, qs, rs, stamp, cache, cur, key, thresh, 0, region,
            src2, empty, NO_SKIP, False, vis, vac, queue)
        # the two clusters have opposite states, so their stamps never collide
        for i in range(extra.shape[0] // 2):
            if vis[extra[2 * i]] == occ and vis[extra[2 * i + 1]] == vac:
                return True
        return False
    if op == OP_A:
        # only sites in the occupied cluster of the left half-line can qualify
        ctr[2] += 1
        lab = ctr[2]
        bfs(geom, qs, rs, stamp, cache, cur, key, thresh, 1, region,
            src1, empty, NO_SKIP, False, vis, lab, queue)
        cand = np.empty(extra.shape[0], dtype=np.int64)
        nc = 0
        for u in extra:
            if vis[u] == lab:
                cand[nc] = u
                nc += 1
        for t in range(nc):
            u = cand[t]
            single = np.empty(1, dtype=np.int64)
            single[0] = u
            if mask1[u] != 0:
                region_no_l[u] = 1
                ctr[2] += 1
                _, hit = bfs(geom, qs, rs, stamp, cache, cur, key, thresh, 1,
                             region_no_l, single, mask2, NO_SKIP, True, vis, ctr[2], queue)
                region_no_l[u] = 0
            elif mask2[u] != 0:
                region_no_r[u] = 1
                ctr[2] += 1
                _, hit = bfs(geom, qs, rs, stamp, cache, cur, key, thresh, 1,
                             region_no_r, single, mask1, NO_SKIP, True, vis, ctr[2], queue)
                region_no_r[u] = 0
            else:
                f = disjoint_paths(geom, qs, rs, stamp, cache, cur, key, thresh, 1,
                                   region, _neighbor_sources(u, geom, qs, rs), group,
                                   1, 1, True, u, 2, on_path, pred, pvis, parent,
                                   fqueue, ctr)
                hit = 0 if f == 2 else -1
            if hit >= 0:
                return True
        return False
    return False


@njit(cache=True)
def run_trials(seed, t0, t1, thresh, op, want, need, cap_a, cap_b, absorb, region,
               region_no_r, region_no_l, src1, src2, extra, mask1, mask2, group,
               geom, qs, rs, stamp, cache, vis, queue, on_path, pred, pvis, parent,
               fqueue, ctr, edge_idx):
    """
    Count successes over trials ``t0 <= t < t1``.

    Returns ``(successes, touched)`` where ``touched`` counts trials that
    examined some site in ``edge_idx`` (the outermost ring of the domain).
    """
    succ = 0
    touched = 0
    for t in range(t0, t1):
        ctr[3] += 1
        cur = ctr[3]
        key = trial_key(seed, np.uint64(t))
        if eval_program(op, want, need, cap_a, cap_b, absorb, region, region_no_r,
                        region_no_l, src1, src2, extra, mask1, mask2, group,
                        geom, qs, rs, stamp, cache, cur, key, thresh,
                        vis, queue, on_path, pred, pvis, parent, fqueue, ctr):
            succ += 1
        for e in edge_idx:
            if stamp[e] == cur:
                touched += 1
                break
    return succ, touched


@njit(cache=True)
def run_enumeration(c0, c1, op, want, need, cap_a, cap_b, absorb, region,
                    region_no_r, region_no_l, src1, src2, extra, mask1, mask2, group,
                    geom, qs, rs, stamp, cache, vis, queue, on_path, pred, pvis,
                    parent, fqueue, ctr):
    """Program value on every configuration ``c0 <= c < c1`` (bit i = site i)."""
    N = qs.shape[0]
    out = np.zeros(c1 - c0, dtype=np.bool_)
    key = np.uint64(0)
    thresh = np.uint64(0)
    for c in range(c0, c1):
        ctr[3] += 1
        cur = ctr[3]
        for i in range(N):
            stamp[i] = cur
            cache[i] = (c >> i) & 1
        out[c - c0] = eval_program(op, want, need, cap_a, cap_b, absorb, region,
                                   region_no_r, region_no_l, src1, src2, extra,
                                   mask1, mask2, group, geom, qs, rs, stamp, cache,
                                   cur, key, thresh, vis, queue, on_path, pred,
                                   pvis, parent, fqueue, ctr)
    return out


# --- lowest crossing observables over trials ---------------------------------


@njit(cache=True)
def _segment_distance(q, r, n):
    if q + r < 0:
        return -q
    if q > n:
        return q - n + r
    return r


@njit(cache=True)
def crossing_observables(path, qs, rs, n, m, kmark):
    """``(X, min_distance, contacts)`` of a lowest crossing given as indices."""
    kcount = n // m + 1
    for k in range(kcount):
        kmark[k] = 0
    dmin = 1 << 40
    contacts = 0
    N = qs.shape[0]
    for i in path:
        if i >= N:
            continue  # exterior sites lie beyond every disc and the segment
        q = qs[i]
        r = rs[i]
        d = _segment_distance(q, r, n)
        if d < dmin:
            dmin = d
        if r == 0 and 0 <= q <= n:
            contacts += 1
        if r < m:
            lo = q + r - m + 1
            hi = q + m - 1
            k_lo = -((-lo) // m)
            if k_lo < 0:
                k_lo = 0
            k_hi = hi // m
            if k_hi > kcount - 1:
                k_hi = kcount - 1
            for k in range(k_lo, k_hi + 1):
                kmark[k] = 1
    x = 0
    for k in range(kcount):
        x += kmark[k]
    return x, dmin, contacts


@njit(cache=True)
def run_crossing_trials(seed, t0, t1, thresh, n, ms, wired, geom, qs, rs, stamp,
                        cache, ctr, wq, wr, pos, pstamp, edge):
    """
    Per-trial observables of the lowest crossing for trials ``t0..t1-1``.

    ``ms`` lists the disc radii of interest.  Returns ``(X, dist, contacts,
    exists, touched, wq, wr)``; ``X`` has one column per entry of ``ms``
    and ``dist`` is -1 when no crossing exists.
    """
    T = t1 - t0
    X = np.zeros((T, ms.shape[0]), dtype=np.int64)
    dist = np.full(T, -1, dtype=np.int64)
    contacts = np.zeros(T, dtype=np.int64)
    exists = np.zeros(T, dtype=np.bool_)
    touched = np.zeros(T, dtype=np.bool_)
    kmark = np.zeros(n + 1, dtype=np.int64)
    for t in range(t0, t1):
        ctr[3] += 1
        cur = ctr[3]
        ctr[4] += 1
        key = trial_key(seed, np.uint64(t))
        path, tch, wq, wr = extract_crossing(geom, n, qs, rs, stamp, cache, cur, key,
                                             thresh, False, wired, wq, wr, pos,
                                             pstamp, ctr[4], edge)
        j = t - t0
        touched[j] = tch
        if path.shape[0] == 0:
            continue
        exists[j] = True
        for a in range(ms.shape[0]):
            x, d, c = crossing_observables(path, qs, rs, n, ms[a], kmark)
            X[j, a] = x
            dist[j] = d
            contacts[j] = c
    return X, dist, contacts, exists, touched, wq, wr
