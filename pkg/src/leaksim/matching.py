"""Exact minimum-weight perfect matching on dense integer graphs.

The core is an array-based primal-dual blossom algorithm that computes a
maximum-weight matching in O(n^3) on a dense weight matrix.  Minimum
weight perfect matching on a complete graph reduces to it through the
complement transform w' = (w_max + 1) - w: every transformed weight is
positive, any non-perfect matching can be extended with a positive
edge, so the maximum is attained by a perfect matching, and maximizing
the complement minimizes the original total.

Integer weights keep every dual variable integral: vertex labels start
at the maximum weight, edge slack lab[u] + lab[v] - 2w is even, and all
dual adjustments preserve that parity, so tightness checks are exact
equality with no epsilon.  Vertices are 1-indexed internally (0 is the
null sentinel); blossom ids live above n and are recycled after
expansion.

The module works with or without numba: when numba is available every
function is compiled (the hot path for the batch engine), otherwise the
same code runs as plain Python, which is plenty for tests and small
decoding problems.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap


INF = 1 << 60


@njit(cache=True)
def _e_delta(lab, g_u, g_v, g_w, u, v):
    return lab[g_u[u, v]] + lab[g_v[u, v]] - 2 * g_w[u, v]


@njit(cache=True)
def _update_slack(lab, g_u, g_v, g_w, slack, u, x):
    if slack[x] == 0 or (_e_delta(lab, g_u, g_v, g_w, u, x)
                         < _e_delta(lab, g_u, g_v, g_w, slack[x], x)):
        slack[x] = u


@njit(cache=True)
def _set_slack(n, lab, g_u, g_v, g_w, slack, st, S, x):
    slack[x] = 0
    for u in range(1, n + 1):
        if g_w[u, x] > 0 and st[u] != x and S[st[u]] == 0:
            _update_slack(lab, g_u, g_v, g_w, slack, u, x)


@njit(cache=True)
def _q_push(n, q, meta, flower, flower_len, stack, x):
    sp = 0
    stack[sp] = x
    sp += 1
    while sp > 0:
        sp -= 1
        y = stack[sp]
        if y <= n:
            if meta[2] >= q.shape[0]:
                raise RuntimeError("matching queue overflow")
            q[meta[2]] = y
            meta[2] += 1
        else:
            for i in range(flower_len[y]):
                stack[sp] = flower[y, i]
                sp += 1


@njit(cache=True)
def _set_st(n, st, flower, flower_len, stack, x, b):
    sp = 0
    stack[sp] = x
    sp += 1
    while sp > 0:
        sp -= 1
        y = stack[sp]
        st[y] = b
        if y > n:
            for i in range(flower_len[y]):
                stack[sp] = flower[y, i]
                sp += 1


@njit(cache=True)
def _get_pr(flower, flower_len, b, xr):
    """Index of ``xr`` in b's cycle, reversing the tail if it is odd.

    The cycle order is only defined up to direction; an odd position is
    flipped to the even one by reversing everything after the base so
    the stem from base to xr always has even length.
    """
    ln = flower_len[b]
    pr = 0
    for i in range(ln):
        if flower[b, i] == xr:
            pr = i
            break
    if pr % 2 == 1:
        i = 1
        j = ln - 1
        while i < j:
            tmp = flower[b, i]
            flower[b, i] = flower[b, j]
            flower[b, j] = tmp
            i += 1
            j -= 1
        return ln - pr
    return pr


@njit(cache=True)
def _rotate_flower(flower, flower_len, b, pr):
    """Rotate b's cycle left by ``pr`` via triple reversal."""
    ln = flower_len[b]
    i = 0
    j = pr - 1
    while i < j:
        tmp = flower[b, i]
        flower[b, i] = flower[b, j]
        flower[b, j] = tmp
        i += 1
        j -= 1
    i = pr
    j = ln - 1
    while i < j:
        tmp = flower[b, i]
        flower[b, i] = flower[b, j]
        flower[b, j] = tmp
        i += 1
        j -= 1
    i = 0
    j = ln - 1
    while i < j:
        tmp = flower[b, i]
        flower[b, i] = flower[b, j]
        flower[b, j] = tmp
        i += 1
        j -= 1


@njit(cache=True)
def _set_match(n, match, g_u, g_v, flower, flower_len, flower_from,
               stack2, u, v):
    sp = 0
    stack2[sp] = u
    stack2[sp + 1] = v
    sp += 2
    while sp > 0:
        sp -= 2
        uu = stack2[sp]
        vv = stack2[sp + 1]
        match[uu] = g_v[uu, vv]
        if uu > n:
            xr = flower_from[uu, g_u[uu, vv]]
            pr = _get_pr(flower, flower_len, uu, xr)
            for i in range(pr):
                stack2[sp] = flower[uu, i]
                stack2[sp + 1] = flower[uu, i ^ 1]
                sp += 2
            stack2[sp] = xr
            stack2[sp + 1] = vv
            sp += 2
            _rotate_flower(flower, flower_len, uu, pr)


@njit(cache=True)
def _augment(n, match, st, pa, g_u, g_v, flower, flower_len, flower_from,
             stack2, u, v):
    while True:
        xnv = st[match[u]]
        _set_match(n, match, g_u, g_v, flower, flower_len, flower_from,
                   stack2, u, v)
        if xnv == 0:
            return
        _set_match(n, match, g_u, g_v, flower, flower_len, flower_from,
                   stack2, xnv, st[pa[xnv]])
        u = st[pa[xnv]]
        v = xnv


@njit(cache=True)
def _get_lca(st, match, pa, vis, meta, u, v):
    meta[3] += 1
    t = meta[3]
    while u != 0 or v != 0:
        if u != 0:
            if vis[u] == t:
                return u
            vis[u] = t
            u = st[match[u]]
            if u != 0:
                u = st[pa[u]]
        tmp = u
        u = v
        v = tmp
    return 0


@njit(cache=True)
def _add_blossom(n, meta, lab, match, slack, st, pa, S, g_u, g_v, g_w,
                 flower, flower_len, flower_from, q, stack, u, lca, v):
    b = n + 1
    while b <= meta[0] and st[b] != 0:
        b += 1
    if b > meta[0]:
        meta[0] += 1
    lab[b] = 0
    S[b] = 0
    match[b] = match[lca]
    width = flower.shape[1]
    flower[b, 0] = lca
    ln = 1
    x = u
    while x != lca:
        if ln + 2 > width:
            raise RuntimeError("blossom cycle overflow")
        flower[b, ln] = x
        ln += 1
        y = st[match[x]]
        flower[b, ln] = y
        ln += 1
        flower_len[b] = ln
        _q_push(n, q, meta, flower, flower_len, stack, y)
        x = st[pa[y]]
    i = 1
    j = ln - 1
    while i < j:
        tmp = flower[b, i]
        flower[b, i] = flower[b, j]
        flower[b, j] = tmp
        i += 1
        j -= 1
    x = v
    while x != lca:
        if ln + 2 > width:
            raise RuntimeError("blossom cycle overflow")
        flower[b, ln] = x
        ln += 1
        y = st[match[x]]
        flower[b, ln] = y
        ln += 1
        flower_len[b] = ln
        _q_push(n, q, meta, flower, flower_len, stack, y)
        x = st[pa[y]]
    flower_len[b] = ln
    _set_st(n, st, flower, flower_len, stack, b, b)
    nx = meta[0]
    for x2 in range(1, nx + 1):
        g_w[b, x2] = 0
        g_w[x2, b] = 0
    for x2 in range(1, n + 1):
        flower_from[b, x2] = 0
    for i in range(ln):
        xs = flower[b, i]
        for x2 in range(1, nx + 1):
            if g_w[b, x2] == 0 or (_e_delta(lab, g_u, g_v, g_w, xs, x2)
                                   < _e_delta(lab, g_u, g_v, g_w, b, x2)):
                g_u[b, x2] = g_u[xs, x2]
                g_v[b, x2] = g_v[xs, x2]
                g_w[b, x2] = g_w[xs, x2]
                g_u[x2, b] = g_u[x2, xs]
                g_v[x2, b] = g_v[x2, xs]
                g_w[x2, b] = g_w[x2, xs]
        for x2 in range(1, n + 1):
            if flower_from[xs, x2] != 0:
                flower_from[b, x2] = xs
    _set_slack(n, lab, g_u, g_v, g_w, slack, st, S, b)


@njit(cache=True)
def _expand_blossom(n, meta, lab, match, slack, st, pa, S, g_u, g_v, g_w,
                    flower, flower_len, flower_from, q, stack, b):
    for i in range(flower_len[b]):
        _set_st(n, st, flower, flower_len, stack, flower[b, i], flower[b, i])
    xr = flower_from[b, g_u[b, pa[b]]]
    pr = _get_pr(flower, flower_len, b, xr)
    i = 0
    while i < pr:
        xs = flower[b, i]
        xns = flower[b, i + 1]
        pa[xs] = g_u[xns, xs]
        S[xs] = 1
        S[xns] = 0
        slack[xs] = 0
        _set_slack(n, lab, g_u, g_v, g_w, slack, st, S, xns)
        _q_push(n, q, meta, flower, flower_len, stack, xns)
        i += 2
    S[xr] = 1
    pa[xr] = pa[b]
    for i in range(pr + 1, flower_len[b]):
        S[flower[b, i]] = -1
        _set_slack(n, lab, g_u, g_v, g_w, slack, st, S, flower[b, i])
    st[b] = 0


@njit(cache=True)
def _on_found_edge(n, meta, lab, match, slack, st, pa, S, vis, g_u, g_v, g_w,
                   flower, flower_len, flower_from, q, stack, stack2, eu, ev):
    u = st[eu]
    v = st[ev]
    if S[v] == -1:
        pa[v] = eu
        S[v] = 1
        nu = st[match[v]]
        slack[v] = 0
        slack[nu] = 0
        S[nu] = 0
        _q_push(n, q, meta, flower, flower_len, stack, nu)
    elif S[v] == 0:
        lca = _get_lca(st, match, pa, vis, meta, u, v)
        if lca == 0:
            _augment(n, match, st, pa, g_u, g_v, flower, flower_len,
                     flower_from, stack2, u, v)
            _augment(n, match, st, pa, g_u, g_v, flower, flower_len,
                     flower_from, stack2, v, u)
            return True
        _add_blossom(n, meta, lab, match, slack, st, pa, S, g_u, g_v, g_w,
                     flower, flower_len, flower_from, q, stack, u, lca, v)
    return False


@njit(cache=True)
def _matching(n, meta, lab, match, slack, st, pa, S, vis, g_u, g_v, g_w,
              flower, flower_len, flower_from, q, stack, stack2):
    nx = meta[0]
    for x in range(nx + 1):
        S[x] = -1
        slack[x] = 0
    meta[1] = 0
    meta[2] = 0
    for x in range(1, nx + 1):
        if st[x] == x and match[x] == 0:
            pa[x] = 0
            S[x] = 0
            _q_push(n, q, meta, flower, flower_len, stack, x)
    if meta[2] == 0:
        return False
    while True:
        while meta[1] < meta[2]:
            u = q[meta[1]]
            meta[1] += 1
            if S[st[u]] == 1:
                continue
            for v in range(1, n + 1):
                if g_w[u, v] > 0 and st[u] != st[v]:
                    if _e_delta(lab, g_u, g_v, g_w, u, v) == 0:
                        if _on_found_edge(n, meta, lab, match, slack, st, pa,
                                          S, vis, g_u, g_v, g_w, flower,
                                          flower_len, flower_from, q, stack,
                                          stack2, g_u[u, v], g_v[u, v]):
                            return True
                    else:
                        _update_slack(lab, g_u, g_v, g_w, slack, u, st[v])
        nx = meta[0]
        d = INF
        for b in range(n + 1, nx + 1):
            if st[b] == b and S[b] == 1:
                half = lab[b] // 2
                if half < d:
                    d = half
        for x in range(1, nx + 1):
            if st[x] == x and slack[x] != 0:
                if S[x] == -1:
                    ed = _e_delta(lab, g_u, g_v, g_w, slack[x], x)
                    if ed < d:
                        d = ed
                elif S[x] == 0:
                    ed = _e_delta(lab, g_u, g_v, g_w, slack[x], x) // 2
                    if ed < d:
                        d = ed
        for u2 in range(1, n + 1):
            if S[st[u2]] == 0:
                if lab[u2] <= d:
                    return False
                lab[u2] -= d
            elif S[st[u2]] == 1:
                lab[u2] += d
        nx = meta[0]
        for b in range(n + 1, nx + 1):
            if st[b] == b:
                if S[b] == 0:
                    lab[b] += 2 * d
                elif S[b] == 1:
                    lab[b] -= 2 * d
        for x in range(1, nx + 1):
            if (st[x] == x and slack[x] != 0 and st[slack[x]] != x
                    and _e_delta(lab, g_u, g_v, g_w, slack[x], x) == 0):
                if _on_found_edge(n, meta, lab, match, slack, st, pa, S, vis,
                                  g_u, g_v, g_w, flower, flower_len,
                                  flower_from, q, stack, stack2,
                                  g_u[slack[x], x], g_v[slack[x], x]):
                    return True
        nx = meta[0]
        for b in range(n + 1, nx + 1):
            if st[b] == b and S[b] == 1 and lab[b] == 0:
                _expand_blossom(n, meta, lab, match, slack, st, pa, S, g_u,
                                g_v, g_w, flower, flower_len, flower_from, q,
                                stack, b)


@njit(cache=True)
def _blossom_core(n, wmat, lab, match, slack, st, pa, S, vis, g_u, g_v, g_w,
                  flower, flower_len, flower_from, q, stack, stack2):
    """Maximum-weight matching of ``wmat`` (1-indexed, positive weights).

    Fills ``match`` with the partner of each vertex (0 if unmatched).
    All workspace arrays must come from :func:`make_workspace` with
    ``n_max >= n``.
    """
    meta = np.zeros(4, dtype=np.int64)
    meta[0] = n
    m = 2 * n + 4
    for x in range(m):
        st[x] = x if 1 <= x <= n else 0
        match[x] = 0
        vis[x] = 0
        flower_len[x] = 0
        lab[x] = 0
        S[x] = -1
        slack[x] = 0
        pa[x] = 0
    w_max = 0
    for u in range(1, n + 1):
        for v in range(1, n + 1):
            g_u[u, v] = u
            g_v[u, v] = v
            if u == v:
                g_w[u, v] = 0
            else:
                w = wmat[u, v]
                g_w[u, v] = w
                if w > w_max:
                    w_max = w
        for v in range(1, n + 1):
            flower_from[u, v] = u if u == v else 0
    for u in range(1, n + 1):
        lab[u] = w_max
    while _matching(n, meta, lab, match, slack, st, pa, S, vis, g_u, g_v,
                    g_w, flower, flower_len, flower_from, q, stack, stack2):
        pass
    return 0


def make_workspace(n_max: int):
    """Allocate reusable arrays for :func:`_blossom_core` up to ``n_max``."""
    m = 2 * n_max + 4
    width = n_max + 2
    qcap = 4 * (n_max + 2) * (n_max + 2) + 64
    i64 = np.int64
    return (
        np.zeros(m, dtype=i64),  # lab
        np.zeros(m, dtype=i64),  # match
        np.zeros(m, dtype=i64),  # slack
        np.zeros(m, dtype=i64),  # st
        np.zeros(m, dtype=i64),  # pa
        np.zeros(m, dtype=i64),  # S
        np.zeros(m, dtype=i64),  # vis
        np.zeros((m, m), dtype=i64),  # g_u
        np.zeros((m, m), dtype=i64),  # g_v
        np.zeros((m, m), dtype=i64),  # g_w
        np.zeros((m, width), dtype=i64),  # flower
        np.zeros(m, dtype=i64),  # flower_len
        np.zeros((m, width), dtype=i64),  # flower_from
        np.zeros(qcap, dtype=i64),  # q
        np.zeros(4 * m + 16, dtype=i64),  # stack
        np.zeros(8 * m + 32, dtype=i64),  # stack2
    )


def min_weight_perfect_matching(weights) -> list[tuple[int, int]]:
    """Exact minimum-weight perfect matching of a complete graph.

    ``weights`` is a symmetric (n, n) matrix of non-negative integers
    (the diagonal is ignored).  Returns the matched pairs as 0-indexed
    ``(i, j)`` tuples with ``i < j``, sorted.  Raises ``ValueError`` for
    an odd node count, which violates the even-parity contract every
    caller is supposed to guarantee.
    """
    w = np.asarray(weights)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValueError("weights must be a square matrix")
    n = int(w.shape[0])
    if n == 0:
        return []
    if n % 2 == 1:
        raise ValueError(f"perfect matching needs an even node count, got {n}")
    if not np.issubdtype(w.dtype, np.integer):
        rounded = np.rint(w)
        if not np.allclose(w, rounded, rtol=0, atol=0):
            raise ValueError("weights must be integers")
        w = rounded
    w = w.astype(np.int64)
    if (w < 0).any():
        raise ValueError("weights must be non-negative")
    if not np.array_equal(w, w.T):
        raise ValueError("weights must be symmetric")
    cap = int(w.max()) + 1
    wmat = np.zeros((n + 1, n + 1), dtype=np.int64)
    wmat[1:, 1:] = cap - w
    ws = make_workspace(n)
    _blossom_core(n, wmat, *ws)
    match = ws[1]
    pairs = []
    for u in range(1, n + 1):
        v = int(match[u])
        if v == 0:
            raise RuntimeError("matching incomplete on a complete graph")
        if u < v:
            pairs.append((u - 1, v - 1))
    return pairs
