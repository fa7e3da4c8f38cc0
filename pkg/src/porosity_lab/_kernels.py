"""Compiled sweeps over canonical balls.

Two backends share one contract:

* ``generic_*`` work on an explicit ``(n, n)`` sample distance table ``S``.
  Balls of a center are prefixes of that center's distance order.  Cost is
  O(n^3) for the hole/packing sweeps.
* ``line_*`` work on sorted 1-D coordinates, where every ball is an index
  interval.  Per-ball cost is O(log n) (holes, a1, doubling) or
  O(k log n) for a packing that selects k points.

Both backends use identical floating point expressions for every comparison
that decides set membership, so they agree exactly on 1-D inputs.
"""

from __future__ import annotations

import numpy as np
from numba import njit

INF = np.inf


# ---------------------------------------------------------------- utilities


@njit(cache=True)
def triangular_constant(D):
    """max d(x,z) / (d(x,y) + d(y,z)) over distinct triples, clamped below at 1."""
    N = D.shape[0]
    best = 1.0
    for y in range(N):
        for x in range(N):
            if x == y:
                continue
            dxy = D[x, y]
            for z in range(x + 1, N):
                if z == y:
                    continue
                num = D[x, z]
                if num == 0.0:
                    continue
                den = dxy + D[y, z]
                if den == 0.0:
                    return INF
                r = num / den
                if r > best:
                    best = r
    return best


@njit(cache=True)
def _floor_log2_table(n):
    lg = np.zeros(n + 2, np.int64)
    for i in range(2, n + 2):
        lg[i] = lg[i // 2] + 1
    return lg


@njit(cache=True)
def build_sparse(vals, want_max):
    """Sparse table of arg-extremum indices; ties resolve to the smaller index."""
    n = vals.shape[0]
    levels = 1
    while (1 << levels) <= n:
        levels += 1
    tab = np.zeros((levels, max(n, 1)), np.int64)
    for i in range(n):
        tab[0, i] = i
    for k in range(1, levels):
        half = 1 << (k - 1)
        for i in range(n - (1 << k) + 1):
            a = tab[k - 1, i]
            b = tab[k - 1, i + half]
            if want_max:
                tab[k, i] = a if vals[a] >= vals[b] else b
            else:
                tab[k, i] = a if vals[a] <= vals[b] else b
    return tab


@njit(cache=True)
def query_sparse(vals, tab, lg, lo, hi, want_max):
    """Arg-extremum of vals[lo:hi] (hi > lo)."""
    k = lg[hi - lo]
    a = tab[k, lo]
    b = tab[k, hi - (1 << k)]
    if want_max:
        return a if vals[a] >= vals[b] else b
    return a if vals[a] <= vals[b] else b


@njit(cache=True)
def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


@njit(cache=True)
def dd_prefix(vals):
    """Compensated prefix sums: vals[:i].sum() ~ hi[i] + lo[i]."""
    n = vals.shape[0]
    hi = np.zeros(n + 1)
    lo = np.zeros(n + 1)
    for i in range(n):
        s, e = _two_sum(hi[i], vals[i])
        hi[i + 1] = s
        lo[i + 1] = lo[i] + e
    return hi, lo


@njit(cache=True)
def dd_range(hi, lo, a, b):
    """Sum of vals[a:b] from compensated prefix sums."""
    s, e = _two_sum(hi[b], -hi[a])
    return s + (e + (lo[b] - lo[a]))


@njit(cache=True)
def _two_prod(a, b):
    # Dekker's error-free product: a * b == p + e exactly
    p = a * b
    t = 134217729.0 * a
    ah = t - (t - a)
    al = a - ah
    t = 134217729.0 * b
    bh = t - (t - b)
    bl = b - bh
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


@njit(cache=True)
def wm_prefix(w, mu):
    """Compensated prefix sums of the exact products w * mu (rounded part, error part)."""
    n = w.shape[0]
    ph = np.empty(n)
    pe = np.empty(n)
    for i in range(n):
        ph[i], pe[i] = _two_prod(w[i], mu[i])
    h1, l1 = dd_prefix(ph)
    h2, l2 = dd_prefix(pe)
    return h1, l1, h2, l2


@njit(cache=True)
def a1_ratio(wp, mh, ml, a, b, wmin):
    """(sum w mu / sum mu) / wmin over positions [a, b), as sum w mu / (wmin sum mu).

    Numerator and denominator are both near correctly rounded, so a weight that
    is constant on the range gives exactly 1; the mean never drops below the
    minimum, so the result is clamped at 1.
    """
    h1, l1, h2, l2 = wp
    s, e = _two_sum(h1[b], -h1[a])
    e += (l1[b] - l1[a]) + dd_range(h2, l2, a, b)
    num = s + e
    s, e = _two_sum(mh[b], -mh[a])
    e += ml[b] - ml[a]
    p, pe = _two_prod(wmin, s)
    den = p + (pe + wmin * e)
    ratio = num / den
    return ratio if ratio > 1.0 else 1.0


@njit(cache=True)
def _better(ratio, cid, r, best, bcid, br):
    # larger ratio wins; ties go to the lexicographically smallest (center id, radius)
    if ratio > best:
        return True
    if ratio == best:
        if cid < bcid:
            return True
        if cid == bcid and r < br:
            return True
    return False


@njit(cache=True)
def _worse(val, cid, r, best, bcid, br):
    # smaller value wins; ties as in _better
    if val < best:
        return True
    if val == best:
        if cid < bcid:
            return True
        if cid == bcid and r < br:
            return True
    return False


# ------------------------------------------------------------ generic backend


@njit(cache=True)
def _generic_radii(ds, n, diam2, ks, rs):
    m = 0
    for k in range(1, n + 1):
        if k == n:
            ks[m] = n
            rs[m] = diam2
            m += 1
        elif ds[k] > ds[k - 1]:
            ks[m] = k
            rs[m] = ds[k]
            m += 1
    return m


@njit(cache=True)
def generic_count_balls(S, diam2):
    n = S.shape[0]
    ks = np.empty(n, np.int64)
    rs = np.empty(n)
    total = 0
    for c in range(n):
        ds = np.sort(S[c])
        total += _generic_radii(ds, n, diam2, ks, rs)
    return total


@njit(cache=True)
def generic_enumerate(S, diam2, out_c, out_r, out_k):
    n = S.shape[0]
    ks = np.empty(n, np.int64)
    rs = np.empty(n)
    pos = 0
    for c in range(n):
        ds = np.sort(S[c])
        m = _generic_radii(ds, n, diam2, ks, rs)
        for i in range(m):
            out_c[pos] = c
            out_r[pos] = rs[i]
            out_k[pos] = ks[i]
            pos += 1
    return pos


@njit(cache=True)
def generic_measure_doubling(S, mu, ids, diam2):
    n = S.shape[0]
    ks = np.empty(n, np.int64)
    rs = np.empty(n)
    best = -INF
    bc = -1
    br = INF
    for c in range(n):
        order = np.argsort(S[c], kind="mergesort")
        ds = S[c][order]
        cmh, cml = dd_prefix(mu[order])
        m = _generic_radii(ds, n, diam2, ks, rs)
        for i in range(m):
            k = ks[i]
            r = rs[i]
            k2 = np.searchsorted(ds, 2.0 * r)
            ratio = (cmh[k2] + cml[k2]) / (cmh[k] + cml[k])
            if bc < 0 or _better(ratio, ids[c], r, best, ids[bc], br):
                best = ratio
                bc = c
                br = r
    return best, bc, br


@njit(cache=True)
def generic_a1(S, mu, w, ids, diam2, store, out_ratio):
    n = S.shape[0]
    ks = np.empty(n, np.int64)
    rs = np.empty(n)
    best = -INF
    bc = -1
    br = INF
    pos = 0
    wm = np.empty(n)
    mm = np.empty(n)
    for c in range(n):
        order = np.argsort(S[c], kind="mergesort")
        ds = S[c][order]
        mn = np.empty(n + 1)
        mn[0] = INF
        for j in range(n):
            y = order[j]
            mm[j] = mu[y]
            wm[j] = w[y]
            mn[j + 1] = w[y] if w[y] < mn[j] else mn[j]
        mh, ml = dd_prefix(mm)
        wp = wm_prefix(wm, mm)
        m = _generic_radii(ds, n, diam2, ks, rs)
        for i in range(m):
            k = ks[i]
            r = rs[i]
            ratio = a1_ratio(wp, mh, ml, 0, k, mn[k])
            if store:
                out_ratio[pos] = ratio
            pos += 1
            if bc < 0 or _better(ratio, ids[c], r, best, ids[bc], br):
                best = ratio
                bc = c
                br = r
    return best, bc, br


@njit(cache=True)
def _generic_raw_holes(S, dE, ids, order, n, raw, wit, g):
    """Raw hole value for every prefix of ``order``; O(n^2)."""
    for j in range(n):
        g[order[j]] = INF
    for k in range(n, 0, -1):
        if k < n:
            z = order[k]
            for j in range(k):
                y = order[j]
                v = S[y, z]
                if v < g[y]:
                    g[y] = v
        best = 0.0
        bw = -1
        for j in range(k):
            y = order[j]
            d = dE[y]
            if d <= 0.0:
                continue
            f = d if d < g[y] else g[y]
            if f > best or (f == best and bw >= 0 and ids[y] < ids[bw]):
                best = f
                bw = y
        raw[k] = best
        wit[k] = bw


@njit(cache=True)
def generic_holes(S, dE, ids, K, diam2, store, out_rho, out_wit, out_rho2, viol_cap, viol_c, viol_r):
    """Hole function over all canonical balls plus its doubling and distance-to-hole ratios.

    Returns (C, c_center, c_radius, n_viol, C0, c0_center, c0_radius, n_balls).
    Doubling pairs with rho(B)=0 < rho(2B) are violations, excluded from C.
    """
    n = S.shape[0]
    ks = np.empty(n, np.int64)
    rs = np.empty(n)
    raw = np.zeros(n + 1)
    wit = np.full(n + 1, -1, np.int64)
    pmax = np.zeros(n + 1)
    g = np.empty(n)
    C = -INF
    cc = -1
    cr = INF
    C0 = -INF
    c0c = -1
    c0r = INF
    nviol = 0
    pos = 0
    for c in range(n):
        order = np.argsort(S[c], kind="mergesort")
        ds = S[c][order]
        pm = 0.0
        for j in range(n):
            d = dE[order[j]]
            if d > pm:
                pm = d
            pmax[j + 1] = pm
        # rows of the prefix recompute need the full pass regardless of radii
        _generic_raw_holes(S, dE, ids, order, n, raw, wit, g)
        m = _generic_radii(ds, n, diam2, ks, rs)
        for i in range(m):
            k = ks[i]
            r = rs[i]
            cap = 2.0 * K * r
            rho = raw[k] if raw[k] < cap else cap
            k2 = np.searchsorted(ds, 2.0 * r)
            cap2 = 2.0 * K * (2.0 * r)
            rho2 = raw[k2] if raw[k2] < cap2 else cap2
            if store:
                out_rho[pos] = rho
                out_wit[pos] = wit[k] if rho > 0.0 else -1
                out_rho2[pos] = rho2
            pos += 1
            if rho > 0.0:
                ratio = rho2 / rho
                if cc < 0 or _better(ratio, ids[c], r, C, ids[cc], cr):
                    C = ratio
                    cc = c
                    cr = r
                if dE[c] < r:
                    q = pmax[k] / rho
                    if c0c < 0 or _better(q, ids[c], r, C0, ids[c0c], c0r):
                        C0 = q
                        c0c = c
                        c0r = r
            elif rho2 > 0.0:
                if nviol < viol_cap:
                    viol_c[nviol] = c
                    viol_r[nviol] = r
                nviol += 1
    return C, cc, cr, nviol, C0, c0c, c0r, pos


@njit(cache=True)
def _generic_pack_ball(S, dE, ids, mu, order, k, g, t, dbuf, sel, covered, muB):
    nd = 0
    for j in range(k):
        y = order[j]
        if dE[y] >= t and g[y] >= t:
            dbuf[nd] = y
            nd += 1
    if nd == 0:
        return 0.0
    sub = dbuf[:nd].copy()
    keys = np.empty(nd, np.int64)
    for q in range(nd):
        keys[q] = ids[sub[q]]
    idx = np.argsort(keys, kind="mergesort")
    ns = 0
    two_t = 2.0 * t
    for q in range(nd):
        y = sub[idx[q]]
        ok = True
        for s in range(ns):
            if S[y, sel[s]] < two_t:
                ok = False
                break
        if ok:
            sel[ns] = y
            ns += 1
    for j in range(k):
        covered[order[j]] = False
    total = 0.0
    comp = 0.0
    for s in range(ns):
        x = sel[s]
        disjoint = True
        for j in range(k):
            z = order[j]
            if S[x, z] < t and covered[z]:
                disjoint = False
                break
        if disjoint:
            for j in range(k):
                z = order[j]
                if S[x, z] < t:
                    covered[z] = True
                    total, e = _two_sum(total, mu[z])
                    comp += e
    return (total + comp) / muB


@njit(cache=True)
def generic_packing(S, dE, ids, mu, K, diam2, gamma, sigma, store, out_sigma, fail_cap, fail_c, fail_r, fail_s):
    """Greedy packing on every canonical ball.

    Returns (min_sigma, argmin_center, argmin_radius, n_fail, n_balls).
    """
    n = S.shape[0]
    ks = np.empty(n, np.int64)
    rs = np.empty(n)
    raw = np.zeros(n + 1)
    isb = np.zeros(n + 1, np.int64)
    rad = np.zeros(n + 1)
    g = np.empty(n)
    dbuf = np.empty(n, np.int64)
    sel = np.empty(n, np.int64)
    covered = np.zeros(n, np.bool_)
    best = INF
    bc = -1
    br = INF
    nfail = 0
    pos = 0
    for c in range(n):
        order = np.argsort(S[c], kind="mergesort")
        ds = S[c][order]
        cmh, cml = dd_prefix(mu[order])
        m = _generic_radii(ds, n, diam2, ks, rs)
        isb[:] = -1
        for i in range(m):
            isb[ks[i]] = i
            rad[ks[i]] = rs[i]
        ach = np.empty(m)
        for j in range(n):
            g[order[j]] = INF
        for k in range(n, 0, -1):
            if k < n:
                z = order[k]
                for j in range(k):
                    y = order[j]
                    v = S[y, z]
                    if v < g[y]:
                        g[y] = v
            if isb[k] < 0:
                continue
            rw = 0.0
            for j in range(k):
                y = order[j]
                d = dE[y]
                if d <= 0.0:
                    continue
                f = d if d < g[y] else g[y]
                if f > rw:
                    rw = f
            cap = 2.0 * K * rad[k]
            rho = rw if rw < cap else cap
            t = gamma * rho
            if t <= 0.0:
                ach[isb[k]] = 0.0
            else:
                ach[isb[k]] = _generic_pack_ball(S, dE, ids, mu, order, k, g, t, dbuf, sel, covered,
                                                     cmh[k] + cml[k])
        for i in range(m):
            a = ach[i]
            r = rs[i]
            if store:
                out_sigma[pos] = a
            pos += 1
            if bc < 0 or _worse(a, ids[c], r, best, ids[bc], br):
                best = a
                bc = c
                br = r
            if a < sigma:
                if nfail < fail_cap:
                    fail_c[nfail] = c
                    fail_r[nfail] = r
                    fail_s[nfail] = a
                nfail += 1
    return best, bc, br, nfail, pos


# --------------------------------------------------------------- line backend


@njit(cache=True)
def _center_balls(x, c, diam2, lo_buf, hi_buf, r_buf):
    n = x.shape[0]
    lo = c
    hi = c + 1
    m = 0
    done = False
    while not done:
        dl = x[c] - x[lo - 1] if lo > 0 else INF
        dr = x[hi] - x[c] if hi < n else INF
        v = dl if dl < dr else dr
        lo_buf[m] = lo
        hi_buf[m] = hi
        if v == INF:
            r_buf[m] = diam2
            done = True
        else:
            r_buf[m] = v
            while lo > 0 and x[c] - x[lo - 1] <= v:
                lo -= 1
            while hi < n and x[hi] - x[c] <= v:
                hi += 1
        m += 1
    return m


@njit(cache=True)
def line_interval(x, c, r):
    """Index interval [lo, hi) of {j : |x_j - x_c| < r}."""
    n = x.shape[0]
    a = 0
    b = c
    while a < b:  # first j in [0, c] with x_c - x_j < r
        mid = (a + b) // 2
        if x[c] - x[mid] < r:
            b = mid
        else:
            a = mid + 1
    lo = a
    a = c + 1
    b = n
    while a < b:  # first j in [c+1, n) with x_j - x_c >= r
        mid = (a + b) // 2
        if x[mid] - x[c] >= r:
            b = mid
        else:
            a = mid + 1
    return lo, a


@njit(cache=True)
def line_count_balls(x, diam2):
    n = x.shape[0]
    lo_buf = np.empty(n + 1, np.int64)
    hi_buf = np.empty(n + 1, np.int64)
    r_buf = np.empty(n + 1)
    total = 0
    for c in range(n):
        total += _center_balls(x, c, diam2, lo_buf, hi_buf, r_buf)
    return total


@njit(cache=True)
def line_enumerate(x, diam2, out_c, out_r, out_lo, out_hi):
    n = x.shape[0]
    lo_buf = np.empty(n + 1, np.int64)
    hi_buf = np.empty(n + 1, np.int64)
    r_buf = np.empty(n + 1)
    pos = 0
    for c in range(n):
        m = _center_balls(x, c, diam2, lo_buf, hi_buf, r_buf)
        for i in range(m):
            out_c[pos] = c
            out_r[pos] = r_buf[i]
            out_lo[pos] = lo_buf[i]
            out_hi[pos] = hi_buf[i]
            pos += 1
    return pos


@njit(cache=True)
def line_measure_doubling(x, cmh, cml, diam2):
    n = x.shape[0]
    lo_buf = np.empty(n + 1, np.int64)
    hi_buf = np.empty(n + 1, np.int64)
    r_buf = np.empty(n + 1)
    best = -INF
    bc = -1
    br = INF
    for c in range(n):
        m = _center_balls(x, c, diam2, lo_buf, hi_buf, r_buf)
        for i in range(m):
            r = r_buf[i]
            lo2, hi2 = line_interval(x, c, 2.0 * r)
            ratio = dd_range(cmh, cml, lo2, hi2) / dd_range(cmh, cml, lo_buf[i], hi_buf[i])
            if bc < 0 or _better(ratio, c, r, best, bc, br):
                best = ratio
                bc = c
                br = r
    return best, bc, br


@njit(cache=True)
def line_a1(x, mu, w, wtab, lg, diam2, store, out_ratio):
    n = x.shape[0]
    lo_buf = np.empty(n + 1, np.int64)
    hi_buf = np.empty(n + 1, np.int64)
    r_buf = np.empty(n + 1)
    mh, ml = dd_prefix(mu)
    wp = wm_prefix(w, mu)
    best = -INF
    bc = -1
    br = INF
    pos = 0
    for c in range(n):
        m = _center_balls(x, c, diam2, lo_buf, hi_buf, r_buf)
        for i in range(m):
            lo = lo_buf[i]
            hi = hi_buf[i]
            r = r_buf[i]
            wmin = w[query_sparse(w, wtab, lg, lo, hi, False)]
            ratio = a1_ratio(wp, mh, ml, lo, hi, wmin)
            if store:
                out_ratio[pos] = ratio
            pos += 1
            if bc < 0 or _better(ratio, c, r, best, bc, br):
                best = ratio
                bc = c
                br = r
    return best, bc, br


@njit(cache=True)
def _first_ge(x, i0, i1, base, thr):
    # first j in [i0, i1) with x[j] - base >= thr, else i1
    a = i0
    b = i1
    while a < b:
        mid = (a + b) // 2
        if x[mid] - base >= thr:
            b = mid
        else:
            a = mid + 1
    return a


@njit(cache=True)
def _first_cross(x, i0, i1, L, R):
    # first j in [i0, i1) with x[j] - L >= R - x[j], else i1
    a = i0
    b = i1
    while a < b:
        mid = (a + b) // 2
        if x[mid] - L >= R - x[mid]:
            b = mid
        else:
            a = mid + 1
    return a


@njit(cache=True)
def _edge_max(x, i0, i1, L, R):
    """max over j in [i0, i1) of min(x_j - L, R - x_j) and its first maximizer."""
    if i0 >= i1:
        return -1.0, -1
    j = _first_cross(x, i0, i1, L, R)
    best = -1.0
    for cand in (j - 1, j):
        if cand >= i0 and cand < i1:
            u = x[cand] - L
            v = R - x[cand]
            f = u if u < v else v
            if f > best:
                best = f
    wit = _first_ge(x, i0, i1, L, best)
    return best, wit


@njit(cache=True)
def line_raw_hole(x, lo, hi, cell, cstart, cend, eLc, eRc, cellmax, cellarg, ctab, lg):
    """Raw (uncapped) hole value of the sample interval [lo, hi) and its witness index."""
    n = x.shape[0]
    a = x[lo - 1] if lo > 0 else -INF
    b = x[hi] if hi < n else INF
    c1 = cell[lo]
    c2 = cell[hi - 1]
    L = a if a > eLc[c1] else eLc[c1]
    R = b if b < eRc[c1] else eRc[c1]
    if c1 == c2:
        v, wv = _edge_max(x, lo, hi, L, R)
    else:
        v, wv = _edge_max(x, lo, cend[c1], L, R)
        if c2 - c1 >= 2:
            cm = query_sparse(cellmax, ctab, lg, c1 + 1, c2, True)
            if cellmax[cm] > v:
                v = cellmax[cm]
                wv = cellarg[cm]
        L2 = a if a > eLc[c2] else eLc[c2]
        R2 = b if b < eRc[c2] else eRc[c2]
        v2, w2 = _edge_max(x, cstart[c2], hi, L2, R2)
        if v2 > v:
            v = v2
            wv = w2
    if v <= 0.0:
        return 0.0, -1
    return v, wv


@njit(cache=True)
def _find_size(sizes, m, size):
    # index of ``size`` in the increasing array sizes[:m], else -1
    a = 0
    b = m
    while a < b:
        mid = (a + b) // 2
        if sizes[mid] < size:
            a = mid + 1
        else:
            b = mid
    if a < m and sizes[a] == size:
        return a
    return -1


@njit(cache=True)
def line_holes(x, dE, cell, cstart, cend, eLc, eRc, cellmax, cellarg, ctab, dtab, lg, K, diam2,
               store, out_rho, out_wit, out_rho2, viol_cap, viol_c, viol_r):
    n = x.shape[0]
    lo_buf = np.empty(n + 1, np.int64)
    hi_buf = np.empty(n + 1, np.int64)
    r_buf = np.empty(n + 1)
    prev_size = np.empty(n + 1, np.int64)
    prev_lo = np.empty(n + 1, np.int64)
    prev_rw = np.empty(n + 1)
    prev_wv = np.empty(n + 1, np.int64)
    cur_size = np.empty(n + 1, np.int64)
    cur_lo = np.empty(n + 1, np.int64)
    cur_rw = np.empty(n + 1)
    cur_wv = np.empty(n + 1, np.int64)
    prev_m = 0
    C = -INF
    cc = -1
    cr = INF
    C0 = -INF
    c0c = -1
    c0r = INF
    nviol = 0
    pos = 0
    for c in range(n):
        m = _center_balls(x, c, diam2, lo_buf, hi_buf, r_buf)
        # raw holes of this center's intervals, reusing the previous center's
        for i in range(m):
            lo = lo_buf[i]
            hi = hi_buf[i]
            cur_size[i] = hi - lo
            cur_lo[i] = lo
            k = _find_size(prev_size, prev_m, hi - lo)
            if k >= 0 and prev_lo[k] == lo:
                cur_rw[i] = prev_rw[k]
                cur_wv[i] = prev_wv[k]
            else:
                rw, wv = line_raw_hole(x, lo, hi, cell, cstart, cend, eLc, eRc, cellmax, cellarg, ctab, lg)
                cur_rw[i] = rw
                cur_wv[i] = wv
        for i in range(m):
            lo = lo_buf[i]
            hi = hi_buf[i]
            r = r_buf[i]
            rw = cur_rw[i]
            wv = cur_wv[i]
            cap = 2.0 * K * r
            rho = rw if rw < cap else cap
            # B(c, 2r) is again one of this center's intervals
            lo2, hi2 = line_interval(x, c, 2.0 * r)
            k = _find_size(cur_size, m, hi2 - lo2)
            if k >= 0 and cur_lo[k] == lo2:
                rw2 = cur_rw[k]
            else:
                rw2, _w2 = line_raw_hole(x, lo2, hi2, cell, cstart, cend, eLc, eRc, cellmax, cellarg, ctab, lg)
            cap2 = 2.0 * K * (2.0 * r)
            rho2 = rw2 if rw2 < cap2 else cap2
            if store:
                out_rho[pos] = rho
                out_wit[pos] = wv if rho > 0.0 else -1
                out_rho2[pos] = rho2
            pos += 1
            if rho > 0.0:
                ratio = rho2 / rho
                if cc < 0 or _better(ratio, c, r, C, cc, cr):
                    C = ratio
                    cc = c
                    cr = r
                if dE[c] < r:
                    q = dE[query_sparse(dE, dtab, lg, lo, hi, True)] / rho
                    if c0c < 0 or _better(q, c, r, C0, c0c, c0r):
                        C0 = q
                        c0c = c
                        c0r = r
            elif rho2 > 0.0:
                if nviol < viol_cap:
                    viol_c[nviol] = c
                    viol_r[nviol] = r
                nviol += 1
        prev_size, cur_size = cur_size, prev_size
        prev_lo, cur_lo = cur_lo, prev_lo
        prev_rw, cur_rw = cur_rw, prev_rw
        prev_wv, cur_wv = cur_wv, prev_wv
        prev_m = m
    return C, cc, cr, nviol, C0, c0c, c0r, pos


@njit(cache=True)
def _next_cell_ge(cellmax, ctab, lg, c, cend_excl, t):
    # first cell in [c, cend_excl) with cellmax >= t, else cend_excl
    while c < cend_excl:
        k = lg[cend_excl - c]
        skipped = False
        while k >= 0:
            if cellmax[ctab[k, c]] < t:
                c += 1 << k
                skipped = True
                break
            k -= 1
        if not skipped:
            return c
    return cend_excl


@njit(cache=True)
def _next_free(x, i, hi, c2, a, b, t, cell, cstart, cend, eLc, eRc, cellmax, ctab, lg):
    # first index j >= i in [.., hi) belonging to the candidate set D, else -1
    if i >= hi:
        return -1
    c = cell[i]
    while c <= c2:
        s = i if i > cstart[c] else cstart[c]
        e = hi if hi < cend[c] else cend[c]
        if s < e:
            L = a if a > eLc[c] else eLc[c]
            R = b if b < eRc[c] else eRc[c]
            j = _first_ge(x, s, e, L, t)
            # R - x is decreasing, so j is in D iff it passes the right-hand test
            if j < e and R - x[j] >= t:
                return j
        c += 1
        if c < c2:
            c = _next_cell_ge(cellmax, ctab, lg, c, c2, t)
    return -1


@njit(cache=True)
def line_pack_ball(x, cmh, cml, lo, hi, t, cell, cstart, cend, eLc, eRc, cellmax, ctab, lg, fam_buf, stop_total=INF):
    """Greedy separated net + first-fit on the interval ball [lo, hi).

    Returns (packed measure, number of kept family balls); kept centers go to fam_buf
    when it is large enough.  The scan ends early once the packed measure reaches
    ``stop_total``.
    """
    n = x.shape[0]
    if t <= 0.0:
        return 0.0, 0
    a = x[lo - 1] if lo > 0 else -INF
    b = x[hi] if hi < n else INF
    c2 = cell[hi - 1]
    total = 0.0
    comp = 0.0
    last_hi = -1
    nk = 0
    two_t = 2.0 * t
    i = _next_free(x, lo, hi, c2, a, b, t, cell, cstart, cend, eLc, eRc, cellmax, ctab, lg)
    while i >= 0:
        # members of B(x_i, t) are [fl, fh)
        p = lo
        q = i
        while p < q:
            mid = (p + q) // 2
            if x[i] - x[mid] < t:
                q = mid
            else:
                p = mid + 1
        fl = p
        fh = _first_ge(x, i + 1, hi, x[i], t)
        if fl >= last_hi:
            total, e = _two_sum(total, dd_range(cmh, cml, fl, fh))
            comp += e
            last_hi = fh
            if nk < fam_buf.shape[0]:
                fam_buf[nk] = i
            nk += 1
            if total + comp >= stop_total:
                break
        j = _first_ge(x, fh, hi, x[i], two_t)
        i = _next_free(x, j, hi, c2, a, b, t, cell, cstart, cend, eLc, eRc, cellmax, ctab, lg)
    return total + comp, nk


@njit(cache=True)
def line_packing(x, cmh, cml, cell, cstart, cend, eLc, eRc, cellmax, cellarg, ctab, lg, K, diam2, gamma, sigma,
                 store, out_sigma, fail_cap, fail_c, fail_r, fail_s):
    n = x.shape[0]
    lo_buf = np.empty(n + 1, np.int64)
    hi_buf = np.empty(n + 1, np.int64)
    r_buf = np.empty(n + 1)
    # results of the previous center, indexed by ball size; neighbouring
    # centers share most of their intervals and the packing depends only on
    # the interval and the family radius
    prev_size = np.empty(n + 1, np.int64)
    prev_lo = np.empty(n + 1, np.int64)
    prev_rw = np.empty(n + 1)
    prev_t = np.empty(n + 1)
    prev_val = np.empty(n + 1)
    cur_size = np.empty(n + 1, np.int64)
    cur_lo = np.empty(n + 1, np.int64)
    cur_rw = np.empty(n + 1)
    cur_t = np.empty(n + 1)
    cur_val = np.empty(n + 1)
    prev_m = 0
    fam = np.empty(0, np.int64)
    best = INF
    bc = -1
    br = INF
    nfail = 0
    pos = 0
    for c in range(n):
        m = _center_balls(x, c, diam2, lo_buf, hi_buf, r_buf)
        for i in range(m):
            lo = lo_buf[i]
            hi = hi_buf[i]
            r = r_buf[i]
            k = _find_size(prev_size, prev_m, hi - lo)
            if k >= 0 and prev_lo[k] != lo:
                k = -1
            if k >= 0:
                rw = prev_rw[k]
            else:
                rw, _wv = line_raw_hole(x, lo, hi, cell, cstart, cend, eLc, eRc, cellmax, cellarg, ctab, lg)
            cap = 2.0 * K * r
            rho = rw if rw < cap else cap
            t = gamma * rho
            muB = dd_range(cmh, cml, lo, hi)
            if k >= 0 and prev_t[k] == t:
                # a cached value cut short by an earlier, never lower, threshold
                # decides this ball the same way as a full scan
                a = prev_val[k]
            else:
                stop = INF
                if not store:
                    # a ball packing past max(sigma, current minimum) cannot change the outcome
                    stop = (sigma if sigma > best else best) * muB
                tot, _nk = line_pack_ball(x, cmh, cml, lo, hi, t, cell, cstart, cend, eLc, eRc,
                                          cellmax, ctab, lg, fam, stop)
                a = tot / muB
            cur_size[i] = hi - lo
            cur_lo[i] = lo
            cur_rw[i] = rw
            cur_t[i] = t
            cur_val[i] = a
            if store:
                out_sigma[pos] = a
            pos += 1
            if bc < 0 or _worse(a, c, r, best, bc, br):
                best = a
                bc = c
                br = r
            if a < sigma:
                if nfail < fail_cap:
                    fail_c[nfail] = c
                    fail_r[nfail] = r
                    fail_s[nfail] = a
                nfail += 1
        prev_size, cur_size = cur_size, prev_size
        prev_lo, cur_lo = cur_lo, prev_lo
        prev_rw, cur_rw = cur_rw, prev_rw
        prev_t, cur_t = cur_t, prev_t
        prev_val, cur_val = cur_val, prev_val
        prev_m = m
    return best, bc, br, nfail, pos


# ------------------------------------------------------- bottleneck products


@njit(cache=True)
def minmax_product(A, B, bound):
    """C[i, j] = min_k max(A[i, k], B[k, j]); exact for every entry <= bound."""
    n = A.shape[0]
    mid = A.shape[1]
    m = B.shape[1]
    # sparse rows of B restricted to entries <= bound
    nnz = np.zeros(mid, np.int64)
    for k in range(mid):
        cnt = 0
        for j in range(m):
            if B[k, j] <= bound:
                cnt += 1
        nnz[k] = cnt
    ptr = np.zeros(mid + 1, np.int64)
    for k in range(mid):
        ptr[k + 1] = ptr[k] + nnz[k]
    cols = np.empty(ptr[mid], np.int64)
    vals = np.empty(ptr[mid])
    for k in range(mid):
        p = ptr[k]
        for j in range(m):
            if B[k, j] <= bound:
                cols[p] = j
                vals[p] = B[k, j]
                p += 1
    C = np.full((n, m), INF)
    for i in range(n):
        for k in range(mid):
            a = A[i, k]
            if a > bound:
                continue
            for p in range(ptr[k], ptr[k + 1]):
                j = cols[p]
                b = vals[p]
                v = a if a > b else b
                if v < C[i, j]:
                    C[i, j] = v
    return C
