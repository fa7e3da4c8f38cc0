"""Brute-force reference implementations used only by the tests.

Everything here works from the raw distance table with plain loops and
never calls the package's kernels.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np


def members(D, n, c, r):
    return [y for y in range(n) if D[c][y] < r]


def triangular_constant(D):
    N = len(D)
    K = 1.0
    for x, y, z in itertools.permutations(range(N), 3):
        den = D[x][y] + D[y][z]
        if den > 0:
            K = max(K, D[x][z] / den)
    return K


def canonical_balls(D, n):
    """{center: [(radius, frozenset(members))]} by sorting distances."""
    S = [[D[i][j] for j in range(n)] for i in range(n)]
    diam = max(max(row) for row in S)
    full = 2 * diam if diam > 0 else 1.0
    out = {}
    for c in range(n):
        ds = sorted(set(S[c]))
        balls = []
        for k, d in enumerate(ds[1:], start=1):
            balls.append((d, frozenset(members(S, n, c, d))))
        balls.append((full, frozenset(range(n))))
        out[c] = balls
    return out


def doubling_constant(D, n, mu):
    A = 1.0
    for c, balls in canonical_balls(D, n).items():
        for r, ms in balls:
            big = members(D, n, c, 2 * r)
            A = max(A, sum(mu[y] for y in big) / sum(mu[y] for y in ms))
    return A


def hole_lambda_sup(D, n, c, r, K):
    """sup of the admissible hole radii s, tested candidate by candidate.

    s is admissible when some sample y in B(c, r) has B(y, s) inside B(c, r)
    (sample points only), B(y, s) free of obstacles, and s <= 2K r.  The
    candidate s values are every pairwise distance and the cap 2K r.
    """
    N = len(D)
    inside = set(members(D, n, c, r))
    cap = 2 * K * r
    cands = sorted({D[i][j] for i in range(N) for j in range(N) if D[i][j] > 0} | {cap})
    best = 0.0
    for y in inside:
        for s in cands:
            if s > cap or s <= best:
                continue
            ok = all(D[y][e] >= s for e in range(n, N))
            ok = ok and all(z in inside for z in range(n) if D[y][z] < s)
            if ok:
                best = s
    return best


def a1_ratios(D, n, mu, w):
    """Exact per-ball A1 ratios as Fractions, canonical sweep order."""
    out = []
    for c, balls in canonical_balls(D, n).items():
        for r, ms in balls:
            mass = sum(Fraction(mu[y]) for y in ms)
            mean = sum(Fraction(w[y]) * Fraction(mu[y]) for y in ms) / mass
            out.append(mean / min(Fraction(w[y]) for y in ms))
    return out


def linked(D, a, n_max, r, i, j):
    """Chain reachability with the strict step bounds a^n r .. r .. a^n r."""
    N = len(D)
    for depth in range(n_max + 1):
        reach = {i}
        for p in list(range(depth, 0, -1)) + [0] + list(range(1, depth + 1)):
            bound = r * a**p
            reach = {w for v in reach for w in range(N) if D[v][w] < bound}
        if j in reach:
            return True
    return False


def ms_distance(D, a, n_max):
    """delta by candidate search: the smallest r in {d(u,v)/a^j} with every
    radius just above it linked.  Linkage is monotone in r, so bisection over
    the sorted candidates finds it."""
    N = len(D)
    cands = sorted({D[u][v] / a**k for u in range(N) for v in range(N) if D[u][v] > 0 for k in range(n_max + 1)})
    out = np.zeros((N, N))
    for i in range(N):
        for j in range(i + 1, N):
            lo, hi = 0, len(cands) - 1
            while lo < hi:
                mid = (lo + hi) // 2
                if linked(D, a, n_max, cands[mid] * (1 + 1e-12), i, j):
                    hi = mid
                else:
                    lo = mid + 1
            out[i, j] = out[j, i] = cands[lo]
    return out


def greedy_packing(D, n, mu, c, r, t):
    """Greedy 2t-separated net in index order plus first-fit; packed fraction."""
    N = len(D)
    inside = members(D, n, c, r)
    inset = set(inside)
    if t <= 0:
        return 0.0, []
    cand = []
    for y in inside:
        far_e = all(D[y][e] >= t for e in range(n, N))
        far_out = all(D[y][z] >= t for z in range(n) if z not in inset)
        if far_e and far_out:
            cand.append(y)
    net = []
    for y in cand:
        if all(D[y][s] >= 2 * t for s in net):
            net.append(y)
    covered = set()
    fam = []
    for s in net:
        ball = set(members(D, n, s, t))
        if not ball & covered:
            covered |= ball
            fam.append(s)
    return sum(mu[y] for y in covered) / sum(mu[y] for y in inside), fam


def table_of(space):
    """Distance table as nested lists, sample first then obstacles."""
    return space.dist.tolist()
