"""Weak-porosity certificates built from greedy separated nets.

For a ball B with hole value rho and a ratio gamma, let t = gamma * rho and

    D = {y in B : dist(y, E) >= t and dist(y, X \\ B) >= t}.

A maximal 2t-separated subset of D is picked greedily in increasing id order,
each selected point gets the ball of radius t, and a pairwise disjoint
subfamily is kept by first-fit.  The packed fraction is the measure of the
kept balls over mu(B).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as kern
from .errors import BallTooLarge, GammaOutOfRange, ParamOutOfRange
from .holes import hole_radius
from .qspace import AugmentedSpace, CanonicalBall, ball_members, canonical_ball_arrays, dyadic_exponent

FAILURE_CAP = 10_000
MATERIALIZE_LIMIT = 20_000
ORACLE_LIMIT = 18


@dataclass(frozen=True)
class PackingOutcome:
    family: list[tuple[int, float]]
    achieved_sigma: float
    method: str
    rho: float = 0.0


@dataclass(frozen=True)
class BallPacking:
    center: int
    radius: float
    family: list[tuple[int, float]]
    packed_fraction: float


@dataclass(frozen=True)
class PorosityCertificate:
    sigma: float
    gamma: float
    min_packed_fraction: float
    worst_ball: tuple[int, float]
    n_balls: int
    per_ball: list[BallPacking] | None = None
    certified: bool = True


@dataclass(frozen=True)
class BallFailure:
    center: int
    radius: float
    packed_fraction: float
    oracle_fraction: float | None = None

    @property
    def disproved(self) -> bool:
        return self.oracle_fraction is not None


@dataclass(frozen=True)
class FailureList:
    sigma: float
    gamma: float
    failures: list[BallFailure]
    n_failures: int
    min_packed_fraction: float
    worst_ball: tuple[int, float]
    n_balls: int
    certified: bool = False

    @property
    def disproved(self) -> bool:
        return any(f.disproved for f in self.failures)


@dataclass
class CheckResult:
    ok: bool = True
    problems: list[str] = field(default_factory=list)

    def fail(self, msg):
        self.ok = False
        self.problems.append(msg)


def _ball_args(ball, radius=None):
    if isinstance(ball, CanonicalBall):
        return ball.center, ball.radius
    if radius is not None:
        return ball, radius
    return ball[0], ball[1]


def _check_gamma(gamma):
    if not 0 < gamma < 1:
        raise GammaOutOfRange(f"gamma must lie in (0, 1), got {gamma}")


def _gaps(space: AugmentedSpace, members: np.ndarray) -> np.ndarray:
    outside = np.setdiff1d(np.arange(space.n_sample), members)
    if outside.size == 0:
        return np.full(members.size, np.inf)
    return space._pair_block(members, outside).min(axis=1)


def free_ball_packing(space: AugmentedSpace, ball, gamma: float, radius: float | None = None) -> PackingOutcome:
    """Greedy packing of one ball, given as a CanonicalBall or (center id, radius)."""
    _check_gamma(gamma)
    center, r = _ball_args(ball, radius)
    rho, _ = hole_radius(space, center, r)
    t = gamma * rho
    if t <= 0:
        return PackingOutcome([], 0.0, "greedy", rho)
    ci = space.sample_index(center)
    ids = space.sample_ids
    if space.line is not None:
        ln = space.line
        lo, hi = kern.line_interval(ln.x, ci, float(r))
        buf = np.empty(hi - lo, np.int64)
        total, nk = kern.line_pack_ball(
            ln.x, ln.cmu, ln.cml, lo, hi, t, ln.cell, ln.cstart, ln.cend, ln.eLc, ln.eRc, ln.cellmax, ln.ctab,
            ln.lg, buf,
        )
        fam = [(int(ids[i]), float(t)) for i in buf[:nk]]
        return PackingOutcome(fam, float(total / kern.dd_range(ln.cmu, ln.cml, lo, hi)), "greedy", rho)
    members = ball_members(space, ci, r)
    dE = space.dist_to_obstacles[members]
    gap = _gaps(space, members)
    cand = members[(dE >= t) & (gap >= t)]
    cand = cand[np.argsort(ids[cand], kind="stable")]
    selected: list[int] = []
    for y in cand:
        if not selected or np.all(space._pair_block([y], selected)[0] >= 2 * t):
            selected.append(int(y))
    covered = np.zeros(space.n_sample, dtype=bool)
    fam = []
    for s in selected:
        inner = ball_members(space, s, t)
        if not covered[inner].any():
            covered[inner] = True
            fam.append((int(ids[s]), float(t)))
    return PackingOutcome(fam, _fraction(space.measure, covered, members), "greedy", rho)


def _fraction(mu, covered, members) -> float:
    # correctly rounded sums, so equal families give equal fractions on every path
    return math.fsum(mu[covered]) / math.fsum(mu[members])


def _candidates(space, center, r, gamma):
    rho, _ = hole_radius(space, center, r)
    t = gamma * rho
    ci = space.sample_index(center)
    members = ball_members(space, ci, r)
    if t <= 0:
        return rho, t, members, [], []
    dE = space.dist_to_obstacles[members]
    gap = _gaps(space, members)
    cand = members[(dE >= t) & (gap >= t)]
    cand = cand[np.argsort(space.sample_ids[cand], kind="stable")]
    sets = [ball_members(space, int(c), t) for c in cand]
    return rho, t, members, [int(c) for c in cand], sets


def exact_packing_oracle(space: AugmentedSpace, ball, gamma: float, radius: float | None = None) -> PackingOutcome:
    """Best single-radius packing by exhaustive search (balls with <= 18 members)."""
    _check_gamma(gamma)
    center, r = _ball_args(ball, radius)
    ci = space.sample_index(center)
    size = ball_members(space, ci, r).size
    if size > ORACLE_LIMIT:
        raise BallTooLarge(f"ball has {size} members; the exhaustive search allows {ORACLE_LIMIT}")
    rho, t, members, cand, sets = _candidates(space, center, r, gamma)
    if not cand:
        return PackingOutcome([], 0.0, "exhaustive", rho)
    pos = {int(m): i for i, m in enumerate(members)}
    masks = [sum(1 << pos[int(z)] for z in s) for s in sets]
    weights = [float(space.measure[s].sum()) for s in sets]
    # suffix bound: total weight still available after index i
    suffix = np.concatenate([np.cumsum(weights[::-1])[::-1], [0.0]])
    best = [0.0, ()]

    def search(i, used, acc, chosen):
        if acc > best[0]:
            best[0] = acc
            best[1] = chosen
        if i == len(cand) or acc + suffix[i] <= best[0]:
            return
        if not masks[i] & used:
            search(i + 1, used | masks[i], acc + weights[i], chosen + (i,))
        search(i + 1, used, acc, chosen)

    search(0, 0, 0.0, ())
    fam = [(int(space.sample_ids[cand[i]]), float(t)) for i in best[1]]
    covered = np.zeros(space.n_sample, dtype=bool)
    for i in best[1]:
        covered[sets[i]] = True
    return PackingOutcome(fam, _fraction(space.measure, covered, members), "exhaustive", rho)


def free_fraction(space: AugmentedSpace, ball, gamma: float, radius: float | None = None) -> float:
    """Measure of the union of all admissible family balls over mu(B).

    Any disjoint admissible family packs at most this fraction.
    """
    center, r = _ball_args(ball, radius)
    rho, t, members, cand, sets = _candidates(space, center, r, gamma)
    if not cand:
        return 0.0
    covered = np.zeros(space.n_sample, dtype=bool)
    covered[np.concatenate(sets)] = True
    return _fraction(space.measure, covered, members)


def packed_fractions(space: AugmentedSpace, gamma: float):
    """Greedy packed fraction of every canonical ball, in sweep order."""
    return _packing_sweep(space, gamma, 0.0, store=True)[-1]


def _packing_sweep(space, gamma, sigma, store):
    space.require_obstacles()
    _check_gamma(gamma)
    K = float(space.K)
    from .qspace import count_canonical_balls

    total = count_canonical_balls(space) if store else 0
    out = np.empty(total)
    fc = np.empty(FAILURE_CAP, np.int64)
    fr = np.empty(FAILURE_CAP)
    fs = np.empty(FAILURE_CAP)
    if space.line is not None:
        ln = space.line
        res = kern.line_packing(
            ln.x, ln.cmu, ln.cml, ln.cell, ln.cstart, ln.cend, ln.eLc, ln.eRc, ln.cellmax, ln.cellarg, ln.ctab, ln.lg,
            K, space.full_radius, float(gamma), float(sigma), store, out, FAILURE_CAP, fc, fr, fs,
        )
    else:
        res = kern.generic_packing(
            space.sample_table, space.dist_to_obstacles, space.sample_ids, space.measure, K, space.full_radius,
            float(gamma), float(sigma), store, out, FAILURE_CAP, fc, fr, fs,
        )
    best, bc, br, nfail, nballs = res
    fails = [(int(fc[i]), float(fr[i]), float(fs[i])) for i in range(min(nfail, FAILURE_CAP))]
    return float(best), int(bc), float(br), int(nfail), int(nballs), fails, out


def certify_porosity(
    space: AugmentedSpace,
    sigma: float,
    gamma: float,
    *,
    materialize: bool | None = None,
    oracle_limit: int = ORACLE_LIMIT,
) -> PorosityCertificate | FailureList:
    """Greedy packing on every canonical ball; certified when every fraction >= sigma.

    Failing balls small enough for the exhaustive search are re-tried there;
    an oracle failure disproves the (sigma, gamma) pair on that ball.
    """
    if not 0 < sigma < 1:
        raise ParamOutOfRange(f"sigma must lie in (0, 1), got {sigma}")
    best, bc, br, nfail, nballs, fails, _ = _packing_sweep(space, gamma, sigma, store=False)
    ids = space.sample_ids
    worst = (int(ids[bc]), br)
    if nfail:
        out = []
        for c, r, s in fails:
            oracle = None
            if ball_members(space, c, r).size <= oracle_limit:
                o = exact_packing_oracle(space, int(ids[c]), gamma, radius=r)
                if o.achieved_sigma < sigma:
                    oracle = o.achieved_sigma
            out.append(BallFailure(int(ids[c]), r, s, oracle))
        return FailureList(sigma, gamma, out, nfail, best, worst, nballs)
    if materialize is None:
        materialize = nballs <= MATERIALIZE_LIMIT
    per_ball = None
    if materialize:
        per_ball = []
        c_arr, r_arr, _ = canonical_ball_arrays(space)
        for c, r in zip(c_arr.tolist(), r_arr.tolist()):
            o = free_ball_packing(space, int(ids[c]), gamma, radius=r)
            per_ball.append(BallPacking(int(ids[c]), r, o.family, o.achieved_sigma))
    return PorosityCertificate(sigma, gamma, best, worst, nballs, per_ball)


def check_certificate(space: AugmentedSpace, cert: PorosityCertificate) -> CheckResult:
    """Re-verify conditions (i)-(iv) from raw distances and weights.

    Uses only the distance table (or coordinates), the measure and the hole
    value of each ball; it never calls the packing code.
    """
    res = CheckResult()
    if cert.per_ball is None:
        res.fail("certificate carries no per-ball families")
        return res
    K = space.K
    n = space.n_sample
    D = space.dist
    mu = space.measure
    expected = {(int(space.sample_ids[c]), float(r)) for c, r in zip(*canonical_ball_arrays(space)[:2])}
    seen = set()
    for bp in cert.per_ball:
        tag = f"ball ({bp.center}, {bp.radius!r})"
        seen.add((bp.center, bp.radius))
        ci = space.index_of(bp.center)
        inB = D[ci, :n] < bp.radius
        rho, _ = hole_radius(space, bp.center, bp.radius)
        covered = np.zeros(n, dtype=bool)
        total = 0.0
        for fc, fr in bp.family:
            fi = space.index_of(fc)
            inF = D[fi, :n] < fr
            if np.any(inF & ~inB):
                res.fail(f"{tag}: family ball ({fc}, {fr!r}) leaves the ball")
            if space.n_obstacle and np.any(D[fi, n:] < fr):
                res.fail(f"{tag}: family ball ({fc}, {fr!r}) meets the obstacle set")
            if np.any(inF & covered):
                res.fail(f"{tag}: family balls overlap at ({fc}, {fr!r})")
            if fr < cert.gamma * rho:
                res.fail(f"{tag}: family radius {fr!r} below gamma*rho = {cert.gamma * rho!r}")
            if fr > 2.0 * K * bp.radius:
                res.fail(f"{tag}: family radius {fr!r} above 2K r")
            covered |= inF
            total += float(mu[inF].sum())
        frac = total / float(mu[inB].sum())
        if frac < cert.sigma:
            res.fail(f"{tag}: packed fraction {frac!r} below sigma {cert.sigma!r}")
    missing = expected - seen
    if missing:
        res.fail(f"{len(missing)} canonical balls have no family")
    return res


def porosity_from_a1(a1_constant: float, alpha: float, K: float, A: float, gamma: float) -> float:
    """Packing fraction guaranteed by an A1 bound on dist(., E)^(-alpha).

    C(alpha) = 4^alpha K^alpha a1; k with 2^(k-1) < 2K <= 2^k; m with
    2^(m-1) < K(3K+1) <= 2^m; result A^-m (A^-k - C(alpha) gamma^alpha), floored at 0.
    """
    if not (a1_constant > 0 and alpha > 0 and K > 0 and A > 0):
        raise ParamOutOfRange("all inputs must be positive")
    if not 0 < gamma < 1.0 / (4.0 * K * K):
        raise GammaOutOfRange(f"gamma must lie in (0, 1/(4K^2)) = (0, {1 / (4 * K * K)!r}), got {gamma}")
    c_alpha = 4.0**alpha * K**alpha * a1_constant
    k = dyadic_exponent(2.0 * K)
    m = dyadic_exponent(K * (3.0 * K + 1.0))
    return max(0.0, A ** (-m) * (A ** (-k) - c_alpha * gamma**alpha))


def transfer_parameters(sigma, gamma, A_d, A_tilde, C_hole, c1, c2) -> tuple[float, float]:
    """(sigma0, gamma0) certified under an equivalent distance with constants (c1, c2)."""
    m = dyadic_exponent(c2 / c1)
    return sigma / (A_tilde * A_d) ** m, c1 * gamma / (c2 * C_hole**m)
