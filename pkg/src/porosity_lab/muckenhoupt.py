"""A1 constants of distance weights and the decay constants built from porosity data."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as kern
from .errors import BallMissesE, NoAdmissibleEta, ParamOutOfRange, SampleOnObstacle
from .qspace import AugmentedSpace, ball_members, count_canonical_balls, dyadic_exponent

PER_BALL_LIMIT = 200_000


@dataclass(frozen=True, eq=False)
class WeightVector:
    values: np.ndarray
    alpha: float


@dataclass(frozen=True, eq=False)
class A1Report:
    """``per_ball_ratio`` follows canonical sweep order; None when not stored."""

    constant: float
    worst_ball: tuple[int, float]
    per_ball_ratio: np.ndarray | None
    n_balls: int


@dataclass(frozen=True)
class DecayConstants:
    beta: float
    K_delta: float
    A_delta: float
    C_delta_E: float
    sigma0: float
    gamma0: float
    eta0: float
    theta_eta0: float
    p: float
    q: float
    one_minus_q: float
    alpha_star: float
    k: int
    l: int


def distance_weight(space: AugmentedSpace, alpha: float) -> WeightVector:
    """w(x) = dist(x, E)^(-alpha) on the sample."""
    if not alpha > 0:
        raise ParamOutOfRange(f"alpha must be positive, got {alpha}")
    space.require_obstacles()
    dE = space.dist_to_obstacles
    if np.any(dE <= 0):
        i = int(np.argmax(dE <= 0))
        raise SampleOnObstacle(f"sample point {int(space.sample_ids[i])} lies on the obstacle set")
    with np.errstate(over="ignore"):
        w = dE ** (-float(alpha))
    if not np.all(np.isfinite(w)):
        raise ParamOutOfRange(f"dist(., E)^(-{alpha}) overflows double precision on this sample")
    return WeightVector(w, float(alpha))


def a1_constant(space: AugmentedSpace, weight, *, per_ball: bool | None = None) -> A1Report:
    """max over canonical balls of (weighted mean of w) / (min of w)."""
    w = np.ascontiguousarray(weight.values if isinstance(weight, WeightVector) else weight, dtype=np.float64)
    if w.shape != (space.n_sample,) or not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise ParamOutOfRange("weight must be positive and finite at every sample point")
    if per_ball is None:
        per_ball = count_canonical_balls(space) <= PER_BALL_LIMIT
    total = count_canonical_balls(space) if per_ball else 0
    out = np.empty(total)
    if space.line is not None:
        ln = space.line
        wtab = kern.build_sparse(w, False)
        best, bc, br = kern.line_a1(ln.x, space.measure, w, wtab, ln.lg, space.full_radius, per_ball, out)
        nballs = total if per_ball else count_canonical_balls(space)
    else:
        best, bc, br = kern.generic_a1(
            space.sample_table, space.measure, w, space.sample_ids, space.full_radius, per_ball, out
        )
        nballs = total if per_ball else count_canonical_balls(space)
    return A1Report(float(best), (int(space.sample_ids[bc]), float(br)), out if per_ball else None, int(nballs))


def neighborhood_measure(space: AugmentedSpace, ball, epsilon: float) -> float:
    """mu{x in ball : dist(x, E) < epsilon}; ``ball`` is (center id, radius)."""
    if not epsilon > 0:
        raise ParamOutOfRange(f"epsilon must be positive, got {epsilon}")
    space.require_obstacles()
    members = ball_members(space, space.sample_index(ball[0]), ball[1])
    near = space.dist_to_obstacles[members] < epsilon
    return float(space.measure[members][near].sum())


def mesh_floor(space: AugmentedSpace, ball) -> float:
    """Smallest positive dist(., E) over the ball's members."""
    members = ball_members(space, space.sample_index(ball[0]), ball[1])
    dE = space.dist_to_obstacles[members]
    dE = dE[dE > 0]
    return float(dE.min()) if dE.size else 0.0


def decay_profile(space: AugmentedSpace, ball, p: float, k_max: int) -> list[tuple[float, float]]:
    """[(eps_k, mu{x in ball : dist(x,E) < eps_k})] with eps_k = p^k rho(ball) / 2."""
    from .holes import hole_radius

    if not 0 < p < 1:
        raise ParamOutOfRange(f"p must lie in (0, 1), got {p}")
    center, radius = ball
    ci = space.sample_index(center)
    space.require_obstacles()
    if not space.dist_to_obstacles[ci] < radius:
        raise BallMissesE(f"no obstacle within radius {radius} of center {center}")
    rho, _ = hole_radius(space, center, radius)
    members = ball_members(space, ci, radius)
    dE = space.dist_to_obstacles[members]
    mu = space.measure[members]
    out = []
    eps = rho / 2.0
    for _ in range(k_max + 1):
        out.append((eps, float(mu[dE < eps].sum())))
        eps *= p
    return out


def theta(eta: float, K: float, beta: float, C: float) -> float:
    """Theta(eta) = (2K/eta + 26 K^4/beta)^(-log2 C)."""
    return (2.0 * K / eta + 26.0 * K**4 / beta) ** (-math.log2(C))


def _eta0(K, beta, C, gamma0):
    top = beta / (12.0 * K**3)
    den = K + 13.0 * K**4 / beta

    def rhs(eta):
        return (1.0 / K - gamma0 / (2.0 * K) * theta(eta, K, beta, C)) / den

    tiny = top * 1e-300
    if rhs(tiny) <= 0:
        raise NoAdmissibleEta("the defining inequality fails for every eta > 0")
    if top <= rhs(top):
        return top
    lo, hi = tiny, top
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            return lo
        if mid <= rhs(mid):
            lo = mid
        else:
            hi = mid


def alpha_star(p: float, q: float) -> float:
    """ln(1/q) / ln(1/p): every alpha below it gives p^(-alpha) q < 1."""
    if not (0 < p < 1 and 0 < q < 1):
        raise ParamOutOfRange(f"need 0 < p, q < 1, got p={p}, q={q}")
    return math.log(q) / math.log(p)


def theoretical_constants(sigma0, gamma0, K_delta, A_delta, C_delta_E, beta) -> DecayConstants:
    """eta0, Theta(eta0), p, q and alpha* from porosity and doubling data."""
    if not (0 < sigma0 < 1 and 0 < gamma0 < 1):
        raise ParamOutOfRange("sigma0 and gamma0 must lie in (0, 1)")
    if not (K_delta >= 1 and A_delta >= 1 and C_delta_E > 1 and 0 < beta < 1):
        raise ParamOutOfRange("need K >= 1, A >= 1, C > 1 and 0 < beta < 1")
    eta0 = _eta0(K_delta, beta, C_delta_E, gamma0)
    th = theta(eta0, K_delta, beta, C_delta_E)
    p = gamma0 / (2.0 * K_delta) * th
    k = dyadic_exponent(2.0 * K_delta)
    l = dyadic_exponent(5.0 * K_delta**2 / beta)
    one_minus_q = sigma0 * A_delta ** (-(k + l))
    q = 1.0 - one_minus_q
    # log1p keeps alpha* accurate when q rounds towards 1
    a_star = -math.log1p(-one_minus_q) / -math.log(p) if p > 0 else 0.0
    return DecayConstants(
        beta=beta, K_delta=K_delta, A_delta=A_delta, C_delta_E=C_delta_E, sigma0=sigma0, gamma0=gamma0,
        eta0=eta0, theta_eta0=th, p=p, q=q, one_minus_q=one_minus_q, alpha_star=a_star, k=k, l=l,
    )


def a1_transfer_bound(a1: float, A_d: float, c1: float, c2: float, alpha: float) -> float:
    """A_d^m (c2/c1)^alpha [w]_A1 with 2^(m-1) < c2/c1 <= 2^m."""
    m = dyadic_exponent(c2 / c1)
    return A_d**m * (c2 / c1) ** alpha * a1


def far_ball_bound(K: float, alpha: float) -> float:
    """(2K)^alpha: per-ball ratio ceiling for balls at distance >= 4K^2 r from E."""
    return (2.0 * K) ** alpha


def resolution_sweep(spec, alphas, depths, *, gamma: float | None = None) -> list[dict]:
    """Rebuild the space at each depth and tabulate a1, hole doubling and packing.

    ``spec`` is a GeneratorSpec; its depth is overridden per row, and a grid
    gets 2**depth points per side.  Each row after the first also carries
    ratios against the previous depth.
    """
    from dataclasses import replace

    from .generators import build_space
    from .holes import hole_sweep
    from .porosity import _packing_sweep

    depths = list(depths)
    if any(b <= a for a, b in zip(depths, depths[1:])):
        raise ParamOutOfRange("depths must be increasing")
    rows = []
    for depth in depths:
        step = replace(spec, depth=depth)
        if spec.kind == "grid":
            step = replace(step, n_per_side=2**depth)
        space = build_space(step)
        hs = hole_sweep(space)
        row = {
            "depth": depth,
            "n_sample": space.n_sample,
            "n_balls": hs.n_balls,
            "hole_C": hs.C,
            "hole_violations": hs.n_violations,
        }
        for a in alphas:
            row[f"a1[{a!r}]"] = a1_constant(space, distance_weight(space, a), per_ball=False).constant
        if gamma is not None:
            row["best_sigma"] = _packing_sweep(space, gamma, 0.0, store=False)[0]
        if rows:
            prev = rows[-1]
            for key in [k for k in row if k.startswith("a1[")] + ["hole_C"]:
                if row[key] is not None and prev.get(key):
                    row[f"ratio {key}"] = row[key] / prev[key]
        rows.append(row)
    return rows
