"""The maximal obstacle-free hole function and its doubling behaviour.

For a ball B of radius r the hole value is

    rho(B) = min(2K r, max_{y in B, dist(y,E) > 0} min(dist(y,E), dist(y, X \\ B)))

where X is the sample and dist(y, X \\ B) = +inf when B is everything.  Hole
centers range over sample points only ("sample-restricted").
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as kern
from .errors import NoPositiveDenominators, NoQualifyingBalls, NonPositiveRadius
from .qspace import AugmentedSpace, ball_members, count_canonical_balls, dyadic_exponent

VIOLATION_CAP = 10_000


@dataclass(frozen=True)
class HoleProfile:
    """Per canonical ball, in sweep order.  ``witness`` is -1 when rho == 0."""

    center: np.ndarray
    radius: np.ndarray
    rho: np.ndarray
    witness: np.ndarray
    lambda_cap: np.ndarray
    rho_doubled: np.ndarray

    def __len__(self):
        return int(self.center.size)

    def rows(self) -> list[dict]:
        return [
            {
                "center": int(c),
                "radius": float(r),
                "rho": float(h),
                "witness": None if w < 0 else int(w),
            }
            for c, r, h, w in zip(self.center, self.radius, self.rho, self.witness)
        ]


@dataclass(frozen=True)
class HoleDoublingReport:
    C: float
    worst_pair: tuple[int, float]
    violations: list[tuple[int, float]]
    n_violations: int
    n_balls: int


@dataclass(frozen=True)
class HoleSweep:
    """Everything one pass over the canonical balls yields."""

    C: float | None
    worst_pair: tuple[int, float] | None
    violations: list[tuple[int, float]]
    n_violations: int
    C0: float | None
    c0_pair: tuple[int, float] | None
    n_balls: int
    profile: HoleProfile | None


def hole_radius(space: AugmentedSpace, center: int, radius: float) -> tuple[float, int | None]:
    """(rho, witness id) of B(center, radius); ``center`` is a sample id."""
    space.require_obstacles()
    if not radius > 0:
        raise NonPositiveRadius(f"radius must be positive, got {radius}")
    ci = space.sample_index(center)
    cap = 2.0 * space.K * radius
    if space.line is not None:
        ln = space.line
        lo, hi = kern.line_interval(ln.x, ci, float(radius))
        raw, w = kern.line_raw_hole(
            ln.x, lo, hi, ln.cell, ln.cstart, ln.cend, ln.eLc, ln.eRc, ln.cellmax, ln.cellarg, ln.ctab, ln.lg
        )
    else:
        members = ball_members(space, ci, radius)
        outside = np.setdiff1d(np.arange(space.n_sample), members)
        dE = space.dist_to_obstacles[members]
        if outside.size:
            gap = space._pair_block(members, outside).min(axis=1)
        else:
            gap = np.full(members.size, np.inf)
        vals = np.where(dE > 0, np.minimum(dE, gap), 0.0)
        raw = float(vals.max()) if vals.size else 0.0
        w = -1
        if raw > 0:
            hits = members[vals == raw]
            w = int(hits[np.argmin(space.sample_ids[hits])])
    rho = min(cap, raw)
    if rho <= 0:
        return 0.0, None
    return float(rho), int(space.sample_ids[w])


def hole_sweep(space: AugmentedSpace, *, store: bool = False) -> HoleSweep:
    """Hole values, their doubling ratios and the hole-vs-distance ratio on all canonical balls."""
    space.require_obstacles()
    K = float(space.K)
    total = count_canonical_balls(space) if store else 0
    out_rho = np.empty(total)
    out_wit = np.empty(total, np.int64)
    out_rho2 = np.empty(total)
    viol_c = np.empty(VIOLATION_CAP, np.int64)
    viol_r = np.empty(VIOLATION_CAP)
    if space.line is not None:
        ln = space.line
        res = kern.line_holes(
            ln.x, ln.dE, ln.cell, ln.cstart, ln.cend, ln.eLc, ln.eRc, ln.cellmax, ln.cellarg,
            ln.ctab, ln.dtab, ln.lg, K, space.full_radius,
            store, out_rho, out_wit, out_rho2, VIOLATION_CAP, viol_c, viol_r,
        )
    else:
        res = kern.generic_holes(
            space.sample_table, space.dist_to_obstacles, space.sample_ids, K, space.full_radius,
            store, out_rho, out_wit, out_rho2, VIOLATION_CAP, viol_c, viol_r,
        )
    C, cc, cr, nviol, C0, c0c, c0r, nballs = res
    ids = space.sample_ids
    profile = None
    if store:
        from .qspace import canonical_ball_arrays

        c, r, _ = canonical_ball_arrays(space)
        wit = np.where(out_wit >= 0, ids[np.maximum(out_wit, 0)], -1)
        profile = HoleProfile(
            center=ids[c], radius=r, rho=out_rho, witness=wit, lambda_cap=2.0 * K * r, rho_doubled=out_rho2
        )
    kept = min(nviol, VIOLATION_CAP)
    return HoleSweep(
        C=float(C) if cc >= 0 else None,
        worst_pair=(int(ids[cc]), float(cr)) if cc >= 0 else None,
        violations=[(int(ids[viol_c[i]]), float(viol_r[i])) for i in range(kept)],
        n_violations=int(nviol),
        C0=float(C0) if c0c >= 0 else None,
        c0_pair=(int(ids[c0c]), float(c0r)) if c0c >= 0 else None,
        n_balls=int(nballs),
        profile=profile,
    )


def hole_profile(space: AugmentedSpace) -> HoleProfile:
    return hole_sweep(space, store=True).profile


def _doubling_report(sweep: HoleSweep) -> HoleDoublingReport:
    if sweep.C is None:
        raise NoPositiveDenominators("every canonical ball has rho = 0")
    return HoleDoublingReport(
        C=sweep.C,
        worst_pair=sweep.worst_pair,
        violations=sweep.violations,
        n_violations=sweep.n_violations,
        n_balls=sweep.n_balls,
    )


def hole_doubling_constant(space: AugmentedSpace) -> HoleDoublingReport:
    """C = max rho(B(x,2r)) / rho(B(x,r)) over canonical balls with rho > 0.

    Balls with rho(B) = 0 < rho(2B) are listed as violations instead.
    """
    return _doubling_report(hole_sweep(space))


def _lemma33(sweep: HoleSweep) -> float:
    if sweep.C0 is None:
        raise NoQualifyingBalls("no canonical ball reaches the obstacle set with rho > 0")
    return sweep.C0


def lemma33_constant(space: AugmentedSpace) -> float:
    """max dist(y,E) / rho(B) over balls reaching E with rho(B) > 0 and free y in B."""
    return _lemma33(hole_sweep(space))


def lemma33_ceiling(C: float, K: float) -> float:
    """C^m with 2^(m-1) < K(2K+1) <= 2^m: the ceiling for the hole-vs-distance ratio."""
    return C ** dyadic_exponent(K * (2.0 * K + 1.0))


def doubling_transfer_exponent(c1: float, c2: float) -> int:
    """m >= 1 with 2^(m-2) < c2/c1 <= 2^(m-1)."""
    return dyadic_exponent(c2 / c1) + 1


def doubling_transfer_bound(C: float, c1: float, c2: float) -> float:
    """Bound on the hole doubling constant after an equivalent change of distance."""
    return (c2 / c1) * C ** doubling_transfer_exponent(c1, c2)
