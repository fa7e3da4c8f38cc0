"""Whitney-type ball covers of a proper subset of the sample.

Each x in Omega gets the radius r_x = dist(x, X \\ Omega) / (8 K^2).  Balls are
kept greedily in decreasing radius (ties to the smaller id) whenever they are
disjoint from every ball kept so far.  The dilates B(x_i, 4K r_i) then tile
Omega with radii comparable to the distance to the complement.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyOmega, OmegaIsEverything, ValidationError
from .qspace import AugmentedSpace, triangular_constant


@dataclass(frozen=True)
class WhitneyCover:
    family: list[tuple[int, float]]
    K: float
    witnesses: list[int]


@dataclass
class CoverVerdict:
    disjoint: bool = True
    covers_omega: bool = True
    distance_bounds: bool = True
    witnesses_ok: bool = True
    counterexamples: dict[str, list] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.disjoint and self.covers_omega and self.distance_bounds and self.witnesses_ok

    def _flag(self, name, attr, example):
        setattr(self, attr, False)
        self.counterexamples.setdefault(name, []).append(example)

    def as_dict(self) -> dict:
        return {
            "a_disjoint": self.disjoint,
            "b_covers_omega": self.covers_omega,
            "c_distance_bounds": self.distance_bounds,
            "d_witnesses": self.witnesses_ok,
            "counterexamples": self.counterexamples,
        }


def _sample_table(space: AugmentedSpace, dist_table):
    n = space.n_sample
    if dist_table is None:
        return space.sample_table
    t = np.asarray(dist_table, dtype=np.float64)
    if t.shape[0] < n or t.shape[0] != t.shape[1]:
        raise ValidationError("distance table does not cover the sample")
    return t[:n, :n]


def _omega_mask(space: AugmentedSpace, omega) -> np.ndarray:
    mask = np.zeros(space.n_sample, dtype=bool)
    for pid in omega:
        mask[space.sample_index(pid)] = True
    if not mask.any():
        raise EmptyOmega("omega is empty")
    if mask.all():
        raise OmegaIsEverything("omega must leave some sample point outside")
    return mask


def _table_K(D):
    return triangular_constant(D) if D.shape[0] >= 2 else 1.0


def whitney_cover(space: AugmentedSpace, omega, dist_table=None, K: float | None = None) -> WhitneyCover:
    """Greedy disjoint family of balls of radius dist(x, complement) / (8K^2)."""
    D = _sample_table(space, dist_table)
    inside = _omega_mask(space, omega)
    if K is None:
        K = space.K if dist_table is None else _table_K(D)
    ids = space.sample_ids
    out_idx = np.nonzero(~inside)[0]
    in_idx = np.nonzero(inside)[0]
    to_out = D[np.ix_(in_idx, out_idx)]
    gap = to_out.min(axis=1)
    radius = gap / (8.0 * K * K)
    order = np.lexsort((ids[in_idx], -radius))
    taken = np.zeros(space.n_sample, dtype=bool)
    family, witnesses = [], []
    for j in order:
        x = in_idx[j]
        ball = D[x] < radius[j]
        if taken[ball].any():
            continue
        taken |= ball
        family.append((int(ids[x]), float(radius[j])))
        near = out_idx[to_out[j] == gap[j]]
        witnesses.append(int(ids[near[np.argmin(ids[near])]]))
    return WhitneyCover(family, float(K), witnesses)


def verify_cover(space: AugmentedSpace, omega, cover: WhitneyCover, K: float | None = None, dist_table=None) -> CoverVerdict:
    """Check properties (a)-(d) of a Whitney cover from raw distances.

    (a) the balls B(x_i, r_i) are pairwise disjoint;
    (b) the dilates B(x_i, 4K r_i) cover exactly Omega;
    (c) 4K r_i <= dist(x, X \\ Omega) <= 12 K^3 r_i on every dilate;
    (d) y_i lies outside Omega with dist(x_i, y_i) < 12 K^2 r_i.
    """
    D = _sample_table(space, dist_table)
    inside = _omega_mask(space, omega)
    if K is None:
        K = cover.K
    gap = D[:, ~inside].min(axis=1)
    verdict = CoverVerdict()
    owner = np.full(space.n_sample, -1)
    union = np.zeros(space.n_sample, dtype=bool)
    for i, ((cid, r), wid) in enumerate(zip(cover.family, cover.witnesses)):
        x = space.sample_index(cid)
        ball = D[x] < r
        clash = ball & (owner >= 0)
        if clash.any():
            j = int(owner[np.argmax(clash)])
            verdict._flag("a", "disjoint", [cover.family[j][0], cid])
        owner[ball & (owner < 0)] = i
        big = D[x] < 4.0 * K * r
        union |= big
        lo_bad = big & (gap < 4.0 * K * r)
        hi_bad = big & (gap > 12.0 * K**3 * r)
        for y in np.nonzero(lo_bad | hi_bad)[0]:
            verdict._flag("c", "distance_bounds", [cid, int(space.sample_ids[y])])
        y = space.sample_index(wid)
        if inside[y] or not D[x, y] < 12.0 * K * K * r:
            verdict._flag("d", "witnesses_ok", [cid, wid])
    for y in np.nonzero(union != inside)[0]:
        verdict._flag("b", "covers_omega", int(space.sample_ids[y]))
    return verdict
