"""Finite quasi-metric measure spaces with a marked obstacle set.

A space stores the sample points (which carry measure) followed by the
obstacle points (which carry none).  Distances come either from coordinates
(``metric="euclidean"``) or from an explicit table over sample-then-obstacle
indices (``metric="table"``).  One-dimensional euclidean spaces whose sample
is sorted by coordinate and by id get a fast interval backend; everything
else runs on the explicit table.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.spatial.distance import cdist

from . import _kernels as kern
from .errors import (
    DiagonalViolation,
    EmptyObstacleSet,
    IncompatiblePointSets,
    NonPositiveRadius,
    SymmetryViolation,
    TooFewPoints,
    ValidationError,
)


@dataclass(frozen=True)
class CanonicalBall:
    """One distinct open ball: ``members = {y : dist(center, y) < radius}``."""

    center: int
    radius: float
    members: tuple[int, ...]


@dataclass(frozen=True)
class StructuralConstants:
    K: float
    A: float


@dataclass(frozen=True)
class LineData:
    """Precomputed arrays for the 1-D interval backend."""

    x: np.ndarray
    e: np.ndarray
    dE: np.ndarray
    cell: np.ndarray
    cstart: np.ndarray
    cend: np.ndarray
    eLc: np.ndarray
    eRc: np.ndarray
    cellmax: np.ndarray
    cellarg: np.ndarray
    ctab: np.ndarray
    dtab: np.ndarray
    lg: np.ndarray
    cmu: np.ndarray  # compensated prefix sums of the measure: cmu + cml
    cml: np.ndarray


def _as_ids(values, name):
    arr = np.asarray(values, dtype=np.int64).reshape(-1)
    if arr.size and len(np.unique(arr)) != arr.size:
        raise ValidationError(f"duplicate {name} ids")
    return arr


@dataclass(frozen=True, eq=False)
class AugmentedSpace:
    """Sample points with positive weights plus an obstacle set E.

    ``coords`` (for euclidean spaces) and ``table`` (for table spaces) are
    indexed sample first, then obstacles.  A sample point may coincide with an
    obstacle location; distance weights then refuse to evaluate.
    """

    sample_ids: np.ndarray
    measure: np.ndarray
    obstacle_ids: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int64))
    coords: np.ndarray | None = None
    table: np.ndarray | None = None
    metric: str = "table"
    prefer_line: bool = True

    def __post_init__(self):
        sid = _as_ids(self.sample_ids, "sample")
        oid = _as_ids(self.obstacle_ids, "obstacle")
        if np.intersect1d(sid, oid).size:
            raise ValidationError("sample and obstacle ids overlap")
        if sid.size == 0:
            raise TooFewPoints("space needs at least one sample point")
        mu = np.asarray(self.measure, dtype=np.float64).reshape(-1)
        if mu.shape != sid.shape:
            raise ValidationError("measure must have one weight per sample point")
        if not np.all(np.isfinite(mu)) or np.any(mu <= 0):
            raise ValidationError("every sample weight must be positive and finite")
        object.__setattr__(self, "sample_ids", sid)
        object.__setattr__(self, "obstacle_ids", oid)
        object.__setattr__(self, "measure", mu)
        N = sid.size + oid.size
        if self.metric == "euclidean":
            if self.coords is None:
                raise ValidationError("euclidean metric needs coordinates")
            xy = np.asarray(self.coords, dtype=np.float64)
            if xy.ndim == 1:
                xy = xy[:, None]
            if xy.shape[0] != N or not np.all(np.isfinite(xy)):
                raise ValidationError("coordinates must be finite, one row per point")
            object.__setattr__(self, "coords", xy)
            object.__setattr__(self, "table", None)
            self._check_distinct_locations()
        elif self.metric == "table":
            if self.table is None:
                raise ValidationError("table metric needs a distance table")
            t = np.asarray(self.table, dtype=np.float64)
            if t.shape != (N, N):
                raise ValidationError(f"distance table must be {N}x{N}, got {t.shape}")
            _check_table(t, np.concatenate([sid, oid]), sid.size)
            object.__setattr__(self, "table", t)
            if self.coords is not None:
                object.__setattr__(self, "coords", np.asarray(self.coords, dtype=np.float64))
        else:
            raise ValidationError(f"unknown metric {self.metric!r}")

    # ------------------------------------------------------------- basics

    @property
    def n_sample(self) -> int:
        return int(self.sample_ids.size)

    @property
    def n_obstacle(self) -> int:
        return int(self.obstacle_ids.size)

    @property
    def ids(self) -> np.ndarray:
        return np.concatenate([self.sample_ids, self.obstacle_ids])

    @cached_property
    def _id_index(self) -> dict[int, int]:
        return {int(v): i for i, v in enumerate(self.ids)}

    def index_of(self, point_id: int) -> int:
        try:
            return self._id_index[int(point_id)]
        except KeyError:
            raise ValidationError(f"unknown point id {point_id}") from None

    def sample_index(self, point_id: int) -> int:
        i = self.index_of(point_id)
        if i >= self.n_sample:
            raise ValidationError(f"point {point_id} is an obstacle, not a sample point")
        return i

    def _check_distinct_locations(self):
        n = self.n_sample
        for lo, hi, name in ((0, n, "sample"), (n, n + self.n_obstacle, "obstacle")):
            block = self.coords[lo:hi]
            if len(block) < 2:
                continue
            order = np.lexsort(block.T[::-1])
            srt = block[order]
            same = np.all(srt[1:] == srt[:-1], axis=1)
            if np.any(same):
                k = int(np.argmax(same))
                a, b = sorted((int(order[k]) + lo, int(order[k + 1]) + lo))
                raise DiagonalViolation(
                    (int(self.ids[a]), int(self.ids[b])), f"two {name} points share a location"
                )

    # ---------------------------------------------------------- distances

    def _pair_block(self, rows, cols) -> np.ndarray:
        if self.metric == "table":
            return self.table[np.ix_(rows, cols)]
        a = self.coords[rows]
        b = self.coords[cols]
        if a.shape[1] == 1:
            return np.abs(a[:, 0][:, None] - b[:, 0][None, :])
        return cdist(a, b)

    @cached_property
    def dist(self) -> np.ndarray:
        """Full distance table over sample-then-obstacle indices."""
        if self.metric == "table":
            return self.table
        idx = np.arange(self.n_sample + self.n_obstacle)
        return self._pair_block(idx, idx)

    @cached_property
    def sample_table(self) -> np.ndarray:
        if self.metric == "table" or "dist" in self.__dict__:
            return np.ascontiguousarray(self.dist[: self.n_sample, : self.n_sample])
        idx = np.arange(self.n_sample)
        return np.ascontiguousarray(self._pair_block(idx, idx))

    def distances_from(self, i: int) -> np.ndarray:
        """Distances from point index ``i`` to every sample point."""
        if self.metric == "table":
            return self.table[i, : self.n_sample]
        return self._pair_block([i], np.arange(self.n_sample))[0]

    @cached_property
    def dist_to_obstacles(self) -> np.ndarray:
        """dist(x, E) per sample point; +inf when E is empty."""
        if self.n_obstacle == 0:
            return np.full(self.n_sample, np.inf)
        if self.line is not None:
            return self.line.dE
        n = self.n_sample
        block = self._pair_block(np.arange(n), np.arange(n, n + self.n_obstacle))
        return block.min(axis=1)

    @cached_property
    def diameter(self) -> float:
        """Largest distance between two sample points."""
        if self.n_sample < 2:
            return 0.0
        if self.line is not None:
            return float(self.line.x[-1] - self.line.x[0])
        return float(self.sample_table.max())

    @property
    def full_radius(self) -> float:
        """Representative radius of the ball containing every sample point."""
        d = self.diameter
        return 2.0 * d if d > 0 else 1.0

    # -------------------------------------------------------- 1-D backend

    @cached_property
    def line(self) -> LineData | None:
        if not self.prefer_line or self.metric != "euclidean" or self.coords.shape[1] != 1:
            return None
        n = self.n_sample
        x = np.ascontiguousarray(self.coords[:n, 0])
        if n > 1 and not (np.all(np.diff(x) > 0) and np.all(np.diff(self.sample_ids) > 0)):
            return None
        e = np.sort(self.coords[n:, 0])
        cell = np.searchsorted(e, x, side="right").astype(np.int64)
        ncell = e.size + 1
        eLc = np.concatenate([[-np.inf], e])
        eRc = np.concatenate([e, [np.inf]])
        xl = x - eLc[cell]
        xr = eRc[cell] - x
        dE = np.minimum(xl, xr)
        cstart = np.searchsorted(cell, np.arange(ncell), side="left").astype(np.int64)
        cend = np.searchsorted(cell, np.arange(ncell), side="right").astype(np.int64)
        cellmax = np.full(ncell, -1.0)
        cellarg = np.full(ncell, -1, np.int64)
        for c in np.nonzero(cend > cstart)[0]:
            seg = dE[cstart[c] : cend[c]]
            j = int(np.argmax(seg))
            cellmax[c] = seg[j]
            cellarg[c] = cstart[c] + j
        lg = kern._floor_log2_table(max(n, ncell) + 1)
        cmh, cml = kern.dd_prefix(np.ascontiguousarray(self.measure, dtype=np.float64))
        return LineData(
            x=x,
            e=e,
            dE=np.ascontiguousarray(dE),
            cell=cell,
            cstart=cstart,
            cend=cend,
            eLc=eLc,
            eRc=eRc,
            cellmax=cellmax,
            cellarg=cellarg,
            ctab=kern.build_sparse(cellmax, True),
            dtab=kern.build_sparse(np.ascontiguousarray(dE), True),
            lg=lg,
            cmu=cmh,
            cml=cml,
        )

    # ------------------------------------------------------------ helpers

    def require_obstacles(self):
        if self.n_obstacle == 0:
            raise EmptyObstacleSet("operation needs a non-empty obstacle set")

    def with_table(self, table, *, obstacle_ids=None) -> "AugmentedSpace":
        """Same points and measure under a new explicit distance table."""
        return AugmentedSpace(
            sample_ids=self.sample_ids,
            measure=self.measure,
            obstacle_ids=self.obstacle_ids if obstacle_ids is None else obstacle_ids,
            coords=self.coords,
            table=np.asarray(table, dtype=np.float64),
            metric="table",
        )

    def generic(self) -> "AugmentedSpace":
        """Copy that never uses the 1-D interval backend."""
        return dataclasses.replace(self, prefer_line=False)

    @cached_property
    def K(self) -> float:
        return validate_quasi_metric(self)


def _check_table(t, ids, n_sample):
    if not np.all(np.isfinite(t)) or np.any(t < 0):
        bad = np.argwhere(~np.isfinite(t) | (t < 0))[0]
        raise DiagonalViolation((int(ids[bad[0]]), int(ids[bad[1]])), "distances must be finite and >= 0")
    asym = t != t.T
    if np.any(asym):
        i, j = np.argwhere(asym)[0]
        raise SymmetryViolation((int(ids[i]), int(ids[j])), (float(t[i, j]), float(t[j, i])))
    diag = np.diagonal(t)
    if np.any(diag != 0):
        i = int(np.argmax(diag != 0))
        raise DiagonalViolation((int(ids[i]), int(ids[i])), "nonzero self-distance")
    zero = t == 0
    np.fill_diagonal(zero, False)
    # a sample point may sit on an obstacle location; nothing else may coincide
    zero[:n_sample, n_sample:] = False
    zero[n_sample:, :n_sample] = False
    if np.any(zero):
        i, j = np.argwhere(zero)[0]
        raise DiagonalViolation((int(ids[i]), int(ids[j])), "distinct points at distance 0")


def triangular_constant(table) -> float:
    """Least K with d(x,z) <= K (d(x,y) + d(y,z)) on an explicit table."""
    t = np.ascontiguousarray(np.asarray(table, dtype=np.float64))
    if t.shape[0] < 2:
        raise TooFewPoints("need at least 2 points")
    return float(kern.triangular_constant(t))


def validate_quasi_metric(space) -> float:
    """Check the table invariants and return the minimal triangular constant.

    Accepts an :class:`AugmentedSpace` (invariants were checked on
    construction) or a bare square table.  Euclidean coordinates satisfy the
    triangle inequality, so K = 1 without a triple scan.
    """
    if isinstance(space, AugmentedSpace):
        if space.n_sample + space.n_obstacle < 2:
            raise TooFewPoints("need at least 2 points")
        if space.metric == "euclidean":
            return 1.0
        return triangular_constant(space.table)
    t = np.asarray(space, dtype=np.float64)
    if t.ndim != 2 or t.shape[0] != t.shape[1]:
        raise ValidationError("distance table must be square")
    if t.shape[0] < 2:
        raise TooFewPoints("need at least 2 points")
    _check_table(t, np.arange(t.shape[0]), t.shape[0])
    return triangular_constant(t)


# ---------------------------------------------------------------- balls


def ball_members(space: AugmentedSpace, center: int, radius: float) -> np.ndarray:
    """Sample indices of B(center, radius); ``center`` is a point index."""
    if not radius > 0:
        raise NonPositiveRadius(f"radius must be positive, got {radius}")
    if space.line is not None and center < space.n_sample:
        lo, hi = kern.line_interval(space.line.x, center, float(radius))
        return np.arange(lo, hi)
    return np.nonzero(space.distances_from(center) < radius)[0]


def count_canonical_balls(space: AugmentedSpace) -> int:
    if space.line is not None:
        return int(kern.line_count_balls(space.line.x, space.full_radius))
    return int(kern.generic_count_balls(space.sample_table, space.full_radius))


def canonical_ball_arrays(space: AugmentedSpace):
    """(center index, radius, member count) for every canonical ball, in sweep order.

    Sweep order is by center index, then increasing radius; every per-ball
    array emitted elsewhere in the package follows the same order.
    """
    total = count_canonical_balls(space)
    c = np.empty(total, np.int64)
    r = np.empty(total)
    if space.line is not None:
        lo = np.empty(total, np.int64)
        hi = np.empty(total, np.int64)
        kern.line_enumerate(space.line.x, space.full_radius, c, r, lo, hi)
        return c, r, hi - lo
    k = np.empty(total, np.int64)
    kern.generic_enumerate(space.sample_table, space.full_radius, c, r, k)
    return c, r, k


def canonical_balls(space: AugmentedSpace) -> list[CanonicalBall]:
    """Every distinct open ball per sample center, with member ids."""
    c, r, _ = canonical_ball_arrays(space)
    ids = space.sample_ids
    out = []
    for ci, ri in zip(c.tolist(), r.tolist()):
        members = tuple(sorted(int(v) for v in ids[ball_members(space, ci, ri)]))
        out.append(CanonicalBall(int(ids[ci]), float(ri), members))
    return out


def doubling_constant(space: AugmentedSpace) -> float:
    """max mu(B(x, 2r)) / mu(B(x, r)) over canonical balls, clamped below at 1."""
    if space.line is not None:
        best, _, _ = kern.line_measure_doubling(space.line.x, space.line.cmu, space.line.cml, space.full_radius)
    else:
        best, _, _ = kern.generic_measure_doubling(
            space.sample_table, space.measure, space.sample_ids, space.full_radius
        )
    return max(1.0, float(best))


def structural_constants(space: AugmentedSpace) -> StructuralConstants:
    return StructuralConstants(K=space.K, A=doubling_constant(space))


def equivalence_constants(d1, d2) -> tuple[float, float]:
    """(min, max) of d2/d1 over off-diagonal pairs."""
    if isinstance(d1, AugmentedSpace):
        d1 = d1.dist
    if isinstance(d2, AugmentedSpace):
        d2 = d2.dist
    a = np.asarray(d1, dtype=np.float64)
    b = np.asarray(d2, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise IncompatiblePointSets(f"tables of shape {a.shape} and {b.shape} are not comparable")
    mask = ~np.eye(a.shape[0], dtype=bool) & (a > 0)
    if not np.any(mask):
        raise TooFewPoints("need at least one pair of distinct points")
    if np.any(b[mask] <= 0):
        raise IncompatiblePointSets("second table vanishes where the first does not")
    ratio = b[mask] / a[mask]
    return float(ratio.min()), float(ratio.max())


def dyadic_exponent(x: float) -> int:
    """Smallest integer m with x <= 2**m, so 2**(m-1) < x <= 2**m."""
    if not x > 0:
        raise ValueError("dyadic exponent needs a positive argument")
    mant, exp = np.frexp(x)
    # x = mant * 2**exp with mant in [0.5, 1); exact powers of two have mant == 0.5
    return int(exp - 1) if mant == 0.5 else int(exp)
