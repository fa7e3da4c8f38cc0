"""Deterministic example spaces, equivalent re-metrizations and space files."""

from __future__ import annotations

import csv
import itertools
import json
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import ParamOutOfRange, ParseError, SnowflakeOnNonMetric, ValidationError
from .qspace import AugmentedSpace, validate_quasi_metric


@dataclass(frozen=True)
class GeneratorSpec:
    """What to build.  ``kind`` is grid, cantor, lacunary or file."""

    kind: str
    dimension: int = 1
    depth: int = 1
    n_per_side: int = 16
    measure_exponent: float = 0.0
    ratio: float = 1 / 3
    mesh_factor: int = 1
    points_per_octave: int = 1
    obstacles: tuple = ()
    snowflake: float = 1.0
    scale: float = 1.0
    path: str | None = None

    @classmethod
    def from_dict(cls, data: dict) -> "GeneratorSpec":
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise ParamOutOfRange(f"unknown generator fields: {sorted(extra)}")
        data = dict(data)
        if "ratio" in data:
            data["ratio"] = parse_number(data["ratio"])
        if "obstacles" in data:
            data["obstacles"] = tuple(tuple(o) if isinstance(o, (list, tuple)) else (o,) for o in data["obstacles"])
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)


def parse_number(value) -> float:
    """Accept numbers or strings such as '1/12'."""
    if isinstance(value, str):
        return float(Fraction(value.strip()))
    return float(value)


# ------------------------------------------------------------- generators


def _uniform(n):
    return np.full(n, 1.0 / n)


def gen_grid(dimension: int, n_per_side: int, measure_exponent: float = 0.0, obstacles=()) -> AugmentedSpace:
    """Grid {k/n : 1 <= k <= n}^dim with weights prod x_i^beta normalized to total 1.

    ``obstacles`` are coordinate tuples; grid points on an obstacle are dropped.
    """
    if n_per_side < 2 or dimension < 1:
        raise ParamOutOfRange("need n_per_side >= 2 and dimension >= 1")
    axis = np.arange(1, n_per_side + 1) / n_per_side
    pts = np.array(list(itertools.product(axis, repeat=dimension)), dtype=np.float64)
    obs = np.array([tuple(float(c) for c in o) for o in obstacles], dtype=np.float64).reshape(-1, dimension)
    if obs.size:
        hit = (pts[:, None, :] == obs[None, :, :]).all(axis=2).any(axis=1)
        pts = pts[~hit]
    w = np.prod(pts**measure_exponent, axis=1)
    w = w / w.sum()
    n = len(pts)
    return AugmentedSpace(
        sample_ids=np.arange(n),
        measure=w,
        obstacle_ids=np.arange(n, n + len(obs)),
        coords=np.vstack([pts, obs]) if obs.size else pts,
        metric="euclidean",
    )


def cantor_endpoints(ratio, depth: int) -> list[Fraction]:
    """Endpoints of the depth-k intervals of the two-piece Cantor construction on [0, 1]."""
    rat = Fraction(ratio).limit_denominator(10**6)
    intervals = [(Fraction(0), Fraction(1))]
    for _ in range(depth):
        nxt = []
        for a, b in intervals:
            w = rat * (b - a)
            nxt += [(a, a + w), (b - w, b)]
        intervals = nxt
    return sorted({p for iv in intervals for p in iv})


def gen_cantor(ratio: float = 1 / 3, depth: int = 1, mesh_factor: int = 1) -> AugmentedSpace:
    """Cantor endpoints as obstacles, a uniform mesh of [0, 1] as sample.

    The mesh spacing is h = ratio^depth / mesh_factor.  A mesh point on an
    obstacle moves up by h/2 (down by h/2 at the right end); a moved point
    that duplicates another point is dropped.  Weights are uniform.
    """
    if not 0 < ratio < 0.5:
        raise ParamOutOfRange(f"ratio must lie in (0, 1/2), got {ratio}")
    if depth < 1 or mesh_factor < 1:
        raise ParamOutOfRange("depth and mesh_factor must be >= 1")
    rat = Fraction(ratio).limit_denominator(10**6)
    ends = cantor_endpoints(rat, depth)
    obstacle_set = set(ends)
    h = rat**depth / mesh_factor
    count = int(1 / h)
    pts = set()
    for j in range(count + 1):
        p = j * h
        if p in obstacle_set:
            p = p - h / 2 if p == 1 else p + h / 2
            if p in obstacle_set or p in pts or p > 1:
                continue
        pts.add(p)
    sample = sorted(pts)
    n = len(sample)
    coords = np.array([float(p) for p in sample] + [float(e) for e in ends])
    return AugmentedSpace(
        sample_ids=np.arange(n),
        measure=_uniform(n),
        obstacle_ids=np.arange(n, n + len(ends)),
        coords=coords,
        metric="euclidean",
    )


def lacunary_obstacles(depth: int) -> list[float]:
    return [0.0] + sorted(2.0 ** -(2**j) for j in range(depth + 1))


def gen_lacunary(depth: int, points_per_octave: int = 1) -> AugmentedSpace:
    """Obstacles {0} and 2^(-2^j) for j <= depth; geometric sample mesh towards 0.

    Sample points are 2^(-1 - i/m) for 0 <= i <= m (2^depth + 1), so the
    smallest is 2^(-2^depth) / 4.  A point on an obstacle moves to 1.5 times
    its value.  Weights are uniform per point.
    """
    if depth < 2:
        raise ParamOutOfRange("lacunary depth must be >= 2")
    m = int(points_per_octave)
    if m < 1:
        raise ParamOutOfRange("points_per_octave must be >= 1")
    obs = lacunary_obstacles(depth)
    obs_set = set(obs)
    pts = set()
    for i in range(m * (2**depth + 1) + 1):
        p = 2.0 ** (-1.0 - i / m) if i % m else 2.0 ** (-1 - i // m)
        if p in obs_set:
            p *= 1.5
        pts.add(p)
    sample = sorted(pts)
    n = len(sample)
    return AugmentedSpace(
        sample_ids=np.arange(n),
        measure=_uniform(n),
        obstacle_ids=np.arange(n, n + len(obs)),
        coords=np.array(sample + obs),
        metric="euclidean",
    )


def snowflake_space(space: AugmentedSpace, s: float, c: float = 1.0) -> AugmentedSpace:
    """The same points under c * dist^s, as an explicit table."""
    if not 0 < s <= 1:
        raise ParamOutOfRange(f"snowflake exponent must lie in (0, 1], got {s}")
    if not c > 0:
        raise ParamOutOfRange(f"scale must be positive, got {c}")
    if s < 1 and space.K > 1:
        raise SnowflakeOnNonMetric(f"snowflaking needs a metric input; K = {space.K!r}")
    D = space.dist
    return space.with_table(c * D**s if s != 1 else c * D)


def build_space(spec: GeneratorSpec) -> AugmentedSpace:
    if spec.kind == "grid":
        space = gen_grid(spec.dimension, spec.n_per_side, spec.measure_exponent, spec.obstacles)
    elif spec.kind == "cantor":
        space = gen_cantor(spec.ratio, spec.depth, spec.mesh_factor)
    elif spec.kind == "lacunary":
        space = gen_lacunary(spec.depth, spec.points_per_octave)
    elif spec.kind == "file":
        if not spec.path:
            raise ParamOutOfRange("kind=file needs a path")
        space = load_augmented_space(spec.path)
    else:
        raise ParamOutOfRange(f"unknown generator kind {spec.kind!r}")
    if spec.snowflake != 1.0 or spec.scale != 1.0:
        space = snowflake_space(space, spec.snowflake, spec.scale)
    return space


# -------------------------------------------------------------- file I/O


def space_to_dict(space: AugmentedSpace) -> dict:
    n = space.n_sample
    coords = space.coords

    def rec(i, weight=None):
        out = {"id": int(space.ids[i])}
        if coords is not None:
            out["coords"] = [float(v) for v in coords[i]]
        if weight is not None:
            out["weight"] = float(weight)
        return out

    data = {
        "points": [rec(i, space.measure[i]) for i in range(n)],
        "obstacles": [rec(i) for i in range(n, n + space.n_obstacle)],
        "metric": space.metric,
    }
    if space.metric == "table":
        data["table"] = space.table.tolist()
    return data


def write_space(space: AugmentedSpace, path) -> None:
    """JSON space file; floats use the shortest round-trip repr."""
    Path(path).write_text(json.dumps(space_to_dict(space), indent=1) + "\n")


def _need(rec, key, where):
    if not isinstance(rec, dict) or key not in rec:
        raise ParseError("missing field", field=f"{where}.{key}")
    return rec[key]


def space_from_dict(data: dict) -> AugmentedSpace:
    if not isinstance(data, dict):
        raise ParseError("space file must hold a JSON object")
    points = _need(data, "points", "$")
    obstacles = data.get("obstacles", [])
    metric = data.get("metric", "euclidean")
    if metric not in ("euclidean", "table"):
        raise ParseError(f"unknown metric {metric!r}", field="metric")
    ids, weights, coords = [], [], []
    for i, rec in enumerate(points):
        where = f"points[{i}]"
        ids.append(_need(rec, "id", where))
        weights.append(_need(rec, "weight", where))
        if metric == "euclidean":
            coords.append(_need(rec, "coords", where))
        elif "coords" in rec:
            coords.append(rec["coords"])
    oids = []
    for i, rec in enumerate(obstacles):
        where = f"obstacles[{i}]"
        oids.append(_need(rec, "id", where))
        if metric == "euclidean":
            coords.append(_need(rec, "coords", where))
        elif "coords" in rec:
            coords.append(rec["coords"])
    try:
        ids_arr = np.array(ids, dtype=np.int64)
        oids_arr = np.array(oids, dtype=np.int64)
        w = np.array(weights, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"non-numeric id or weight: {exc}") from None
    table = None
    xy = None
    if metric == "table":
        table = _need(data, "table", "$")
        try:
            table = np.array(table, dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"table is not numeric: {exc}", field="table") from None
    if coords and len(coords) == len(ids) + len(oids):
        try:
            xy = np.array(coords, dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"coordinates are not numeric: {exc}", field="coords") from None
    space = AugmentedSpace(
        sample_ids=ids_arr, measure=w, obstacle_ids=oids_arr, coords=xy, table=table, metric=metric
    )
    validate_quasi_metric(space)
    return space


def _load_csv(path: Path) -> AugmentedSpace:
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        cols = reader.fieldnames or []
        xcols = sorted((c for c in cols if c.startswith("x") and c[1:].isdigit()), key=lambda c: int(c[1:]))
        for need in ("id", "weight", "is_obstacle"):
            if need not in cols:
                raise ParseError("missing column", line=1, field=need)
        if not xcols:
            raise ParseError("no coordinate columns x1..xn", line=1)
        pts, obs = [], []
        for row in reader:
            line = reader.line_num
            try:
                pid = int(row["id"])
                xy = [float(row[c]) for c in xcols]
                flag = row["is_obstacle"].strip().lower() in ("1", "true", "yes")
                weight = float(row["weight"]) if not flag else 0.0
            except (TypeError, ValueError) as exc:
                raise ParseError(f"bad value: {exc}", line=line) from None
            (obs if flag else pts).append((pid, xy, weight))
    space = AugmentedSpace(
        sample_ids=np.array([p[0] for p in pts], dtype=np.int64),
        measure=np.array([p[2] for p in pts]),
        obstacle_ids=np.array([o[0] for o in obs], dtype=np.int64),
        coords=np.array([p[1] for p in pts] + [o[1] for o in obs], dtype=np.float64),
        metric="euclidean",
    )
    validate_quasi_metric(space)
    return space


def load_augmented_space(path) -> AugmentedSpace:
    """Read a JSON or CSV space file and validate it."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        return _load_csv(path)
    text = path.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc.msg}", line=exc.lineno) from None
    return space_from_dict(data)
