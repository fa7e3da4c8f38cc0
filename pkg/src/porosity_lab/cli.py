"""Command line entry point: ``porosity-lab <command> [options]``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigError, ParseError, PorosityLabError, ValidationError
from .generators import GeneratorSpec, build_space, load_augmented_space, parse_number, write_space
from .holes import hole_profile, hole_sweep
from .msdist import default_params, k_bound_holds, ms_distance, sandwich_holds, MSParams
from .muckenhoupt import a1_constant, decay_profile, distance_weight, resolution_sweep
from .pipeline import (
    EXIT_CONFIG,
    EXIT_OK,
    EXIT_VALIDATION,
    SectionError,
    holes_section,
    porosity_section,
    run_pipeline,
    space_summary,
    write_trend_csv,
)
from .whitney import verify_cover, whitney_cover

EXIT_ERROR = 1


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--space", help="space file (JSON or CSV)")
    p.add_argument("--out", help="write JSON output here instead of stdout")
    p.add_argument("--threads", type=int, default=None, help="worker threads for compiled kernels")
    p.add_argument("--seed", type=int, default=None, help="reserved; generators are deterministic")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="porosity-lab", description=__doc__, parents=[common])
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="write a generated space file")
    g.add_argument("--kind", required=True, choices=["grid", "cantor", "lacunary"])
    g.add_argument("--dimension", type=int, default=1)
    g.add_argument("--depth", type=int, default=1)
    g.add_argument("--n-per-side", type=int, default=16)
    g.add_argument("--measure-exponent", type=float, default=0.0)
    g.add_argument("--ratio", type=parse_number, default=1 / 3)
    g.add_argument("--mesh-factor", type=int, default=1)
    g.add_argument("--points-per-octave", type=int, default=1)
    g.add_argument("--obstacle", action="append", default=[], help="obstacle coordinates, comma separated")
    g.add_argument("--snowflake", type=float, default=1.0)
    g.add_argument("--scale", type=float, default=1.0)

    sub.add_parser("validate", parents=[common], help="check a space and print K and A")

    h = sub.add_parser("holes", parents=[common], help="hole function, its doubling constant and the distance-to-hole ratio")
    h.add_argument("--per-ball", action="store_true", help="include every canonical ball")

    c = sub.add_parser("certify", parents=[common], help="greedy weak-porosity certificate")
    c.add_argument("--sigma", type=parse_number, required=True)
    c.add_argument("--gamma", type=parse_number, required=True)

    a = sub.add_parser("a1", parents=[common], help="A1 constants of dist(., E)^-alpha")
    a.add_argument("--alpha", type=parse_number, action="append", required=True)
    a.add_argument("--per-ball", action="store_true")

    d = sub.add_parser("decay", parents=[common], help="neighborhood decay profile")
    d.add_argument("--p", type=parse_number, required=True)
    d.add_argument("--kmax", type=int, default=10)
    d.add_argument("--center", type=int, default=None, help="ball center id (default: first sample point)")
    d.add_argument("--radius", type=float, default=None, help="ball radius (default: whole space)")

    w = sub.add_parser("whitney", parents=[common], help="Whitney cover of a subset")
    w.add_argument("--omega", required=True, help="JSON list of sample ids, or whitespace separated ids")

    m = sub.add_parser("ms-distance", parents=[common], help="Macias-Segovia distance table")
    m.add_argument("--a", type=parse_number, default=None)
    m.add_argument("--n-max", type=int, default=None)

    s = sub.add_parser("sweep", parents=[common], help="resolution sweep over depths")
    s.add_argument("--spec", required=True, help="JSON generator spec")
    s.add_argument("--alphas", type=parse_number, nargs="+", default=[0.1])
    s.add_argument("--depths", type=int, nargs="+", required=True)
    s.add_argument("--gamma", type=parse_number, default=None)
    s.add_argument("--csv", default=None, help="also write the trend table as CSV")

    r = sub.add_parser("run", parents=[common], help="config-driven pipeline")
    r.add_argument("--config", required=True)
    return ap


def _set_threads(arg):
    value = os.environ.get("POROSITY_LAB_THREADS", arg)
    if value is None:
        return
    import numba

    n = max(1, min(int(value), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(n)


def _load(args):
    if not args.space:
        raise ConfigError("this command needs --space")
    path = Path(args.space)
    if not path.exists():
        raise ConfigError(f"space file not found: {path}")
    return load_augmented_space(path)


def _emit(obj, out):
    text = json.dumps(obj, indent=1)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _read_omega(text):
    p = Path(text)
    raw = p.read_text() if p.exists() else text
    try:
        data = json.loads(raw)
    except json.JSONDecodeError:
        data = raw.split()
    return [int(v) for v in data]


def _dispatch(args) -> int:
    cmd = args.command
    if cmd == "gen":
        if not args.out:
            raise ConfigError("gen needs --out")
        obstacles = tuple(tuple(float(v) for v in o.split(",")) for o in args.obstacle)
        spec = GeneratorSpec(
            kind=args.kind, dimension=args.dimension, depth=args.depth, n_per_side=args.n_per_side,
            measure_exponent=args.measure_exponent, ratio=args.ratio, mesh_factor=args.mesh_factor,
            points_per_octave=args.points_per_octave, obstacles=obstacles, snowflake=args.snowflake,
            scale=args.scale,
        )
        write_space(build_space(spec), args.out)
        return EXIT_OK
    if cmd == "run":
        report, code = run_pipeline(args.config)
        _emit(report, args.out)
        return code
    if cmd == "sweep":
        spec = GeneratorSpec.from_dict(json.loads(Path(args.spec).read_text()))
        rows = resolution_sweep(spec, args.alphas, args.depths, gamma=args.gamma)
        if args.csv:
            write_trend_csv(rows, args.csv)
        _emit({"rows": rows}, args.out)
        return EXIT_OK
    space = _load(args)
    if cmd == "validate":
        _emit(space_summary(space), args.out)
        return EXIT_OK
    if cmd == "holes":
        sec = holes_section(space)
        out = {"per_ball": hole_profile(space).rows() if args.per_ball else None}
        out["doubling"] = {k: sec[k] for k in ("C", "worst_pair", "n_violations", "violations")}
        out["lemma33"] = {k: sec.get(k) for k in ("C0", "C0_pair", "C0_ceiling")}
        out["n_balls"] = sec["n_balls"]
        out["sample_restricted"] = True
        _emit(out, args.out)
        return EXIT_OK
    if cmd == "certify":
        sec = porosity_section(space, args.sigma, args.gamma)
        _emit(sec, args.out)
        if sec["certified"]:
            return EXIT_OK
        return 3 if sec.get("disproved") else 2
    if cmd == "a1":
        rows = []
        for a in args.alpha:
            rep = a1_constant(space, distance_weight(space, a), per_ball=args.per_ball)
            row = {"alpha": a, "constant": rep.constant, "worst_ball": list(rep.worst_ball), "n_balls": rep.n_balls}
            if args.per_ball:
                row["per_ball_ratio"] = rep.per_ball_ratio.tolist()
            rows.append(row)
        _emit({"per_alpha": rows}, args.out)
        return EXIT_OK
    if cmd == "decay":
        center = int(space.sample_ids[0]) if args.center is None else args.center
        radius = space.full_radius if args.radius is None else args.radius
        prof = decay_profile(space, (center, radius), args.p, args.kmax)
        _emit({"ball": [center, radius], "profile": [list(r) for r in prof]}, args.out)
        return EXIT_OK
    if cmd == "whitney":
        omega = _read_omega(args.omega)
        cover = whitney_cover(space, omega)
        verdict = verify_cover(space, omega, cover)
        _emit(
            {"K": cover.K, "family": [list(f) for f in cover.family], "witnesses": cover.witnesses,
             "verdict": verdict.as_dict(), "ok": verdict.ok},
            args.out,
        )
        return EXIT_OK if verdict.ok else EXIT_ERROR
    if cmd == "ms-distance":
        params = default_params(space, args.a)
        if args.n_max is not None:
            params = MSParams(params.a, args.n_max)
        res = ms_distance(space, params)
        _emit(
            {
                "ids": [int(v) for v in space.ids],
                "delta_table": np.asarray(res.delta).tolist(),
                "beta": res.beta,
                "a": res.a,
                "n_max": res.n_max,
                "K_delta_bound": res.K_delta_bound,
                "checks": {"sandwich": sandwich_holds(space, res), "k_bound": k_bound_holds(res)},
            },
            args.out,
        )
        return EXIT_OK
    raise ConfigError(f"unknown command {cmd!r}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _set_threads(args.threads)
        return _dispatch(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SectionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if isinstance(exc.cause, (ValidationError, ParseError)):
            return EXIT_VALIDATION
        return EXIT_ERROR
    except (ValidationError, ParseError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except PorosityLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
