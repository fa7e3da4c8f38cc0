"""Config-driven analysis: constants, holes, porosity, A1 and decay in one report."""

from __future__ import annotations

import csv
import hashlib
import json
import math
import sys
from dataclasses import dataclass, field, fields
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .errors import ConfigError, PorosityLabError
from .generators import GeneratorSpec, build_space, load_augmented_space, parse_number
from .holes import hole_sweep, lemma33_ceiling
from .msdist import delta_space, hole_shrink_beta, ms_distance
from .muckenhoupt import (
    a1_constant,
    decay_profile,
    distance_weight,
    mesh_floor,
    theoretical_constants,
)
from .porosity import FailureList, certify_porosity, porosity_from_a1, transfer_parameters
from .qspace import AugmentedSpace, doubling_constant, equivalence_constants, validate_quasi_metric

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

SECTIONS = ("constants", "holes", "porosity", "a1", "decay")
EXIT_OK, EXIT_NOT_CERTIFIED, EXIT_DISPROVED, EXIT_VALIDATION, EXIT_CONFIG = 0, 2, 3, 4, 5


class SectionError(PorosityLabError):
    def __init__(self, section: str, exc: Exception):
        self.section = section
        self.cause = exc
        super().__init__(f"section {section!r} failed: {exc}")


@dataclass(frozen=True)
class PipelineConfig:
    space: GeneratorSpec | None = None
    space_file: str | None = None
    alphas: tuple[float, ...] = (0.1,)
    sigma: float = 0.2
    gamma: float = 1 / 12
    sections: tuple[str, ...] = SECTIONS
    k_max: int = 8
    use_delta: bool = True
    out: str | None = None
    csv: str | None = None
    base_dir: str = "."
    raw: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_dict(cls, data: dict, base_dir: str = ".") -> "PipelineConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a mapping")
        known = {f.name for f in fields(cls)} - {"raw", "base_dir"}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        if ("space" in data) == ("space_file" in data):
            raise ConfigError("config needs exactly one of 'space' or 'space_file'")
        try:
            spec = GeneratorSpec.from_dict(data["space"]) if "space" in data else None
            sections = tuple(data.get("sections", SECTIONS))
            bad = [s for s in sections if s not in SECTIONS]
            if bad:
                raise ConfigError(f"unknown sections {bad}; choose from {list(SECTIONS)}")
            return cls(
                space=spec,
                space_file=data.get("space_file"),
                alphas=tuple(parse_number(a) for a in data.get("alphas", (0.1,))),
                sigma=parse_number(data.get("sigma", 0.2)),
                gamma=parse_number(data.get("gamma", 1 / 12)),
                sections=sections,
                k_max=int(data.get("k_max", 8)),
                use_delta=bool(data.get("use_delta", True)),
                out=data.get("out"),
                csv=data.get("csv"),
                base_dir=base_dir,
                raw=data,
            )
        except ConfigError:
            raise
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"invalid config value: {exc}") from None

    @classmethod
    def load(cls, path) -> "PipelineConfig":
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        text = path.read_text()
        try:
            if path.suffix.lower() == ".toml":
                data = tomllib.loads(text)
            else:
                data = json.loads(text)
        except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
            raise ConfigError(f"cannot parse config {path}: {exc}") from None
        return cls.from_dict(data, base_dir=str(path.parent))

    def resolve(self, name: str | None) -> Path | None:
        if name is None:
            return None
        p = Path(name)
        return p if p.is_absolute() else Path(self.base_dir) / p

    def build(self) -> AugmentedSpace:
        if self.space_file is not None:
            path = self.resolve(self.space_file)
            if not path.exists():
                raise ConfigError(f"space file not found: {path}")
            return load_augmented_space(path)
        spec = self.space
        if spec.kind == "file" and spec.path:
            path = self.resolve(spec.path)
            if not path.exists():
                raise ConfigError(f"space file not found: {path}")
            spec = GeneratorSpec(**{**spec.to_dict(), "path": str(path)})
        return build_space(spec)


# ---------------------------------------------------------------- sections


def space_summary(space: AugmentedSpace) -> dict:
    return {
        "n_sample": space.n_sample,
        "n_obstacle": space.n_obstacle,
        "metric": space.metric,
        "K": space.K,
        "A": doubling_constant(space),
    }


def holes_section(space: AugmentedSpace, max_violations: int = 50) -> dict:
    hs = hole_sweep(space)
    out = {
        "sample_restricted": True,
        "n_balls": hs.n_balls,
        "C": hs.C,
        "worst_pair": list(hs.worst_pair) if hs.worst_pair else None,
        "n_violations": hs.n_violations,
        "violations": [list(v) for v in hs.violations[:max_violations]],
        "C0": hs.C0,
        "C0_pair": list(hs.c0_pair) if hs.c0_pair else None,
    }
    if hs.C is not None:
        out["C0_ceiling"] = lemma33_ceiling(hs.C, space.K)
    return out


def porosity_section(space: AugmentedSpace, sigma: float, gamma: float, family_limit: int = 2000) -> dict:
    res = certify_porosity(space, sigma, gamma, materialize=None)
    out = {
        "sigma": sigma,
        "gamma": gamma,
        "certified": res.certified,
        "n_balls": res.n_balls,
        "min_packed_fraction": res.min_packed_fraction,
        "worst_ball": list(res.worst_ball),
    }
    if isinstance(res, FailureList):
        out["disproved"] = res.disproved
        out["n_failures"] = res.n_failures
        out["failures"] = [
            {
                "center": f.center,
                "radius": f.radius,
                "packed_fraction": f.packed_fraction,
                "oracle_fraction": f.oracle_fraction,
            }
            for f in res.failures[:family_limit]
        ]
    elif res.per_ball is not None and len(res.per_ball) <= family_limit:
        out["per_ball"] = [
            {"center": b.center, "radius": b.radius, "family": [list(f) for f in b.family],
             "packed_fraction": b.packed_fraction}
            for b in res.per_ball
        ]
    return out


def a1_section(space: AugmentedSpace, alphas, gamma: float, A: float) -> dict:
    rows = []
    for a in alphas:
        rep = a1_constant(space, distance_weight(space, a), per_ball=False)
        row = {"alpha": a, "constant": rep.constant, "worst_ball": list(rep.worst_ball)}
        if gamma < 1.0 / (4.0 * space.K**2):
            row["sigma_guaranteed"] = porosity_from_a1(rep.constant, a, space.K, A, gamma)
        rows.append(row)
    return {"per_alpha": rows}


def decay_chain(space: AugmentedSpace, sigma: float, gamma: float, k_max: int = 8, use_delta: bool = True) -> dict:
    """Decay constants from porosity data and the measured neighborhood decay.

    With ``use_delta`` every quantity is computed on the Macias-Segovia
    distance of ``space``; otherwise on the original distance.
    """
    if use_delta:
        ms = ms_distance(space)
        work = delta_space(space, ms)
        beta = ms.beta
        K = validate_quasi_metric(work)
    else:
        work = space
        K = space.K
        beta = hole_shrink_beta(1.0 / (4.0 * K), K)
    A = doubling_constant(work)
    hs = hole_sweep(work)
    if hs.C is None:
        raise PorosityLabError("hole function vanishes on every ball")
    C = hs.C
    res = certify_porosity(work, sigma, gamma, materialize=False)
    source = "direct"
    sigma0, gamma0 = sigma, gamma
    if not res.certified:
        if not use_delta:
            raise PorosityLabError(f"not certified at sigma={sigma}, gamma={gamma}")
        base = certify_porosity(space, sigma, gamma, materialize=False)
        if not base.certified:
            raise PorosityLabError(f"not certified at sigma={sigma}, gamma={gamma} on either distance")
        c1, c2 = equivalence_constants(space.dist, work.dist)
        C_d = hole_sweep(space).C
        sigma0, gamma0 = transfer_parameters(sigma, gamma, doubling_constant(space), A, C_d, c1, c2)
        source = "transferred"
    tc = theoretical_constants(sigma0, gamma0, K, A, C, beta)
    ball = (int(work.sample_ids[0]), work.full_radius)
    mu_ball = float(work.measure.sum())
    mesh = mesh_floor(work, ball)
    log_q = math.log1p(-tc.one_minus_q)
    profile = []
    ok = True
    n_checked = 0
    if tc.p > 0:
        for k, (eps, meas) in enumerate(decay_profile(work, ball, tc.p, k_max)):
            bound = math.exp(k * log_q) * mu_ball
            checked = eps >= 10.0 * mesh
            holds = meas <= bound
            if checked:
                n_checked += 1
                ok = ok and holds
            profile.append({"k": k, "epsilon": eps, "measure": meas, "bound": bound, "checked": checked})
    a_half = tc.alpha_star / 2.0
    a1_half = a1_constant(work, distance_weight(work, a_half), per_ball=False).constant if a_half > 0 else None
    return {
        "distance": "delta" if use_delta else "d",
        "K": K,
        "A": A,
        "C": C,
        "beta": beta,
        "sigma0": sigma0,
        "gamma0": gamma0,
        "sigma0_source": source,
        "eta0": tc.eta0,
        "theta_eta0": tc.theta_eta0,
        "p": tc.p,
        "q": tc.q,
        "one_minus_q": tc.one_minus_q,
        "alpha_star": tc.alpha_star,
        "mesh": mesh,
        "ball": list(ball),
        "profile": profile,
        "n_checked": n_checked,
        "decay_bound_holds": ok,
        "a1_at_half_alpha_star": a1_half,
    }


# ---------------------------------------------------------------- pipeline


def _config_hash(cfg: PipelineConfig) -> str:
    blob = json.dumps(cfg.raw, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()


def run_pipeline(config) -> tuple[dict, int]:
    """Run every requested section in dependency order; returns (report, exit code)."""
    cfg = config if isinstance(config, PipelineConfig) else (
        PipelineConfig.load(config) if isinstance(config, (str, Path)) else PipelineConfig.from_dict(config)
    )
    space = cfg.build()
    summary = space_summary(space)
    report = {"space": summary}
    code = EXIT_OK
    order = [s for s in SECTIONS if s in cfg.sections]
    for name in order:
        try:
            if name == "constants":
                report["constants"] = {"K": summary["K"], "A": summary["A"]}
            elif name == "holes":
                report["holes"] = holes_section(space)
            elif name == "porosity":
                sec = porosity_section(space, cfg.sigma, cfg.gamma)
                report["porosity"] = sec
                if not sec["certified"]:
                    code = EXIT_DISPROVED if sec.get("disproved") else EXIT_NOT_CERTIFIED
            elif name == "a1":
                report["a1"] = a1_section(space, cfg.alphas, cfg.gamma, summary["A"])
            elif name == "decay":
                report["decay"] = decay_chain(space, cfg.sigma, cfg.gamma, cfg.k_max, cfg.use_delta)
        except (ConfigError, SectionError):
            raise
        except PorosityLabError as exc:
            raise SectionError(name, exc) from exc
    report["provenance"] = {
        "tool_version": __version__,
        "config_sha256": _config_hash(cfg),
        "generated_at": datetime.now(timezone.utc).isoformat(),
    }
    if cfg.out:
        write_report(report, cfg.resolve(cfg.out))
    if cfg.csv:
        write_summary_csv(report, cfg.resolve(cfg.csv))
    return report, code


def write_report(report: dict, path) -> None:
    Path(path).write_text(json.dumps(report, indent=1) + "\n")


def summary_rows(report: dict) -> list[tuple[str, object]]:
    rows = [(f"space.{k}", v) for k, v in report["space"].items()]
    if "holes" in report:
        rows += [(f"holes.{k}", report["holes"][k]) for k in ("C", "n_violations", "C0")]
    if "porosity" in report:
        rows += [(f"porosity.{k}", report["porosity"][k]) for k in ("certified", "min_packed_fraction")]
    if "a1" in report:
        rows += [(f"a1[{r['alpha']!r}]", r["constant"]) for r in report["a1"]["per_alpha"]]
    if "decay" in report:
        rows += [(f"decay.{k}", report["decay"][k]) for k in ("p", "q", "alpha_star", "decay_bound_holds")]
    return rows


def write_summary_csv(report: dict, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["quantity", "value"])
        for k, v in summary_rows(report):
            w.writerow([k, repr(v) if isinstance(v, float) else v])


def write_trend_csv(rows: list[dict], path) -> None:
    keys = []
    for r in rows:
        keys += [k for k in r if k not in keys]
    with Path(path).open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=keys)
        w.writeheader()
        for r in rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
