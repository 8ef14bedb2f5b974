"""Run a configured experiment: repetitions, aggregation, bound checks, files."""

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .. import domains as dom
from ..analysis import BoundParams, aggregate, check_bound_compliance
from ..engine import (
    Constant,
    GeneralConvex,
    RunConfig,
    StronglyConvex,
    default_record_points,
    parse_scheme,
    repetition_seed,
    run_repetitions,
)
from ..exceptions import BoundUnavailableError, ConfigError
from ..oracles import RegularizedHinge, generate_synthetic, oracle_norm_bound, reference_optimum
from ..svmlight import load_svmlight
from .config import build_domain
from .output import bounds_table, emit_csv, emit_plot

log = logging.getLogger(__name__)

EXIT_OK, EXIT_COMPLIANCE, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

_SCHEDULE_PARAM = {
    "strongly_convex": ("lambda", "lam"),
    "general_convex": ("c", "c"),
    "constant": ("eta", "eta"),
}


def build_objective(cfg):
    spec = dict(cfg.objective)
    if spec["variant"] == "svmlight":
        data = load_svmlight(spec["path"], dim=spec.get("dim"))
        return RegularizedHinge(spec["lambda"], data)
    return generate_synthetic(spec)


def resolve_G(cfg, obj, domain):
    """G from the config override, else the closed-form oracle bound, else None."""
    if cfg.G is not None:
        return cfg.G, "config"
    try:
        return oracle_norm_bound(obj, domain), "oracle_norm_bound"
    except BoundUnavailableError:
        return None, "unavailable"


def build_schedule(cfg, obj, domain, G):
    s = cfg.schedule
    if s["kind"] == "strongly_convex":
        lam = s["lambda"]
        if lam is None:
            lam = obj.strong_convexity
            if not lam:
                raise ConfigError("objective is not strongly convex; set schedule.lambda", "schedule.lambda")
        return StronglyConvex(lam)
    if s["kind"] == "general_convex":
        c = s["c"]
        if c is None:
            D = dom.diameter(domain)
            if not math.isfinite(D) or G is None:
                raise ConfigError("default c = D/G needs a bounded domain and a known G", "schedule.c")
            c = D / G
        return GeneralConvex(c)
    return Constant(s["eta"])


def bound_params(kind, scheme, schedule, domain, G):
    _, arg = parse_scheme(scheme)
    p = {"G": G}
    if isinstance(schedule, StronglyConvex):
        p["lam"] = schedule.lam
    if isinstance(schedule, GeneralConvex):
        p["c"] = schedule.c
    p["D"] = dom.diameter(domain)
    if kind == "suffix":
        p["alpha"] = arg
    if kind == "polydecay":
        p["eta"] = arg
    return BoundParams(**p)


def _schemes_for(kind, schemes):
    prefix = "last" if kind.startswith("last") else kind
    return [s for s in schemes if parse_scheme(s)[0] == prefix]


def _run_chunk(args):
    obj, run_cfg, schemes, seeds, reference = args
    return run_repetitions(obj, run_cfg, schemes, seeds, reference)


def run_repetitions_parallel(obj, run_cfg, schemes, seeds, reference, jobs=1):
    """Split ``seeds`` into contiguous chunks, run them, return records in seed order."""
    jobs = max(1, min(int(jobs), len(seeds)))
    if jobs == 1:
        return run_repetitions(obj, run_cfg, schemes, seeds, reference)
    chunks = [list(c) for c in np.array_split(np.asarray(seeds, dtype=object), jobs) if len(c)]
    tasks = [(obj, run_cfg, schemes, c, reference) for c in chunks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        parts = list(pool.map(_run_chunk, tasks))
    return [rec for part in parts for rec in part]


@dataclass
class ExperimentResult:
    aggregate: object
    reports: list
    G: Optional[float]
    G_source: str
    reference: object
    files: Dict[str, str] = field(default_factory=dict)
    records: List[object] = field(default_factory=list)

    @property
    def exit_code(self):
        return EXIT_OK if all(r.passed for r in self.reports) else EXIT_COMPLIANCE

    def summary_lines(self):
        lines = [f"G = {self.G!r} (source: {self.G_source})"]
        if self.reference.tolerance:
            lines.append(f"F_ref = {self.reference.value!r} (tolerance {self.reference.tolerance!r})")
        for rep in self.reports:
            worst = max(rep.rows, key=lambda r: r.mean / r.bound if r.bound else math.inf)
            status = "PASS" if rep.passed else "FAIL"
            lines.append(
                f"[{status}] {rep.kind} on {rep.scheme}: worst ratio mean/bound = "
                f"{worst.mean / worst.bound:.4g} at t={worst.t} (slack {rep.slack:g})"
            )
        return lines


def run_experiment(cfg, out_dir=None, jobs=None, write=True):
    """Execute ``cfg``; write results.csv, resolved_config.yaml and plot.svg."""
    obj = build_objective(cfg)
    domain = build_domain(cfg.domain, obj.dim)
    G, G_source = resolve_G(cfg, obj, domain)
    schedule = build_schedule(cfg, obj, domain, G)
    # echo the resolved step-size parameter instead of null
    key, attr = _SCHEDULE_PARAM[cfg.schedule["kind"]]
    cfg.schedule[key] = float(getattr(schedule, attr))
    if jobs is not None:
        cfg.jobs = int(jobs)
    points = default_record_points(cfg.T, cfg.record["growth"])
    run_cfg = RunConfig(cfg.T, schedule, domain, seed=cfg.seed, record_points=points)

    reference = reference_optimum(obj, domain, steps=cfg.reference["steps"], eta=cfg.reference["eta"], G=cfg.G)
    seeds = [repetition_seed(cfg.seed, i) for i in range(cfg.repetitions)]
    records = run_repetitions_parallel(obj, run_cfg, cfg.schemes, seeds, reference, cfg.jobs)
    agg = aggregate(records)
    if not all(r.feasible for r in records):
        log.warning("some iterates left the domain at a record point")

    reports = []
    for kind in cfg.bounds:
        targets = _schemes_for(kind, cfg.schemes)
        if not targets:
            raise ConfigError(f"no scheme matches bound {kind!r}", "bounds")
        if G is None:
            raise BoundUnavailableError("G unavailable; supply G in config")
        for scheme in targets:
            params = bound_params(kind, scheme, schedule, domain, G)
            reports.append(check_bound_compliance(agg, kind, params, cfg.slack, scheme=scheme))

    result = ExperimentResult(agg, reports, G, G_source, reference, records=records)
    if write:
        out_dir = out_dir or cfg.output["dir"]
        os.makedirs(out_dir, exist_ok=True)
        table = bounds_table(reports)
        files = {
            "results.csv": emit_csv(agg, table),
            "resolved_config.yaml": cfg.dump(),
        }
        if cfg.output["plot"]:
            files["plot.svg"] = emit_plot(agg, table)
        for name, text in files.items():
            path = os.path.join(out_dir, name)
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            result.files[name] = path
    return result
