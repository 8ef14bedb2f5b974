"""Experiment configuration: YAML in, validated :class:`ExperimentConfig` out.

Example (every key except ``objective``, ``schedule``, ``schemes`` and ``T``
has a default)::

    objective:
      variant: quadratic      # quadratic | l1 | svm | svmlight
      dim: 5
      lambda: 1.0
      noise_sigma: 0.5
      optimum_radius: 0.5
      optimum_on_sphere: true
    domain: {kind: ball, radius: 1.0}
    schedule: {kind: strongly_convex}     # lambda defaults to the objective's
    schemes: [last, uniform, suffix(0.5), polydecay(3)]
    T: 10000
    repetitions: 100
    seed: 1
    bounds: [last_strongly_convex, suffix, polydecay]

``resolved_dict`` renders the config with every default filled in; loading
that rendering again yields an identical config.
"""

import copy
import math
import numbers
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import yaml

from .. import domains as dom
from ..analysis import normalize_kind
from ..engine import PRNG_DESCRIPTION, parse_scheme
from ..exceptions import ConfigError, UsageError
from ..oracles import synthetic_defaults

DEFAULTS = {
    "domain": {"kind": "unbounded"},
    "repetitions": 10,
    "seed": 0,
    "record": {"growth": 1.25},
    "G": None,
    "bounds": [],
    "slack": 0.1,
    "reference": {"steps": 1_000_000, "eta": 3},
    "output": {"dir": "results", "plot": True},
    "jobs": 1,
    "prng": PRNG_DESCRIPTION,
}

TOP_KEYS = {"objective", "schedule", "schemes", "T", *DEFAULTS}
REQUIRED = ("objective", "schedule", "schemes", "T")


def _is_real(v):
    return isinstance(v, numbers.Real) and not isinstance(v, bool)


def _real(v, path, positive=False, allow_zero=True):
    if not _is_real(v):
        raise ConfigError(f"expected a number, got {v!r}", path)
    v = float(v)
    if not math.isfinite(v):
        raise ConfigError(f"expected a finite number, got {v!r}", path)
    if positive and (v < 0 or (v == 0 and not allow_zero)):
        raise ConfigError(f"must be {'>=' if allow_zero else '>'} 0, got {v!r}", path)
    return v


def _int(v, path, minimum=None):
    if isinstance(v, bool) or not isinstance(v, numbers.Integral):
        if _is_real(v) and float(v).is_integer():
            v = int(v)
        else:
            raise ConfigError(f"expected an integer, got {v!r}", path)
    v = int(v)
    if minimum is not None and v < minimum:
        raise ConfigError(f"must be >= {minimum}, got {v}", path)
    return v


def _mapping(v, path):
    if not isinstance(v, dict):
        raise ConfigError(f"expected a mapping, got {type(v).__name__}", path)
    return dict(v)


def _reject_unknown(d, allowed, path):
    unknown = sorted(set(d) - set(allowed))
    if unknown:
        prefix = f"{path}." if path else ""
        raise ConfigError("unknown key", prefix + str(unknown[0]))


def _vector(v, path):
    if not isinstance(v, (list, tuple)) or not v:
        raise ConfigError("expected a nonempty list of numbers", path)
    return [_real(x, f"{path}[{i}]") for i, x in enumerate(v)]


def _objective(raw):
    path = "objective"
    raw = _mapping(raw, path)
    variant = raw.get("variant")
    if variant == "svmlight":
        _reject_unknown(raw, {"variant", "path", "lambda", "dim"}, path)
        if "path" not in raw or not isinstance(raw["path"], str):
            raise ConfigError("missing required key (dataset file)", f"{path}.path")
        out = {"variant": "svmlight", "path": raw["path"]}
        out["lambda"] = _real(raw.get("lambda", 1e-4), f"{path}.lambda", positive=True, allow_zero=False)
        out["dim"] = None if raw.get("dim") is None else _int(raw["dim"], f"{path}.dim", 1)
        return out
    try:
        params = synthetic_defaults(variant)
    except UsageError:
        raise ConfigError(
            f"unknown variant {variant!r}; expected quadratic, l1, svm or svmlight", f"{path}.variant"
        ) from None
    _reject_unknown(raw, {"variant", "dim", "seed", *params}, path)
    if "dim" not in raw:
        raise ConfigError("missing required key", f"{path}.dim")
    out = {"variant": variant, "dim": _int(raw["dim"], f"{path}.dim", 1)}
    out["seed"] = _int(raw.get("seed", 0), f"{path}.seed", 0)
    for key, default in params.items():
        v = raw.get(key, default)
        kp = f"{path}.{key}"
        if isinstance(default, bool):
            if not isinstance(v, bool):
                raise ConfigError(f"expected true/false, got {v!r}", kp)
            out[key] = v
        elif key == "n_examples":
            out[key] = _int(v, kp, 1)
        elif key == "lambda":
            out[key] = _real(v, kp, positive=True, allow_zero=False)
        elif key in ("margin", "flip_prob"):
            out[key] = _real(v, kp, positive=True)
            if out[key] > 1:
                raise ConfigError(f"must be in [0,1], got {v!r}", kp)
        else:
            out[key] = _real(v, kp, positive=True)
    return out


def _domain(raw, dim):
    path = "domain"
    if isinstance(raw, str):
        raw = {"kind": raw}
    raw = _mapping(raw, path)
    kind = raw.get("kind")
    if kind == "unbounded":
        _reject_unknown(raw, {"kind"}, path)
        return {"kind": "unbounded"}
    if kind == "ball":
        _reject_unknown(raw, {"kind", "radius", "center"}, path)
        if "radius" not in raw:
            raise ConfigError("missing required key", f"{path}.radius")
        r = _real(raw["radius"], f"{path}.radius", positive=True, allow_zero=False)
        center = raw.get("center")
        if center is None:
            center = None if dim is None else [0.0] * dim
        else:
            center = _vector(center, f"{path}.center")
        if dim is not None and center is not None and len(center) != dim:
            raise ConfigError(f"has {len(center)} entries, objective dim is {dim}", f"{path}.center")
        return {"kind": "ball", "radius": r, "center": center}
    if kind == "box":
        _reject_unknown(raw, {"kind", "lower", "upper"}, path)
        out = {"kind": "box"}
        for key in ("lower", "upper"):
            if key not in raw:
                raise ConfigError("missing required key", f"{path}.{key}")
            v = raw[key]
            if _is_real(v):
                v = _real(v, f"{path}.{key}")
                v = v if dim is None else [v] * dim
            else:
                v = _vector(v, f"{path}.{key}")
            if dim is not None and len(v) != dim:
                raise ConfigError(f"has {len(v)} entries, objective dim is {dim}", f"{path}.{key}")
            out[key] = v
        lo, hi = out["lower"], out["upper"]
        if isinstance(lo, list) != isinstance(hi, list):
            raise ConfigError("lower and upper must both be scalars or both be lists", path)
        if any(a > b for a, b in zip(*((lo, hi) if isinstance(lo, list) else ([lo], [hi])))):
            raise ConfigError("lower must be <= upper coordinatewise", path)
        return out
    raise ConfigError(f"unknown domain kind {kind!r}; expected unbounded, ball or box", f"{path}.kind")


def _schedule(raw):
    path = "schedule"
    if isinstance(raw, str):
        raw = {"kind": raw}
    raw = _mapping(raw, path)
    kind = raw.get("kind")
    keys = {"strongly_convex": "lambda", "general_convex": "c", "constant": "eta"}
    if kind not in keys:
        raise ConfigError(f"unknown schedule {kind!r}; expected one of {sorted(keys)}", f"{path}.kind")
    param = keys[kind]
    _reject_unknown(raw, {"kind", param}, path)
    v = raw.get(param)
    if v is None and kind == "constant":
        raise ConfigError("missing required key", f"{path}.eta")
    if v is not None:
        v = _real(v, f"{path}.{param}", positive=True, allow_zero=False)
    return {"kind": kind, param: v}


def _schemes(raw):
    if not isinstance(raw, list):
        raise ConfigError("expected a list", "schemes")
    if not raw:
        raise ConfigError("schemes must be nonempty", "schemes")
    out = []
    for i, item in enumerate(raw):
        path = f"schemes[{i}]"
        if isinstance(item, dict):
            item = dict(item)
            kind = item.pop("kind", None)
            (arg,) = item.values() if len(item) == 1 else (None,)
            if len(item) > 1:
                raise ConfigError("too many keys", path)
            item = kind if arg is None else f"{kind}({arg})"
        try:
            kind, arg = parse_scheme(item)
        except UsageError as exc:
            raise ConfigError(str(exc), path) from None
        if kind == "suffix" and not 0 < arg <= 1:
            raise ConfigError(f"alpha must be in (0,1], got {arg:g}", path)
        if kind == "polydecay" and arg < 0:
            raise ConfigError(f"eta must be >= 0, got {arg:g}", path)
        label = kind if arg is None else f"{kind}({arg:g})"
        if label in out:
            raise ConfigError(f"duplicate scheme {label!r}", path)
        out.append(label)
    return out


@dataclass
class ExperimentConfig:
    objective: Dict[str, Any]
    domain: Dict[str, Any]
    schedule: Dict[str, Any]
    schemes: List[str]
    T: int
    repetitions: int
    seed: int
    record: Dict[str, Any]
    G: Optional[float]
    bounds: List[str]
    slack: float
    reference: Dict[str, Any]
    output: Dict[str, Any]
    jobs: int
    prng: str

    def resolved_dict(self):
        return copy.deepcopy(
            {
                "objective": self.objective,
                "domain": self.domain,
                "schedule": self.schedule,
                "schemes": self.schemes,
                "T": self.T,
                "repetitions": self.repetitions,
                "seed": self.seed,
                "record": self.record,
                "G": self.G,
                "bounds": self.bounds,
                "slack": self.slack,
                "reference": self.reference,
                "output": self.output,
                "jobs": self.jobs,
                "prng": self.prng,
            }
        )

    def dump(self):
        header = (
            "# resolved configuration; every default is spelled out.\n"
            "# Loading this file reproduces the run that wrote it.\n"
        )
        return header + yaml.safe_dump(self.resolved_dict(), sort_keys=False, default_flow_style=None)


def config_from_dict(raw):
    raw = _mapping(raw if raw is not None else {}, "")
    _reject_unknown(raw, TOP_KEYS, "")
    for key in REQUIRED:
        if key not in raw:
            raise ConfigError("missing required key", key)

    objective = _objective(raw["objective"])
    dim = objective.get("dim")
    T = _int(raw["T"], "T", 2)
    repetitions = _int(raw.get("repetitions", DEFAULTS["repetitions"]), "repetitions", 1)
    seed = _int(raw.get("seed", DEFAULTS["seed"]), "seed", 0)

    record = _mapping(raw.get("record", DEFAULTS["record"]), "record")
    _reject_unknown(record, {"growth"}, "record")
    growth = _real(record.get("growth", 1.25), "record.growth")
    if growth <= 1:
        raise ConfigError(f"must be > 1, got {growth}", "record.growth")

    G = raw.get("G")
    if G is not None:
        G = _real(G, "G", positive=True, allow_zero=False)

    bounds = raw.get("bounds", [])
    if not isinstance(bounds, list):
        raise ConfigError("expected a list", "bounds")
    norm_bounds = []
    for i, b in enumerate(bounds):
        try:
            norm_bounds.append(normalize_kind(b))
        except UsageError as exc:
            raise ConfigError(str(exc), f"bounds[{i}]") from None

    reference = _mapping(raw.get("reference", DEFAULTS["reference"]), "reference")
    _reject_unknown(reference, {"steps", "eta"}, "reference")
    reference = {
        "steps": _int(reference.get("steps", 1_000_000), "reference.steps", 2),
        "eta": _real(reference.get("eta", 3), "reference.eta", positive=True),
    }

    output = _mapping(raw.get("output", DEFAULTS["output"]), "output")
    _reject_unknown(output, {"dir", "plot"}, "output")
    out_dir = output.get("dir", "results")
    if not isinstance(out_dir, str):
        raise ConfigError(f"expected a path string, got {out_dir!r}", "output.dir")
    plot = output.get("plot", True)
    if not isinstance(plot, bool):
        raise ConfigError(f"expected true/false, got {plot!r}", "output.plot")

    prng = raw.get("prng", PRNG_DESCRIPTION)
    if prng != PRNG_DESCRIPTION:
        raise ConfigError(f"unsupported PRNG {prng!r}; this build uses {PRNG_DESCRIPTION!r}", "prng")

    return ExperimentConfig(
        objective=objective,
        domain=_domain(raw.get("domain", DEFAULTS["domain"]), dim),
        schedule=_schedule(raw["schedule"]),
        schemes=_schemes(raw["schemes"]),
        T=T,
        repetitions=repetitions,
        seed=seed,
        record={"growth": growth},
        G=G,
        bounds=norm_bounds,
        slack=_real(raw.get("slack", 0.1), "slack", positive=True),
        reference=reference,
        output={"dir": out_dir, "plot": plot},
        jobs=_int(raw.get("jobs", 1), "jobs", 1),
        prng=prng,
    )


def load_config(path):
    """Read and validate a YAML experiment config."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"not valid YAML: {exc}") from None
    return config_from_dict(raw)


def build_domain(cfg_domain, dim):
    kind = cfg_domain["kind"]
    if kind == "unbounded":
        return dom.Unbounded(dim)
    if kind == "ball":
        center = cfg_domain["center"]
        return dom.L2Ball([0.0] * dim if center is None else center, cfg_domain["radius"])
    lo, hi = cfg_domain["lower"], cfg_domain["upper"]
    if not isinstance(lo, list):
        lo, hi = [lo] * dim, [hi] * dim
    return dom.Box(lo, hi)
