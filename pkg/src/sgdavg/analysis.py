"""Closed-form error bounds, log-log rate fits and Monte Carlo aggregation.

All logarithms are natural logarithms.
"""

import math
import warnings
from dataclasses import dataclass, fields
from typing import Dict, Optional, Tuple

import numpy as np

from .averaging import suffix_start
from .exceptions import UsageError

BOUND_KINDS = ("last_strongly_convex", "last_convex", "suffix", "polydecay")

_KIND_ALIASES = {
    "laststronglyconvex": "last_strongly_convex",
    "lastconvex": "last_convex",
    "suffix": "suffix",
    "polydecay": "polydecay",
}


def normalize_kind(kind):
    key = str(kind).replace("_", "").replace("-", "").lower()
    try:
        return _KIND_ALIASES[key]
    except KeyError:
        raise UsageError(f"unknown bound kind {kind!r}; expected one of {BOUND_KINDS}") from None


@dataclass(frozen=True)
class BoundParams:
    """Constants entering the bounds. Only the fields a bound uses are required."""

    G: Optional[float] = None
    lam: Optional[float] = None
    D: Optional[float] = None
    c: Optional[float] = None
    alpha: Optional[float] = None
    eta: Optional[float] = None

    @classmethod
    def coerce(cls, params):
        if isinstance(params, cls):
            return params
        params = dict(params)
        if "lambda" in params:
            params["lam"] = params.pop("lambda")
        names = {f.name for f in fields(cls)}
        unknown = set(params) - names
        if unknown:
            raise UsageError(f"unknown bound parameters {sorted(unknown)}")
        return cls(**params)


def _need(params, name, hypothesis, positive=True):
    v = getattr(params, name)
    if v is None:
        raise UsageError(f"missing parameter {name!r} ({hypothesis})")
    v = float(v)
    if not math.isfinite(v) or (v <= 0 if positive else v < 0):
        raise UsageError(f"hypothesis violated: {hypothesis}, got {name}={v!r}")
    return v


def theoretical_bound(kind, params, T):
    """Expected-suboptimality bound after ``T`` SGD steps for one scheme.

    ``last_strongly_convex``: 17 G^2 (1 + log T) / (lam T)
    ``last_convex``:          (D^2/c + c G^2)(2 + log T) / sqrt(T)
    ``suffix``:               17 G^2 (1 + log(1/min(a, 1 + 1/T - a))) / (lam T)
    ``polydecay``:            58 (1 + eta/T)(eta(eta+1) + (eta+.5)^3 (1+log T)/T) G^2 / (lam T)

    For the suffix bound ``a`` is the effective fraction ``count / T`` of
    iterates averaged, which equals ``alpha`` whenever ``alpha T`` is an integer.
    """
    kind = normalize_kind(kind)
    p = BoundParams.coerce(params)
    if isinstance(T, bool) or int(T) != T or T < 2:
        raise UsageError(f"T must be an integer >= 2, got {T!r}")
    T = int(T)
    logT = math.log(T)
    G = _need(p, "G", "oracle second moment bounded by G^2")

    if kind == "last_convex":
        D = _need(p, "D", "finite domain diameter D")
        c = _need(p, "c", "step sizes c/sqrt(t) with c > 0")
        return (D * D / c + c * G * G) * (2.0 + logT) / math.sqrt(T)

    lam = _need(p, "lam", "lambda-strong convexity with lambda > 0")
    if kind == "last_strongly_convex":
        return 17.0 * G * G * (1.0 + logT) / (lam * T)
    if kind == "suffix":
        alpha = p.alpha
        if alpha is None or not 0 < alpha <= 1:
            raise UsageError(f"hypothesis violated: alpha must be in (0,1], got {alpha!r}")
        a = (T - suffix_start(T, alpha) + 1) / T
        m = min(a, (1.0 + 1.0 / T) - a)
        return 17.0 * G * G * (1.0 + math.log(1.0 / m)) / (lam * T)
    eta = p.eta
    if eta is None or float(eta) != int(eta) or eta < 1:
        raise UsageError(f"hypothesis violated: eta must be an integer >= 1, got {eta!r}")
    eta = int(eta)
    return (
        58.0
        * (1.0 + eta / T)
        * (eta * (eta + 1) + (eta + 0.5) ** 3 * (1.0 + logT) / T)
        * G * G / (lam * T)
    )


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    r_squared: float
    window: Tuple[float, float]
    n_points: int


def fit_rate(points, window=(10, math.inf)):
    """Least-squares fit of log(error) against log(t).

    ``points`` is a sequence of ``(t, mean_error)`` pairs; only those with
    ``window[0] <= t <= window[1]`` are used, and ``window[0]`` is raised to
    10 if lower. Nonpositive errors are dropped with a warning.
    """
    lo, hi = max(10.0, float(window[0])), float(window[1])
    pts = np.asarray(list(points), dtype=float).reshape(-1, 2)
    pts = pts[(pts[:, 0] >= lo) & (pts[:, 0] <= hi)]
    bad = ~(pts[:, 1] > 0)
    if bad.any():
        warnings.warn(f"dropping {int(bad.sum())} nonpositive point(s) from the rate fit", stacklevel=2)
        pts = pts[~bad]
    if len(pts) < 5:
        raise UsageError(f"rate fit needs at least 5 usable points, got {len(pts)}")
    x, y = np.log(pts[:, 0]), np.log(pts[:, 1])
    xc, yc = x - x.mean(), y - y.mean()
    sxx = float(xc @ xc)
    if sxx == 0:
        raise UsageError("rate fit needs at least two distinct t values")
    slope = float(xc @ yc) / sxx
    intercept = float(y.mean() - slope * x.mean())
    resid = yc - slope * xc
    syy = float(yc @ yc)
    r2 = 1.0 if syy == 0 else max(0.0, 1.0 - float(resid @ resid) / syy)
    return RateFit(slope, intercept, r2, (float(pts[0, 0]), float(pts[-1, 0])), len(pts))


@dataclass(frozen=True, eq=False)
class Aggregate:
    """Pointwise Monte Carlo statistics over repetitions.

    ``std`` is the sample standard deviation (ddof=1) and is NaN when there
    is a single repetition.
    """

    record_points: np.ndarray
    mean: Dict[str, np.ndarray]
    std: Dict[str, np.ndarray]
    count: int
    dist2_mean: Optional[np.ndarray] = None

    @property
    def schemes(self):
        return tuple(self.mean)

    def curve(self, scheme):
        return list(zip(self.record_points.tolist(), self.mean[scheme].tolist()))


def aggregate(records):
    """Combine run records sharing the same record points and schemes."""
    records = list(records)
    if not records:
        raise UsageError("aggregate needs at least one record")
    first = records[0]
    pts = np.asarray(first.record_points)
    for r in records[1:]:
        if not np.array_equal(np.asarray(r.record_points), pts):
            raise UsageError("records have mismatched record points")
        if set(r.subopt) != set(first.subopt):
            raise UsageError("records have mismatched scheme sets")
    n = len(records)
    mean, std = {}, {}
    for scheme in first.subopt:
        vals = np.stack([r.subopt[scheme] for r in records])
        mean[scheme] = vals.mean(axis=0)
        std[scheme] = vals.std(axis=0, ddof=1) if n > 1 else np.full(len(pts), np.nan)
    dist2 = None
    if all(r.dist2 is not None for r in records):
        dist2 = np.stack([r.dist2 for r in records]).mean(axis=0)
    return Aggregate(pts, mean, std, n, dist2)


def scheme_for_kind(kind, params):
    kind = normalize_kind(kind)
    p = BoundParams.coerce(params)
    if kind.startswith("last"):
        return "last"
    if kind == "suffix":
        return f"suffix({p.alpha:g})"
    return f"polydecay({p.eta:g})"


@dataclass(frozen=True)
class ComplianceRow:
    t: int
    bound: float
    mean: float
    passed: bool


@dataclass(frozen=True)
class ComplianceReport:
    kind: str
    scheme: str
    slack: float
    rows: Tuple[ComplianceRow, ...]

    @property
    def passed(self):
        return all(r.passed for r in self.rows)

    def bound_at(self, t):
        for r in self.rows:
            if r.t == t:
                return r.bound
        return None


def check_bound_compliance(agg, kind, params, slack=0.1, scheme=None, T=None):
    """Compare Monte Carlo means with ``(1 + slack) * bound`` pointwise.

    The bounds hold in expectation, so only the mean over repetitions is
    tested. ``T`` restricts the check to specific record points (default:
    every record point >= 2). ``scheme`` defaults to the scheme the bound
    describes.
    """
    kind = normalize_kind(kind)
    if slack < 0:
        raise UsageError(f"slack must be >= 0, got {slack}")
    scheme = scheme or scheme_for_kind(kind, params)
    if scheme not in agg.mean:
        raise UsageError(f"scheme {scheme!r} not present in the aggregate")
    pts = [int(t) for t in agg.record_points]
    wanted = [t for t in pts if t >= 2] if T is None else [int(t) for t in T]
    index = {t: i for i, t in enumerate(pts)}
    rows = []
    for t in wanted:
        if t not in index:
            raise UsageError(f"T={t} is not a record point")
        bound = theoretical_bound(kind, params, t)
        m = float(agg.mean[scheme][index[t]])
        rows.append(ComplianceRow(t, bound, m, bool(m <= (1.0 + slack) * bound)))
    return ComplianceReport(kind, scheme, float(slack), tuple(rows))
