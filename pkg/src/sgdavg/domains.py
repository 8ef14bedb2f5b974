"""Feasible sets and Euclidean projection onto them.

Every function accepts either a single point of shape ``(d,)`` or a batch of
points of shape ``(n, d)``; the last axis is always the coordinate axis.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Union

import numpy as np

from ._validation import check_point, check_positive
from .exceptions import UsageError

# Relative slack under which a ball point counts as inside. Keeps projection
# idempotent bit-for-bit: a rescaled point whose norm rounds to r(1+ulp) must
# not be rescaled a second time.
_BALL_SLACK = 1e-14


@dataclass(frozen=True)
class Unbounded:
    """The whole space R^d. ``dim`` is optional and only used for checks."""

    dim: Optional[int] = None


@dataclass(frozen=True)
class L2Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", check_point(self.center, name="center"))
        object.__setattr__(self, "radius", check_positive(self.radius, "radius"))
        if self.center.ndim != 1:
            raise UsageError("center must be a 1-d vector")

    @classmethod
    def centered(cls, dim, radius):
        return cls(np.zeros(dim), radius)

    @property
    def dim(self):
        return self.center.shape[0]

    @cached_property
    def _inside_limit(self):
        return self.radius * (1 + _BALL_SLACK) + _BALL_SLACK * float(np.max(np.abs(self.center)))


@dataclass(frozen=True)
class Box:
    lower: np.ndarray
    upper: np.ndarray = field()

    def __post_init__(self):
        lo = check_point(self.lower, name="lower")
        hi = check_point(self.upper, dim=lo.shape[-1], name="upper")
        if lo.ndim != 1:
            raise UsageError("box bounds must be 1-d vectors")
        if np.any(lo > hi):
            raise UsageError("box requires lower <= upper coordinatewise")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self):
        return self.lower.shape[0]


Domain = Union[Unbounded, L2Ball, Box]


def _norm(x):
    return np.sqrt(np.sum(x * x, axis=-1))


def _check_against(domain, p):
    p = check_point(p)
    if domain.dim is not None and p.shape[-1] != domain.dim:
        raise UsageError(
            f"dimension mismatch: point has {p.shape[-1]} coordinates, "
            f"domain has {domain.dim}"
        )
    return p


def project(domain, p):
    """Euclidean projection of ``p`` onto ``domain``."""
    return _project(domain, _check_against(domain, p))


def _project(domain, p):
    if isinstance(domain, Unbounded):
        return p
    if isinstance(domain, Box):
        return np.clip(p, domain.lower, domain.upper)
    if isinstance(domain, L2Ball):
        diff = p - domain.center
        n = _norm(diff)
        r = domain.radius
        outside = np.asarray(n > domain._inside_limit)
        if not outside.any():
            return p
        scale = r / np.where(outside, n, 1.0)
        return np.where(outside[..., None], domain.center + diff * scale[..., None], p)
    raise UsageError(f"unsupported domain {domain!r}")


def diameter(domain):
    """Largest distance between two points of the domain (``inf`` if unbounded)."""
    if isinstance(domain, Unbounded):
        return float("inf")
    if isinstance(domain, L2Ball):
        return 2.0 * domain.radius
    if isinstance(domain, Box):
        return float(_norm(domain.upper - domain.lower))
    raise UsageError(f"unsupported domain {domain!r}")


def contains(domain, p, tol=1e-12):
    """Membership test with absolute tolerance ``tol``; vectorised over batches."""
    p = _check_against(domain, p)
    if isinstance(domain, Unbounded):
        return np.ones(p.shape[:-1], dtype=bool) if p.ndim > 1 else True
    if isinstance(domain, Box):
        ok = np.all((p >= domain.lower - tol) & (p <= domain.upper + tol), axis=-1)
    else:
        ok = _norm(p - domain.center) <= domain.radius + tol
    return ok if p.ndim > 1 else bool(ok)


def max_distance_from(domain, point):
    """sup over w in the domain of ||w - point||."""
    point = _check_against(domain, point)
    if isinstance(domain, Unbounded):
        return float("inf")
    if isinstance(domain, L2Ball):
        return float(_norm(domain.center - point)) + domain.radius
    far = np.maximum(np.abs(point - domain.lower), np.abs(domain.upper - point))
    return float(_norm(far))


def sample(domain, rng, n):
    """Draw ``n`` points uniformly from a bounded domain."""
    if isinstance(domain, L2Ball):
        d = domain.dim
        u = rng.standard_normal((n, d))
        u /= _norm(u)[:, None]
        r = domain.radius * rng.random(n) ** (1.0 / d)
        return domain.center + u * r[:, None]
    if isinstance(domain, Box):
        return rng.uniform(domain.lower, domain.upper, size=(n, domain.dim))
    raise UsageError("cannot sample from an unbounded domain")
