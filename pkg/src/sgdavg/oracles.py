"""Objectives with exact values/subgradients and seeded stochastic oracles.

Three objectives are provided:

* :class:`RegularizedHinge` -- the L2-regularised hinge-loss SVM objective,
  ``(lam/2)||w||^2 + mean_i max(0, 1 - y_i <x_i, w>)``; the oracle draws one
  training example uniformly at random.
* :class:`NoisyQuadratic` -- ``(lam/2)||w - w*||^2`` with additive noise.
* :class:`NoisyL1` -- ``||w - w*||_1`` with additive noise (convex, lam = 0).

The additive noise has a uniformly random direction and fixed magnitude
``noise_sigma``, so it contributes exactly ``noise_sigma**2`` to
``E||g_hat||^2``.

All value/subgradient methods accept a point of shape ``(d,)`` or a batch of
shape ``(n, d)``. Oracle randomness is split in two steps, ``sample_aux``
(consumes the generator) and ``subgradient_from_aux`` (deterministic), so a
run can pre-draw randomness in blocks without changing the stream.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from . import domains as dom
from ._validation import check_int, check_point, check_positive
from .exceptions import BoundUnavailableError, UsageError
from .svmlight import Dataset


def _unit_directions(rng, size, dim):
    shape = (dim,) if size is None else (size, dim)
    u = rng.standard_normal(shape)
    n = np.sqrt(np.sum(u * u, axis=-1, keepdims=True))
    # a zero draw has probability 0; guard anyway so the noise stays finite
    n = np.where(n > 0, n, 1.0)
    return u / n


@dataclass(frozen=True, eq=False)
class RegularizedHinge:
    lam: float
    data: Dataset
    witness: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "lam", check_positive(self.lam, "lambda", allow_zero=True))

    strongly_convex = True
    optimum = None

    @property
    def dim(self):
        return self.data.dim

    @property
    def strong_convexity(self):
        return self.lam

    def _value1(self, w):
        margins = self.data.y * (self.data.X @ w)
        hinge = np.maximum(0.0, 1.0 - margins).mean()
        return 0.5 * self.lam * float(w @ w) + float(hinge)

    def value(self, w):
        if w.ndim == 1:
            return self._value1(w)
        # row-by-row keeps each result independent of the batch size
        return np.array([self._value1(row) for row in w])

    def _subgradient1(self, w):
        y = self.data.y
        active = (y * (self.data.X @ w) <= 1.0).astype(float)
        return self.lam * w - (self.data.X.T @ (active * y)) / self.data.n_examples

    def subgradient(self, w):
        if w.ndim == 1:
            return self._subgradient1(w)
        return np.stack([self._subgradient1(row) for row in w])

    def sample_aux(self, rng, size=None):
        return rng.integers(0, self.data.n_examples, size=size)

    def subgradient_from_aux(self, w, idx):
        x = self.data.rows(idx)
        y = self.data.y[idx]
        margin = y * np.sum(x * w, axis=-1)
        coef = np.where(margin <= 1.0, y, 0.0)
        return self.lam * w - np.asarray(coef)[..., None] * x


@dataclass(frozen=True, eq=False)
class NoisyQuadratic:
    lam: float
    optimum: np.ndarray
    noise_sigma: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "lam", check_positive(self.lam, "lambda"))
        object.__setattr__(self, "optimum", check_point(self.optimum, name="optimum"))
        object.__setattr__(
            self, "noise_sigma", check_positive(self.noise_sigma, "noise_sigma", allow_zero=True)
        )

    @property
    def dim(self):
        return self.optimum.shape[0]

    @property
    def strong_convexity(self):
        return self.lam

    def value(self, w):
        diff = w - self.optimum
        return 0.5 * self.lam * np.sum(diff * diff, axis=-1)

    def subgradient(self, w):
        return self.lam * (w - self.optimum)

    def sample_aux(self, rng, size=None):
        if self.noise_sigma == 0:
            return np.zeros((self.dim,) if size is None else (size, self.dim))
        return self.noise_sigma * _unit_directions(rng, size, self.dim)

    def subgradient_from_aux(self, w, noise):
        return self.subgradient(w) + noise


@dataclass(frozen=True, eq=False)
class NoisyL1:
    optimum: np.ndarray
    noise_sigma: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "optimum", check_point(self.optimum, name="optimum"))
        object.__setattr__(
            self, "noise_sigma", check_positive(self.noise_sigma, "noise_sigma", allow_zero=True)
        )

    strong_convexity = 0.0

    @property
    def dim(self):
        return self.optimum.shape[0]

    def value(self, w):
        return np.sum(np.abs(w - self.optimum), axis=-1)

    def subgradient(self, w):
        # np.sign(0) == 0, a valid element of [-1, 1] at the kink
        return np.sign(w - self.optimum)

    sample_aux = NoisyQuadratic.sample_aux
    subgradient_from_aux = NoisyQuadratic.subgradient_from_aux


@dataclass(frozen=True)
class OracleDraw:
    subgradient: np.ndarray
    aux: Any


def _check_w(obj, w):
    return check_point(w, dim=obj.dim, name="w")


def objective_value(obj, w):
    """Exact F(w); deterministic, the oracle noise never enters it."""
    w = _check_w(obj, w)
    v = obj.value(w)
    return float(v) if np.ndim(v) == 0 else v


def full_subgradient(obj, w):
    """An element of the subdifferential of F at ``w``."""
    return obj.subgradient(_check_w(obj, w))


def stochastic_subgradient(obj, w, rng):
    """One oracle call: an unbiased random subgradient at ``w``."""
    w = _check_w(obj, w)
    aux = obj.sample_aux(rng)
    return OracleDraw(obj.subgradient_from_aux(w, aux), aux)


def oracle_norm_bound(obj, domain):
    """A G with ``E||g_hat||^2 <= G^2`` for every query point in ``domain``.

    The values are conservative closed forms, not suprema.
    """
    if isinstance(obj, NoisyL1):
        return math.sqrt(obj.dim + obj.noise_sigma**2)
    if isinstance(domain, dom.Unbounded):
        raise BoundUnavailableError("G unavailable; supply G in config")
    if isinstance(obj, NoisyQuadratic):
        if dom.contains(domain, obj.optimum):
            reach = dom.diameter(domain)
        else:
            reach = dom.max_distance_from(domain, obj.optimum)
        return math.sqrt((obj.lam * reach) ** 2 + obj.noise_sigma**2)
    if isinstance(obj, RegularizedHinge):
        w_max = dom.max_distance_from(domain, np.zeros(obj.dim))
        return obj.lam * w_max + float(np.max(obj.data.row_norms))
    raise UsageError(f"unsupported objective {type(obj).__name__}")


# -- synthetic problem generation -------------------------------------------

_SYNTH_DEFAULTS = {
    "quadratic": {"lambda": 1.0, "noise_sigma": 0.0, "optimum_radius": 1.0, "optimum_on_sphere": False},
    "l1": {"noise_sigma": 0.0, "optimum_radius": 1.0, "optimum_on_sphere": False},
    "svm": {"lambda": 1e-4, "n_examples": 1000, "margin": 0.1, "flip_prob": 0.0},
}


def synthetic_defaults(variant):
    if variant not in _SYNTH_DEFAULTS:
        raise UsageError(f"unknown synthetic variant {variant!r}; expected one of {sorted(_SYNTH_DEFAULTS)}")
    return dict(_SYNTH_DEFAULTS[variant])


def _place_optimum(rng, dim, radius, on_sphere):
    direction = _unit_directions(rng, None, dim)
    r = radius if on_sphere else radius * rng.random() ** (1.0 / dim)
    return r * direction


def separable_dataset(n, dim, margin, flip_prob, rng):
    """Points on the unit sphere separated by a random hyperplane.

    Each point is ``s*m*u + sqrt(1-m^2)*v`` with ``u`` the unit witness
    normal, ``v`` a unit vector orthogonal to ``u`` and ``m`` uniform in
    ``[margin, 1]``, so ``|<u, x>| >= margin`` by construction. Labels are
    ``s`` flipped independently with probability ``flip_prob``.
    """
    u = _unit_directions(rng, None, dim)
    s = np.where(rng.random(n) < 0.5, -1.0, 1.0)
    if dim == 1:
        X = s[:, None] * u
    else:
        m = rng.uniform(margin, 1.0, size=n)
        g = rng.standard_normal((n, dim))
        g -= (g @ u)[:, None] * u
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        X = (s * m)[:, None] * u + np.sqrt(1.0 - m * m)[:, None] * g
    flip = rng.random(n) < flip_prob
    y = np.where(flip, -s, s)
    return Dataset.from_dense(X, y), u


def generate_synthetic(spec):
    """Build a seeded synthetic objective.

    ``spec`` is a mapping with ``variant`` ("quadratic", "l1" or "svm"),
    ``dim``, ``seed`` and optional variant parameters (see
    :func:`synthetic_defaults`). The result depends only on ``spec``.
    """
    spec = dict(spec)
    variant = spec.pop("variant", None)
    params = synthetic_defaults(variant)
    dim = check_int(spec.pop("dim", None), "dim", minimum=1)
    seed = check_int(spec.pop("seed", 0), "seed", minimum=0)
    unknown = set(spec) - set(params)
    if unknown:
        raise UsageError(f"unknown parameters for {variant!r}: {sorted(unknown)}")
    params.update(spec)
    rng = np.random.default_rng(seed)

    if variant == "svm":
        n = check_int(params["n_examples"], "n_examples", minimum=1)
        margin = float(params["margin"])
        flip = float(params["flip_prob"])
        if not 0 <= margin <= 1:
            raise UsageError(f"margin must be in [0,1], got {margin}")
        if not 0 <= flip <= 1:
            raise UsageError(f"flip_prob must be in [0,1], got {flip}")
        data, witness = separable_dataset(n, dim, margin, flip, rng)
        return RegularizedHinge(params["lambda"], data, witness=witness)

    radius = check_positive(params["optimum_radius"], "optimum_radius", allow_zero=True)
    opt = _place_optimum(rng, dim, radius, bool(params["optimum_on_sphere"]))
    if variant == "quadratic":
        return NoisyQuadratic(params["lambda"], opt, params["noise_sigma"])
    return NoisyL1(opt, params["noise_sigma"])


# -- reference optimum -------------------------------------------------------


@dataclass(frozen=True)
class Reference:
    """F_ref with the tolerance within which the true minimum is known."""

    value: float
    tolerance: float = 0.0
    point: Optional[np.ndarray] = None
    G: Optional[float] = None


def reference_optimum(obj, domain=None, steps=10**6, eta=3.0, G=None):
    """Minimum value of ``obj`` over ``domain``.

    Closed form for the noisy quadratic and L1 objectives. For the hinge
    objective, runs deterministic full-subgradient descent with step
    ``1/(lam t)`` for ``steps`` iterations and polynomial-decay averages the
    iterates (parameter ``eta``); the tolerance is the last-iterate strongly
    convex bound at ``steps`` with the given or derived ``G``.
    """
    from .analysis import theoretical_bound

    domain = dom.Unbounded() if domain is None else domain
    if isinstance(obj, (NoisyQuadratic, NoisyL1)):
        if dom.contains(domain, obj.optimum):
            return Reference(0.0, 0.0, obj.optimum)
        if isinstance(obj, NoisyQuadratic):
            p = dom.project(domain, obj.optimum)
            return Reference(float(obj.value(p)), 0.0, p)
        raise UsageError("no closed-form reference for an L1 optimum outside the domain")

    if obj.lam <= 0:
        raise UsageError("reference optimum needs lambda > 0")
    steps = check_int(steps, "steps", minimum=2)
    if G is None:
        if isinstance(domain, dom.Unbounded):
            # iterates of 1/(lam t) descent stay in the ball of radius max||x||/lam
            G = 2.0 * float(np.max(obj.data.row_norms))
        else:
            G = oracle_norm_bound(obj, domain)

    Xd, y, m, lam = obj.data.dense, obj.data.y, obj.data.n_examples, obj.lam
    XT = np.ascontiguousarray(Xd.T)
    w = np.zeros(obj.dim)
    avg = np.zeros(obj.dim)
    for t in range(1, steps + 1):
        c = (eta + 1.0) / (t + eta)
        avg = (1.0 - c) * avg + c * w
        active = (y * (Xd @ w) <= 1.0) * y
        g = lam * w - (XT @ active) / m
        w = dom.project(domain, w - g / (lam * t))
    value = obj.value(avg)
    tol = theoretical_bound("last_strongly_convex", {"G": G, "lam": lam}, steps)
    return Reference(float(value), float(tol), avg, float(G))
