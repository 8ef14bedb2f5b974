"""Projected stochastic subgradient descent with pluggable averaging observers.

One step is ``w_{t+1} = project(W, w_t - eta_t * g_hat_t)`` starting from
``w_1 = 0``. Observers see ``w_t`` before the update, so they average exactly
``w_1, ..., w_T``.

Repetitions can be run as one vectorised batch. Each repetition owns a
``numpy.random.Generator`` seeded from ``(master_seed, index)`` and its
oracle randomness is drawn in fixed-size blocks from that generator alone,
so a repetition produces the same numbers whether it runs alone, in a batch
or in another process.
"""

import math
import re
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from . import domains as dom
from ._validation import check_int, check_point, check_positive
from .averaging import LastIterate, PolyDecayAverage, SuffixAverage, SuffixBank, UniformAverage
from .exceptions import UsageError
from .oracles import Reference, reference_optimum

# -- step sizes ---------------------------------------------------------------


@dataclass(frozen=True)
class StronglyConvex:
    """``eta_t = 1 / (lam t)``. A step ``c/(lam t)`` is ``StronglyConvex(lam / c)``."""

    lam: float

    def __post_init__(self):
        object.__setattr__(self, "lam", check_positive(self.lam, "lambda"))


@dataclass(frozen=True)
class GeneralConvex:
    """``eta_t = c / sqrt(t)``."""

    c: float

    def __post_init__(self):
        object.__setattr__(self, "c", check_positive(self.c, "c"))


@dataclass(frozen=True)
class Constant:
    eta: float

    def __post_init__(self):
        object.__setattr__(self, "eta", check_positive(self.eta, "eta"))


def step_size(schedule, t):
    if t < 1:
        raise UsageError(f"t must be >= 1, got {t}")
    if isinstance(schedule, StronglyConvex):
        return 1.0 / (schedule.lam * t)
    if isinstance(schedule, GeneralConvex):
        return schedule.c / math.sqrt(t)
    if isinstance(schedule, Constant):
        return schedule.eta
    raise UsageError(f"unsupported schedule {schedule!r}")


def sgd_step(w, g_hat, eta, domain):
    """One projected step ``project(domain, w - eta * g_hat)``."""
    w = np.asarray(w, dtype=float)
    g_hat = np.asarray(g_hat, dtype=float)
    if w.shape != g_hat.shape:
        raise UsageError(f"dimension mismatch: w {w.shape} vs g_hat {g_hat.shape}")
    if eta < 0:
        raise UsageError(f"step size must be >= 0, got {eta}")
    return dom.project(domain, w - eta * g_hat)


# -- seeding ------------------------------------------------------------------

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
PRNG_DESCRIPTION = "numpy PCG64; repetition seed = splitmix64(master_seed + (index + 1) * 0x9E3779B97F4A7C15 mod 2^64)"


def splitmix64(x):
    """The splitmix64 output finaliser applied to a 64-bit state."""
    z = x & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def repetition_seed(master_seed, index):
    """Seed of repetition ``index``: output ``index + 1`` of splitmix64 seeded with ``master_seed``."""
    return splitmix64((int(master_seed) + (int(index) + 1) * _GOLDEN) & _MASK64)


def make_rng(seed):
    return np.random.Generator(np.random.PCG64(int(seed) & _MASK64))


# -- run configuration and records --------------------------------------------


def default_record_points(T, growth=1.25):
    """``{floor(growth^k)} ∩ [1, T]`` plus ``T``, sorted and deduplicated."""
    T = check_int(T, "T", minimum=1)
    if growth <= 1:
        raise UsageError(f"record grid growth must be > 1, got {growth}")
    pts = {T}
    k = 0
    while True:
        p = math.floor(growth**k)
        if p > T:
            break
        pts.add(p)
        k += 1
    return tuple(sorted(pts))


@dataclass(frozen=True)
class RunConfig:
    T: int
    schedule: object
    domain: object = field(default_factory=dom.Unbounded)
    seed: int = 0
    record_points: Optional[Tuple[int, ...]] = None
    w1: Optional[np.ndarray] = None

    def __post_init__(self):
        T = check_int(self.T, "T", minimum=2)
        object.__setattr__(self, "T", T)
        pts = default_record_points(T) if self.record_points is None else self.record_points
        pts = tuple(int(p) for p in pts)
        if not pts or any(b <= a for a, b in zip(pts, pts[1:])):
            raise UsageError("record_points must be nonempty and strictly increasing")
        if pts[0] < 1 or pts[-1] > T:
            raise UsageError(f"record_points must lie in [1, {T}]")
        object.__setattr__(self, "record_points", pts)


@dataclass(frozen=True, eq=False)
class RunRecord:
    """Suboptimality ``F(candidate) - F_ref`` of every scheme at every record point."""

    seed: int
    record_points: Tuple[int, ...]
    subopt: Dict[str, np.ndarray]
    final: Dict[str, np.ndarray]
    dist2: Optional[np.ndarray] = None
    reference_tolerance: float = 0.0
    feasible: bool = True

    def same_as(self, other):
        """Bitwise equality of every recorded number."""
        if self.record_points != other.record_points or set(self.subopt) != set(other.subopt):
            return False
        arrays = [(self.subopt[k], other.subopt[k]) for k in self.subopt]
        arrays += [(self.final[k], other.final[k]) for k in self.final]
        if (self.dist2 is None) != (other.dist2 is None):
            return False
        if self.dist2 is not None:
            arrays.append((self.dist2, other.dist2))
        return all(np.array_equal(a, b, equal_nan=True) for a, b in arrays)


# -- schemes ------------------------------------------------------------------

_SCHEME_RE = re.compile(r"^\s*(last|uniform|suffix|polydecay)\s*(?:\(\s*([^)]*)\s*\))?\s*$")


def parse_scheme(label):
    """``"suffix(0.5)"`` -> ``("suffix", 0.5)``; ``"last"`` -> ``("last", None)``."""
    m = _SCHEME_RE.match(str(label))
    if not m:
        raise UsageError(f"unknown scheme {label!r}")
    kind, arg = m.group(1), m.group(2)
    if kind in ("last", "uniform"):
        if arg:
            raise UsageError(f"scheme {kind!r} takes no parameter")
        return kind, None
    if not arg:
        raise UsageError(f"scheme {kind!r} needs a parameter, e.g. {kind}(0.5)")
    try:
        value = float(arg)
    except ValueError:
        raise UsageError(f"bad parameter in scheme {label!r}") from None
    return kind, value


def make_observer(label, record_points):
    """Fresh averaging state for a scheme label; suffix averages every checkpoint horizon."""
    kind, arg = parse_scheme(label)
    if kind == "last":
        return LastIterate()
    if kind == "uniform":
        return UniformAverage()
    if kind == "polydecay":
        return PolyDecayAverage(arg)
    return SuffixBank(arg, record_points)


# -- the loop -----------------------------------------------------------------


class _AuxStream:
    """Per-repetition oracle randomness, drawn in blocks of a size fixed by the dimension."""

    def __init__(self, obj, rngs, batched):
        self.obj = obj
        self.rngs = rngs
        self.batched = batched
        self.block = int(max(16, min(2048, 16384 // max(1, obj.dim))))
        self._buf = None
        self._k = self.block

    def next(self):
        if self._k == self.block:
            if self.batched:
                self._buf = np.stack([self.obj.sample_aux(r, self.block) for r in self.rngs], axis=1)
            else:
                self._buf = self.obj.sample_aux(self.rngs[0], self.block)
            self._k = 0
        out = self._buf[self._k]
        self._k += 1
        return out


def _snapshot(obs, t):
    if isinstance(obs, SuffixBank):
        return obs.candidate_at(t)
    if isinstance(obs, SuffixAverage) and not obs.ready:
        return None
    return obs.candidate()


def _check_observers(observers, config):
    for label, obs in observers.items():
        if isinstance(obs, SuffixAverage) and obs.T != config.T:
            raise UsageError(f"observer {label!r} was built for T={obs.T}, run has T={config.T}")
        if isinstance(obs, SuffixBank):
            missing = set(config.record_points) - set(obs.members)
            if missing:
                raise UsageError(f"observer {label!r} lacks horizons {sorted(missing)[:5]}")
        if obs.t != 0:
            raise UsageError(f"observer {label!r} has already been updated")


def _loop(obj, config, observers, rngs, batched, reference):
    _check_observers(observers, config)
    d = obj.dim
    if config.domain.dim is not None and config.domain.dim != d:
        raise UsageError(f"domain dimension {config.domain.dim} != objective dimension {d}")
    w1 = np.zeros(d) if config.w1 is None else check_point(config.w1, dim=d, name="w1")
    w = dom.project(config.domain, w1)
    n = len(rngs)
    if batched:
        w = np.tile(w, (n, 1))
    opt = reference.point
    stream = _AuxStream(obj, rngs, batched)
    pts = config.record_points
    shape = (len(pts), n) if batched else (len(pts),)
    subopt = {label: np.full(shape, np.nan) for label in observers}
    dist2 = np.full(shape, np.nan) if opt is not None else None
    feasible = np.ones(n if batched else (), dtype=bool)
    nxt, T = 0, config.T

    for t in range(1, T + 1):
        g = obj.subgradient_from_aux(w, stream.next())
        for obs in observers.values():
            obs.update(w)
        if t == pts[nxt]:
            for label, obs in observers.items():
                cand = _snapshot(obs, t)
                if cand is not None:
                    subopt[label][nxt] = obj.value(cand) - reference.value
            if dist2 is not None:
                diff = w - opt
                dist2[nxt] = np.sum(diff * diff, axis=-1)
            feasible &= dom.contains(config.domain, w, tol=1e-9)
            nxt = min(nxt + 1, len(pts) - 1)
        if t < T:
            w = dom._project(config.domain, w - step_size(config.schedule, t) * g)

    final = {}
    for label, obs in observers.items():
        try:
            final[label] = _snapshot(obs, T)
        except UsageError:
            final[label] = None
    return subopt, dist2, final, feasible


def _resolve_reference(obj, config, reference):
    if reference is None:
        reference = reference_optimum(obj, config.domain)
    elif not isinstance(reference, Reference):
        reference = Reference(float(reference))
    return reference


def run_sgd(obj, config, observers, reference=None):
    """Run one seeded SGD trajectory, feeding ``w_1..w_T`` to ``observers``.

    ``observers`` is a mapping ``label -> averager`` (or a sequence of
    averagers, keyed by their labels). ``reference`` is the value used as
    ``F(w*)``; by default it is computed with :func:`reference_optimum`.
    """
    if not isinstance(observers, dict):
        observers = {obs.label: obs for obs in observers}
    reference = _resolve_reference(obj, config, reference)
    subopt, dist2, final, feasible = _loop(
        obj, config, observers, [make_rng(config.seed)], False, reference
    )
    return RunRecord(
        config.seed, config.record_points, subopt, final, dist2, reference.tolerance, bool(feasible)
    )


def run_repetitions(obj, config, schemes: Sequence[str], seeds, reference=None):
    """Run one trajectory per seed as a single vectorised batch.

    Returns a list of :class:`RunRecord` in the order of ``seeds``; each is
    bitwise identical to ``run_sgd`` with that seed and the same schemes.
    """
    seeds = [int(s) for s in seeds]
    if not seeds:
        return []
    reference = _resolve_reference(obj, config, reference)
    observers = {label: make_observer(label, config.record_points) for label in schemes}
    observers = {obs.label: obs for obs in observers.values()}
    rngs = [make_rng(s) for s in seeds]
    subopt, dist2, final, feasible = _loop(obj, config, observers, rngs, True, reference)
    records = []
    for i, s in enumerate(seeds):
        records.append(
            RunRecord(
                s,
                config.record_points,
                {k: v[:, i].copy() for k, v in subopt.items()},
                {k: (None if v is None else v[i].copy()) for k, v in final.items()},
                None if dist2 is None else dist2[:, i].copy(),
                reference.tolerance,
                bool(feasible[i]),
            )
        )
    return records
