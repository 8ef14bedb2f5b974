"""Online iterate-combination schemes.

Each averager consumes the iterates ``w_1, w_2, ...`` one at a time through
``update`` and exposes its current output through ``candidate``. Iterates
may be single points or batches with one row per independent run; all
arithmetic is elementwise, so a batched row is bit-identical to the same run
processed on its own.
"""

import math

import numpy as np

from ._validation import check_alpha, check_int, check_positive
from .exceptions import UsageError


class _Averager:
    label = None

    def __init__(self):
        self.t = 0

    def _check(self, w):
        w = np.asarray(w, dtype=float)
        ref = getattr(self, "_shape", None)
        if ref is None:
            self._shape = w.shape
        elif w.shape != ref:
            raise UsageError(f"dimension mismatch: got shape {w.shape}, expected {ref}")
        return w

    def candidate(self):
        if self.t == 0:
            raise UsageError(f"{self.label}: candidate requested before any update")
        return self._candidate()

    def __repr__(self):
        return f"{type(self).__name__}(label={self.label!r}, t={self.t})"


class LastIterate(_Averager):
    label = "last"

    def update(self, w):
        self.current = self._check(w)
        self.t += 1
        return self

    def _candidate(self):
        return self.current


class PolyDecayAverage(_Averager):
    """Polynomial-decay averaging with parameter ``eta >= 0``.

    ``mean_t = (1 - c_t) mean_{t-1} + c_t w_t`` with ``c_t = (eta+1)/(t+eta)``.
    ``c_1 = 1``, so the first update returns ``w_1`` for every ``eta``; with
    ``eta = 0`` this is the plain running mean. Larger ``eta`` shifts weight
    towards recent iterates.
    """

    def __init__(self, eta=3.0):
        super().__init__()
        self.eta = check_positive(eta, "eta", allow_zero=True)
        self.mean = 0.0

    @property
    def label(self):
        return f"polydecay({self.eta:g})"

    def _coef(self):
        return (self.eta + 1.0) / (self.t + self.eta)

    def update(self, w):
        w = self._check(w)
        self.t += 1
        c = self._coef()
        self.mean = (1.0 - c) * self.mean + c * w
        return self

    def _candidate(self):
        return self.mean


class UniformAverage(PolyDecayAverage):
    """Arithmetic mean of every iterate seen so far."""

    label = "uniform"

    def __init__(self):
        super().__init__(eta=0.0)

    def _coef(self):
        return 1.0 / self.t


def suffix_start(T, alpha):
    """First index averaged by alpha-suffix averaging over horizon ``T``.

    ``floor((1 - alpha) T) + 1``; for integer ``alpha T`` this averages
    exactly the last ``alpha T`` iterates.
    """
    k = (1.0 - alpha) * T
    # absorb representation error, e.g. (1 - 0.3) * 10 = 7.000000000000001
    kr = round(k)
    if abs(k - kr) <= 1e-9 * max(1.0, T):
        k = kr
    return int(math.floor(k)) + 1


class SuffixAverage(_Averager):
    """Mean of the last ``alpha T`` iterates for a horizon ``T`` fixed upfront."""

    def __init__(self, alpha, T):
        super().__init__()
        self.alpha = check_alpha(alpha)
        self.T = check_int(T, "T", minimum=1)
        self.start = suffix_start(self.T, self.alpha)
        self.sum = 0.0
        self.count = 0

    @property
    def label(self):
        return f"suffix({self.alpha:g})"

    @property
    def effective_alpha(self):
        """Fraction of the horizon actually averaged, ``(T - start + 1) / T``."""
        return (self.T - self.start + 1) / self.T

    def update(self, w, t=None):
        w = self._check(w)
        nxt = self.t + 1
        if t is not None and t != nxt:
            raise UsageError(f"suffix_update expects t={nxt}, got t={t}")
        if nxt > self.T:
            raise UsageError(f"t={nxt} exceeds the horizon T={self.T}")
        self.t = nxt
        if nxt >= self.start:
            self.sum = self.sum + w
            self.count += 1
        return self

    def candidate(self):
        if self.count == 0:
            raise UsageError("suffix not yet started")
        return self.sum / self.count

    @property
    def ready(self):
        return self.count > 0


class SuffixBank:
    """Alpha-suffix averages for several horizons from one pass.

    Used when a run reports at many checkpoints: the value at checkpoint
    ``t`` is the alpha-suffix average with horizon ``t``, exactly what a
    separate run stopped at ``t`` would return.
    """

    def __init__(self, alpha, horizons):
        self.alpha = check_alpha(alpha)
        self.members = {int(h): SuffixAverage(self.alpha, h) for h in horizons}
        self.t = 0
        self._waiting = sorted(self.members.values(), key=lambda s: s.start, reverse=True)
        self._active = []

    @property
    def label(self):
        return f"suffix({self.alpha:g})"

    def update(self, w):
        self.t += 1
        t = self.t
        if self._active and self._active[0].T < t:
            self._active = [s for s in self._active if s.T >= t]
        while self._waiting and self._waiting[-1].start <= t:
            self._active.append(self._waiting.pop())
            self._active.sort(key=lambda s: s.T)
        for s in self._active:
            s.t = t - 1
            s.update(w)
        return self

    def candidate_at(self, horizon):
        return self.members[horizon].candidate()

    def candidate(self):
        if self.t in self.members:
            return self.candidate_at(self.t)
        raise UsageError(f"no suffix horizon registered at t={self.t}")


# functional forms of the updates


def update_uniform(state, w):
    return state.update(w)


def update_polydecay(state, w):
    return state.update(w)


def suffix_update(state, w, t):
    return state.update(w, t)


def candidate(state):
    return state.candidate()


def polydecay_weights(T, eta):
    """Closed-form weights of polynomial-decay averaging after ``T`` updates.

    ``alpha_t = (eta+1)/(t+eta) * prod_{j=t+1..T} (j-1)/(j+eta)``, so that the
    online mean equals ``sum_t alpha_t w_t``. Used to cross-check the
    recursion; the recursion is what the averager runs.
    """
    T = check_int(T, "T", minimum=1)
    eta = check_positive(eta, "eta", allow_zero=True)
    j = np.arange(2, T + 1, dtype=float)
    factors = (j - 1.0) / (j + eta)
    # tail[t-1] = prod_{j=t+1..T}; empty product is 1 at t = T
    tail = np.ones(T)
    if T > 1:
        tail[:-1] = np.cumprod(factors[::-1])[::-1]
    t = np.arange(1, T + 1, dtype=float)
    return (eta + 1.0) / (t + eta) * tail
