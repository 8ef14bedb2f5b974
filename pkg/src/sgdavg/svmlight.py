"""Binary-labelled sparse datasets and the SVMlight / LIBSVM text format.

Format: one example per line, ``<label> <index>:<value> ...`` with 1-based,
strictly increasing indices. ``#`` starts a comment that runs to the end of
the line; blank lines are skipped. Labels must be -1 or +1.
"""

import io
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .exceptions import ParseError, UsageError


@dataclass(frozen=True, eq=False)
class Dataset:
    """Examples ``(x_i, y_i)`` stored as a CSR matrix plus a label vector."""

    X: sp.csr_matrix
    y: np.ndarray

    def __post_init__(self):
        X = sp.csr_matrix(self.X, dtype=float)
        y = np.asarray(self.y, dtype=float).ravel()
        if X.shape[0] == 0:
            raise UsageError("dataset needs at least one example")
        if X.shape[0] != y.shape[0]:
            raise UsageError(f"{X.shape[0]} feature rows but {y.shape[0]} labels")
        if not np.all(np.isin(y, (-1.0, 1.0))):
            raise UsageError("labels must be -1 or +1")
        if not np.all(np.isfinite(X.data)):
            raise UsageError("features must be finite")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_dense(cls, X, y):
        return cls(sp.csr_matrix(np.asarray(X, dtype=float)), y)

    @property
    def n_examples(self):
        return self.X.shape[0]

    @property
    def dim(self):
        return self.X.shape[1]

    @property
    def examples(self):
        """Iterate ``({index: value}, label)`` pairs with 0-based indices."""
        X = self.X
        for i in range(X.shape[0]):
            lo, hi = X.indptr[i], X.indptr[i + 1]
            feats = {int(j): float(v) for j, v in zip(X.indices[lo:hi], X.data[lo:hi])}
            yield feats, int(self.y[i])

    @cached_property
    def dense(self):
        return self.X.toarray()

    @cached_property
    def row_norms(self):
        return np.sqrt(np.asarray(self.X.multiply(self.X).sum(axis=1)).ravel())

    def rows(self, idx):
        """Dense feature rows for an integer index array."""
        return self.dense[idx]

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.X.shape == other.X.shape
            and np.array_equal(self.y, other.y)
            and (self.X != other.X).nnz == 0
        )

    __hash__ = None


def _parse_label(tok, lineno):
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(f"unparsable label {tok!r}", lineno) from None
    if v not in (-1.0, 1.0):
        raise ParseError(f"label must be ±1, got {tok!r}", lineno)
    return v


def parse_svmlight(text, dim=None):
    """Parse SVMlight text (a string or a text stream) into a :class:`Dataset`.

    ``dim`` overrides the inferred dimension (1 + largest 0-based index).
    """
    stream = io.StringIO(text) if isinstance(text, str) else text
    indptr, indices, data, labels = [0], [], [], []
    for lineno, line in enumerate(stream, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        labels.append(_parse_label(tokens[0], lineno))
        prev = 0
        for tok in tokens[1:]:
            idx, sep, val = tok.partition(":")
            if not sep:
                raise ParseError(f"expected index:value, got {tok!r}", lineno)
            try:
                j = int(idx)
                v = float(val)
            except ValueError:
                raise ParseError(f"unparsable token {tok!r}", lineno) from None
            if j < 1:
                raise ParseError(f"indices are 1-based, got {j}", lineno)
            if j <= prev:
                raise ParseError(f"indices must be strictly increasing ({prev} then {j})", lineno)
            if not np.isfinite(v):
                raise ParseError(f"non-finite value in {tok!r}", lineno)
            prev = j
            indices.append(j - 1)
            data.append(v)
        indptr.append(len(indices))
    if not labels:
        raise ParseError("no examples found")
    inferred = (max(indices) + 1) if indices else 1
    if dim is None:
        dim = inferred
    elif dim < inferred:
        raise ParseError(f"feature index {inferred} exceeds dim={dim}")
    X = sp.csr_matrix(
        (np.asarray(data, dtype=float), np.asarray(indices, dtype=np.int64), np.asarray(indptr)),
        shape=(len(labels), dim),
    )
    return Dataset(X, np.asarray(labels))


def load_svmlight(path, dim=None):
    with open(path, encoding="utf-8") as fh:
        return parse_svmlight(fh, dim=dim)


def dump_svmlight(dataset):
    """Serialise a dataset; values use 17 significant digits so parsing is lossless."""
    out = []
    for feats, label in dataset.examples:
        parts = ["+1" if label > 0 else "-1"]
        parts.extend(f"{j + 1}:{v:.17g}" for j, v in sorted(feats.items()))
        out.append(" ".join(parts))
    return "\n".join(out) + "\n"
