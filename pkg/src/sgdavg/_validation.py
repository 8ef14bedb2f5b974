"""Small input-validation helpers shared by the library modules."""

import numbers

import numpy as np

from .exceptions import UsageError


def check_point(p, dim=None, name="point"):
    """Return ``p`` as a float array whose last axis has length ``dim``.

    Leading axes are allowed so batched iterates (one row per repetition)
    pass through the same helpers as single points.
    """
    arr = np.asarray(p, dtype=float)
    if arr.ndim == 0:
        raise UsageError(f"{name} must be a vector, got a scalar")
    if dim is not None and arr.shape[-1] != dim:
        raise UsageError(f"{name} has dimension {arr.shape[-1]}, expected {dim}")
    if not np.all(np.isfinite(arr)):
        raise UsageError(f"{name} contains non-finite coordinates")
    return arr


def check_positive(value, name, allow_zero=False):
    if not isinstance(value, numbers.Real) or isinstance(value, bool):
        raise UsageError(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if not np.isfinite(value) or value < 0 or (value == 0 and not allow_zero):
        bound = ">= 0" if allow_zero else "> 0"
        raise UsageError(f"{name} must be {bound}, got {value!r}")
    return value


def check_int(value, name, minimum=None):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        if isinstance(value, numbers.Real) and float(value).is_integer():
            value = int(value)
        else:
            raise UsageError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if minimum is not None and value < minimum:
        raise UsageError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_alpha(alpha):
    if isinstance(alpha, bool) or not isinstance(alpha, numbers.Real):
        raise UsageError(f"alpha must be in (0,1], got {alpha!r}")
    if not 0 < alpha <= 1:
        raise UsageError(f"alpha must be in (0,1], got {alpha!r}")
    return float(alpha)
