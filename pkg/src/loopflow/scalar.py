"""Scalar arithmetic modes.

Every field and flux is either exact (``rational`` mode) or binary floating
point (``float`` mode); the mode is uniform per run, ``rational`` by default
and overridable through ``LOOPFLOW_SCALAR``.

Rational arrays are stored as ``int64`` while every entry is an integer of
moderate size, and as object arrays of ``Fraction`` otherwise. Both storages
are exact and mix freely; :func:`combine` promotes before anything could
overflow.
"""
from __future__ import annotations

import math
import operator
import os
from fractions import Fraction
from numbers import Rational, Real

import numpy as np

RATIONAL = "rational"
FLOAT = "float"
MODES = (RATIONAL, FLOAT)

#: relative tolerance for every identity check in float mode
FLOAT_EPS = 1e-9

ENV_VAR = "LOOPFLOW_SCALAR"

# int64 storage is kept only below this magnitude so sums of a few thousand
# entries cannot overflow
INT_LIMIT = 2 ** 48


def default_mode() -> str:
    mode = os.environ.get(ENV_VAR, RATIONAL).strip().lower()
    if mode not in MODES:
        raise ValueError(f"{ENV_VAR} must be one of {MODES}, got {mode!r}")
    return mode


def resolve_mode(mode: str | None) -> str:
    if mode is None:
        return default_mode()
    if mode not in MODES:
        raise ValueError(f"unknown scalar mode {mode!r}")
    return mode


def to_scalar(x, mode: str):
    """Convert a number or ``"p/q"`` string to a scalar of ``mode``."""
    if isinstance(x, str):
        x = Fraction(x.strip())
    if mode == RATIONAL:
        if isinstance(x, (bool, np.bool_)):
            return Fraction(int(x))
        if isinstance(x, np.integer):
            return Fraction(int(x))
        if isinstance(x, Rational):
            return Fraction(x.numerator, x.denominator)
        if isinstance(x, (Real, np.floating)):
            if not np.isfinite(float(x)):
                raise ValueError(f"non-finite value {x!r}")
            return Fraction(float(x))
        raise TypeError(f"cannot convert {type(x).__name__} to a scalar")
    v = float(x)
    if not np.isfinite(v):
        raise ValueError(f"non-finite value {x!r}")
    return v


def mode_of(arr: np.ndarray) -> str:
    return FLOAT if arr.dtype == np.float64 else RATIONAL


def freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def compact(arr: np.ndarray) -> np.ndarray:
    """Store an exact array as ``int64`` when every entry is a small integer."""
    if arr.dtype != object:
        return arr
    if arr.size == 0:
        return np.zeros(arr.shape, dtype=np.int64)
    for x in arr.flat:
        if isinstance(x, Fraction):
            if x.denominator != 1 or abs(x.numerator) >= INT_LIMIT:
                return arr
        elif not isinstance(x, (int, np.integer)) or abs(int(x)) >= INT_LIMIT:
            return arr
    return np.array([int(x) for x in arr.flat], dtype=np.int64).reshape(arr.shape)


def to_object(arr: np.ndarray) -> np.ndarray:
    """Exact array as an object array of ``Fraction``."""
    if arr.dtype == object:
        return arr
    out = np.empty(arr.shape, dtype=object)
    for idx, x in np.ndenumerate(arr):
        out[idx] = Fraction(int(x))
    return out


def as_array(values, mode: str) -> np.ndarray:
    """Read-only array of ``values`` converted to ``mode`` scalars."""
    if mode == RATIONAL:
        src = np.asarray(values, dtype=object)
        out = np.empty(src.shape, dtype=object)
        for idx, x in np.ndenumerate(src):
            out[idx] = to_scalar(x, RATIONAL)
        return freeze(compact(out))
    out = np.array(values, dtype=np.float64)
    if not np.all(np.isfinite(out)):
        raise ValueError("non-finite value in array")
    return freeze(out)


def zeros(shape, mode: str, exact_dtype=np.int64) -> np.ndarray:
    if mode == FLOAT:
        return np.zeros(shape, dtype=np.float64)
    if exact_dtype == object:
        out = np.empty(shape, dtype=object)
        out.fill(Fraction(0))
        return out
    return np.zeros(shape, dtype=np.int64)


def max_abs(arr: np.ndarray):
    if arr.size == 0:
        return 0
    if arr.dtype == object:
        return max(abs(x) for x in arr.flat)
    m = np.max(np.abs(arr))
    return float(m) if arr.dtype == np.float64 else int(m)


def _small_int(arr: np.ndarray) -> bool:
    return arr.dtype != object and arr.dtype != np.float64 and (arr.size == 0 or int(np.max(np.abs(arr))) < INT_LIMIT)


def combine(a: np.ndarray, b, op=operator.add) -> np.ndarray:
    """Elementwise ``op(a, b)`` keeping exactness; ``b`` may be an array or a scalar."""
    if a.dtype == np.float64 or (isinstance(b, np.ndarray) and b.dtype == np.float64):
        return op(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64) if isinstance(b, np.ndarray) else float(b))
    if isinstance(b, np.ndarray):
        if _small_int(a) and _small_int(b):
            return op(a, b)
        return compact(op(to_object(a), to_object(b)))
    b = to_scalar(b, RATIONAL)
    if op is operator.mul and b.denominator == 1 and _small_int(a) and abs(b.numerator) < INT_LIMIT:
        out = a * int(b.numerator)
        if _small_int(out):
            return out
    return compact(op(to_object(a), b))


def _fraction_sum(values, absolute: bool = False) -> Fraction:
    # one common denominator instead of a gcd per addition
    pairs = [(x.numerator, x.denominator) if isinstance(x, Fraction) else (int(x), 1) for x in values]
    den = math.lcm(*(d for _, d in pairs)) if pairs else 1
    num = sum((abs(n) if absolute else n) * (den // d) for n, d in pairs)
    return Fraction(num, den)


def scaled_integers(arr: np.ndarray) -> tuple[np.ndarray, int] | None:
    """``(n, den)`` with ``arr == n / den`` and ``n`` of dtype ``int64``, when that fits."""
    if arr.dtype != object:
        return (arr, 1) if _small_int(arr) else None
    pairs = [(x.numerator, x.denominator) if isinstance(x, Fraction) else (int(x), 1) for x in arr.flat]
    den = math.lcm(*(d for _, d in pairs)) if pairs else 1
    nums = [n * (den // d) for n, d in pairs]
    if any(abs(n) >= INT_LIMIT for n in nums):
        return None
    return np.array(nums, dtype=np.int64).reshape(arr.shape), den


def total(arr: np.ndarray):
    """Exact (or float) sum of an array."""
    if arr.dtype == np.float64:
        return float(arr.sum())
    if arr.dtype == object:
        return _fraction_sum(arr.flat)
    return int(arr.sum())


def abs_total(arr: np.ndarray):
    if arr.dtype == object:
        return _fraction_sum(arr.flat, absolute=True)
    return total(np.abs(arr))


def tolerance(mode: str, scale=1) -> float | int:
    """Absolute tolerance for comparing quantities of magnitude ``scale``."""
    if mode == RATIONAL:
        return 0
    return FLOAT_EPS * max(1.0, abs(float(scale)))


def is_zero(x, mode: str, scale=1) -> bool:
    if mode == RATIONAL:
        return x == 0
    return abs(float(x)) <= tolerance(mode, scale)


def as_python(x):
    """Plain Python scalar: ``int``/``Fraction`` in rational mode, ``float`` otherwise."""
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, np.integer):
        return int(x)
    return x


def format_scalar(x) -> str | float:
    """JSON representation: ``"p/q"`` strings for exact values, plain floats otherwise."""
    x = as_python(x)
    if isinstance(x, float):
        return x
    return str(Fraction(x))
