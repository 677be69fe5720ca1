"""Deterministic, compensated reductions.

Real and imaginary parts are reduced with :func:`math.fsum` (Shewchuk's
error-free expansions), so the result is the correctly rounded sum and does
not depend on the order or partition of the input.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np


def complex_fsum(values: Iterable[complex]) -> complex:
    arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values,
                     dtype=complex)
    return complex(math.fsum(arr.real.tolist()), math.fsum(arr.imag.tolist()))


def neumaier_cumsum(values: np.ndarray) -> np.ndarray:
    """Running sums of a real or complex array with Neumaier compensation.

    ``out[k] == values[:k+1].sum()`` up to a couple of ulps, independent of
    the length, where ``np.cumsum`` drifts like ``k * eps``.
    """
    values = np.asarray(values)
    if np.iscomplexobj(values):
        return neumaier_cumsum(values.real) + 1j * neumaier_cumsum(values.imag)
    out = np.empty(values.shape, dtype=float)
    s = 0.0
    c = 0.0
    for k, x in enumerate(values.tolist()):
        t = s + x
        if abs(s) >= abs(x):
            c += (s - t) + x
        else:
            c += (x - t) + s
        s = t
        out[k] = s + c
    return out


def log_sum_exp(logs: np.ndarray) -> complex:
    """Complex log of ``sum(exp(logs))`` without leaving double range.

    ``logs`` holds complex logarithms (log-modulus + i*phase).  Terms are
    re-exponentiated relative to the largest modulus before the compensated
    sum.  Returns ``-inf`` (as a complex) for an exactly vanishing sum.
    """
    logs = np.asarray(logs, dtype=complex)
    if logs.size == 0:
        return complex(-math.inf, 0.0)
    shift = float(np.max(logs.real))
    if not math.isfinite(shift):
        return complex(-math.inf, 0.0)
    total = complex_fsum(np.exp(logs - shift))
    if total == 0:
        return complex(-math.inf, 0.0)
    return complex(shift + math.log(abs(total)), math.atan2(total.imag, total.real))
