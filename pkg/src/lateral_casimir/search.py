"""Golden-section maximum search and log-log power-law fitting."""

from __future__ import annotations

import math
from typing import Callable, NamedTuple, Sequence

import numpy as np

__all__ = ["PeakResult", "golden_section_max", "loglog_slope"]

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class PeakResult(NamedTuple):
    x: float
    value: float
    evals: int


def golden_section_max(
    f: Callable[[float], float], lo: float, hi: float, xtol: float = 0.02
) -> PeakResult:
    """Locate the maximum of a unimodal function on [lo, hi] to within xtol."""
    if not hi > lo:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    evals = 2
    while (b - a) > 2.0 * xtol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
        evals += 1
    if fc >= fd:
        return PeakResult(c, fc, evals)
    return PeakResult(d, fd, evals)


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of ln y versus ln x."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        raise ValueError("need at least two points")
    if np.any(x <= 0.0) or np.any(y <= 0.0):
        raise ValueError("log-log fit needs positive data")
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])
