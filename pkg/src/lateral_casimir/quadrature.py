"""Adaptive quadrature over finite and semi-infinite domains.

All integrators share the same error model: each panel is evaluated with a
pair of Gauss-Legendre rules (orders 8 and 16) and the difference between the
two estimates serves as the panel error.  Panels whose error exceeds their
share of the global budget are bisected until the summed error meets the
requested tolerance or the evaluation budget is exhausted.

Semi-infinite axes are reduced to finite ones by scanning outward until the
integrand has fallen below ``decay_cutoff`` times its running peak; the
integrands in this package all decay at least exponentially, which makes the
truncation point well defined.

Everything here is deterministic: identical inputs produce bit-identical
results, panel bookkeeping is ordered left to right, and sums are accumulated
with :func:`math.fsum`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "QuadSpec",
    "QuadResult",
    "IntegrandError",
    "FiniteAxis",
    "SemiInfiniteAxis",
    "DependentAxis",
    "gauss_legendre",
    "integrate_finite",
    "integrate_semi_infinite",
    "integrate_nested",
]

_LOW_ORDER = 8
_HIGH_ORDER = 16
_EVALS_PER_PANEL = _LOW_ORDER + _HIGH_ORDER
_MIN_WIDTH_FACTOR = 1e-13
_SCAN_START = 0.5
_SCAN_LIMIT = 2.0**40


class IntegrandError(ValueError):
    """Raised when an integrand returns a non-finite sample."""


@dataclass(frozen=True)
class QuadSpec:
    """Error-control parameters shared by all integrals.

    Parameters
    ----------
    rel_tol : float
        Relative error target, > 0.
    abs_floor : float
        Absolute error floor, >= 0.  Guards integrals whose value is near
        zero, where a pure relative target is unattainable.
    max_evals : int
        Cap on integrand evaluations per integral, >= 100.
    decay_cutoff : float
        Fraction of the running peak below which the exponentially decaying
        tail of a semi-infinite integrand is truncated.
    """

    rel_tol: float = 1e-6
    abs_floor: float = 0.0
    max_evals: int = 2_000_000
    decay_cutoff: float = 1e-12

    def __post_init__(self):
        if not self.rel_tol > 0.0:
            raise ValueError(f"rel_tol must be > 0, got {self.rel_tol}")
        if self.abs_floor < 0.0:
            raise ValueError(f"abs_floor must be >= 0, got {self.abs_floor}")
        if self.max_evals < 100:
            raise ValueError(f"max_evals must be >= 100, got {self.max_evals}")
        if not 0.0 < self.decay_cutoff < 1.0:
            raise ValueError(f"decay_cutoff must be in (0, 1), got {self.decay_cutoff}")

    def with_rel_tol(self, rel_tol: float) -> "QuadSpec":
        return replace(self, rel_tol=rel_tol)


@dataclass(frozen=True)
class QuadResult:
    """Outcome of one integral: value, error estimate, cost, convergence."""

    value: float
    err_est: float
    evals: int
    converged: bool

    def tolerance(self, spec: QuadSpec) -> float:
        return max(spec.rel_tol * abs(self.value), spec.abs_floor)


def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1], cached per order."""
    try:
        return _GL_CACHE[n]
    except KeyError:
        x, w = np.polynomial.legendre.leggauss(n)
        _GL_CACHE[n] = (x, w)
        return x, w


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _panel_nodes(a: float, b: float) -> np.ndarray:
    """Abscissae for the low- and high-order rules on one panel, concatenated."""
    xl, _ = gauss_legendre(_LOW_ORDER)
    xh, _ = gauss_legendre(_HIGH_ORDER)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return np.concatenate([mid + half * xl, mid + half * xh])


def _panel_estimates(a: float, b: float, vals: np.ndarray) -> tuple[float, float]:
    _, wl = gauss_legendre(_LOW_ORDER)
    _, wh = gauss_legendre(_HIGH_ORDER)
    half = 0.5 * (b - a)
    low = half * float(wl @ vals[:_LOW_ORDER])
    high = half * float(wh @ vals[_LOW_ORDER:])
    return high, abs(high - low)


def _check_finite(vals: np.ndarray, nodes: np.ndarray) -> None:
    if not np.all(np.isfinite(vals)):
        bad = int(np.argmin(np.isfinite(vals)))
        raise IntegrandError(
            f"non-finite integrand value {vals[bad]!r} at x = {nodes[bad]!r}"
        )


def _eval_panels(f, intervals: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """Evaluate a batch of panels with one vectorized integrand call."""
    nodes = np.concatenate([_panel_nodes(a, b) for a, b in intervals])
    vals = np.asarray(f(nodes), dtype=float)
    if vals.shape != nodes.shape:
        raise TypeError(
            f"integrand returned shape {vals.shape}, expected {nodes.shape}"
        )
    _check_finite(vals, nodes)
    out = []
    for i, (a, b) in enumerate(intervals):
        chunk = vals[i * _EVALS_PER_PANEL : (i + 1) * _EVALS_PER_PANEL]
        out.append(_panel_estimates(a, b, chunk))
    return out


def integrate_finite(f, a: float, b: float, spec: QuadSpec = QuadSpec()) -> QuadResult:
    """Adaptively integrate ``f`` over [a, b].

    Parameters
    ----------
    f : callable
        Vectorized integrand mapping an ndarray of abscissae to an ndarray of
        values.  Must be finite on the open interval; panel nodes are strictly
        interior, so integrable endpoint limits never get sampled.
    a, b : float
        Integration bounds, a <= b.
    spec : QuadSpec
        Error control.

    Returns
    -------
    QuadResult
        ``converged`` is False when the evaluation budget ran out first; the
        best available estimate is still returned.
    """
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError(f"bounds must be finite, got [{a}, {b}]")
    if a > b:
        raise ValueError(f"need a <= b, got a={a}, b={b}")
    if a == b:
        return QuadResult(0.0, 0.0, 0, True)

    span = b - a
    min_width = _MIN_WIDTH_FACTOR * (abs(a) + abs(b) + span)
    mid = 0.5 * (a + b)
    panels: list[list] = [[a, mid], [mid, b]]
    ests = _eval_panels(f, [(p[0], p[1]) for p in panels])
    for p, (v, e) in zip(panels, ests):
        p.extend((v, e))
    evals = 2 * _EVALS_PER_PANEL

    while True:
        total = math.fsum(p[2] for p in panels)
        err = math.fsum(p[3] for p in panels)
        tol = max(spec.rel_tol * abs(total), spec.abs_floor)
        if err <= tol:
            return QuadResult(total, err, evals, True)

        share = tol / (2.0 * len(panels))
        split_idx = [
            i
            for i, p in enumerate(panels)
            if p[3] > share and (p[1] - p[0]) > min_width
        ]
        if not split_idx:
            widths_ok = [i for i, p in enumerate(panels) if (p[1] - p[0]) > min_width]
            if not widths_ok:
                return QuadResult(total, err, evals, False)
            split_idx = [max(widths_ok, key=lambda i: panels[i][3])]
        if evals + 2 * _EVALS_PER_PANEL * len(split_idx) > spec.max_evals:
            return QuadResult(total, err, evals, False)

        children: list[tuple[float, float]] = []
        for i in split_idx:
            pa, pb = panels[i][0], panels[i][1]
            pm = 0.5 * (pa + pb)
            children.append((pa, pm))
            children.append((pm, pb))
        ests = _eval_panels(f, children)
        evals += len(children) * _EVALS_PER_PANEL

        new_panels: list[list] = []
        ci = 0
        split_set = set(split_idx)
        for i, p in enumerate(panels):
            if i in split_set:
                for k in (0, 1):
                    ca, cb = children[ci + k]
                    v, e = ests[ci + k]
                    new_panels.append([ca, cb, v, e])
                ci += 2
            else:
                new_panels.append(p)
        panels = new_panels


def integrate_semi_infinite(f, spec: QuadSpec = QuadSpec()) -> QuadResult:
    """Integrate ``f`` over [0, inf) assuming at least exponential decay.

    The upper limit is found by scanning a doubling grid outward from
    ``x = 0.5`` until the sampled magnitude falls below ``spec.decay_cutoff``
    times the running peak, then delegating to :func:`integrate_finite` on
    the truncated interval.
    """
    xs = _SCAN_START * 2.0 ** np.arange(8)
    vals = np.abs(np.asarray(f(xs), dtype=float))
    _check_finite(vals, xs)
    evals = len(xs)

    while True:
        peak_i = int(np.argmax(vals))
        cut = spec.decay_cutoff * vals[peak_i]
        upper = None
        for j in range(peak_i + 1, len(xs)):
            if vals[j] <= cut:
                upper = xs[j]
                break
        if upper is not None:
            break
        if xs[-1] >= _SCAN_LIMIT:
            raise IntegrandError(
                f"integrand has not decayed below cutoff by x = {xs[-1]:g}"
            )
        more = xs[-1] * 2.0 ** np.arange(1, 5)
        mvals = np.abs(np.asarray(f(more), dtype=float))
        _check_finite(mvals, more)
        evals += len(more)
        xs = np.concatenate([xs, more])
        vals = np.concatenate([vals, mvals])

    inner = integrate_finite(f, 0.0, float(upper), spec)
    return QuadResult(inner.value, inner.err_est, inner.evals + evals, inner.converged)


@dataclass(frozen=True)
class FiniteAxis:
    a: float
    b: float


@dataclass(frozen=True)
class SemiInfiniteAxis:
    pass


@dataclass(frozen=True)
class DependentAxis:
    """Finite axis whose bounds depend on the outer coordinates."""

    bounds: Callable[..., tuple[float, float]]


def _budget_split(rel_tol: float, n_levels: int) -> list[float]:
    """Outer level gets half the budget, each inner level half the remainder."""
    if n_levels == 1:
        return [rel_tol]
    budgets = []
    remaining = rel_tol
    for _ in range(n_levels - 1):
        budgets.append(remaining / 2.0)
        remaining /= 2.0
    budgets.append(remaining)
    return budgets


def integrate_nested(f, axes: Sequence, spec: QuadSpec = QuadSpec()) -> QuadResult:
    """Nested adaptive integration over a product domain.

    Parameters
    ----------
    f : callable
        Integrand ``f(x0, ..., x_{n-1})`` where the innermost coordinate is
        passed as an ndarray (all outer coordinates are scalars), returning
        an ndarray of values.
    axes : sequence
        One :class:`FiniteAxis`, :class:`SemiInfiniteAxis` or
        :class:`DependentAxis` per integration variable, outermost first.
        A dependent axis receives the outer coordinates and returns bounds.
    spec : QuadSpec
        Total error budget; split so the outer level receives half and each
        inner level half of the remainder.
    """
    axes = list(axes)
    if not axes:
        raise ValueError("need at least one axis")
    if isinstance(axes[0], DependentAxis):
        raise ValueError("outermost axis cannot depend on outer coordinates")
    budgets = _budget_split(spec.rel_tol, len(axes))
    state = {"evals": 0, "ok": True}
    last = len(axes) - 1

    def run_level(level: int, outer: tuple) -> QuadResult:
        sub = replace(spec, rel_tol=budgets[level])
        if level == last:
            g = lambda x: f(*outer, np.asarray(x, dtype=float))
        else:

            def g(x_arr):
                x_arr = np.atleast_1d(x_arr)
                out = np.empty(x_arr.shape, dtype=float)
                for j, x in enumerate(x_arr):
                    r = run_level(level + 1, outer + (float(x),))
                    state["evals"] += r.evals
                    state["ok"] = state["ok"] and r.converged
                    out[j] = r.value
                return out

        axis = axes[level]
        if isinstance(axis, FiniteAxis):
            return integrate_finite(g, axis.a, axis.b, sub)
        if isinstance(axis, SemiInfiniteAxis):
            return integrate_semi_infinite(g, sub)
        if isinstance(axis, DependentAxis):
            lo, hi = axis.bounds(*outer)
            return integrate_finite(g, lo, hi, sub)
        raise TypeError(f"unknown axis type {axis!r}")

    top = run_level(0, ())
    state["evals"] += top.evals
    inner_err = (spec.rel_tol - budgets[0]) * abs(top.value)
    return QuadResult(
        top.value,
        top.err_est + inner_err,
        state["evals"],
        top.converged and state["ok"],
    )
