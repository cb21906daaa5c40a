"""Lamperti transforms of Lévy paths and the derived distance functionals.

X^(alpha)(t) = x exp(xi(tau(t x^alpha))) where tau is the inverse of the
additive functional A(s) = int_0^s exp(-alpha xi(u)) du.  On a compound-
Poisson-with-drift path the segment integrals of e^{-alpha xi} have closed
forms, so A, tau and X are computed exactly (no quadrature).  For
alpha = -1 the lifetime zeta = x * A(infinity) is finite and the path is
extended adaptively until the remaining-mass estimate is negligible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .jumppath import JumpPath
from .levy import extend_xi

__all__ = ["LampertiResult", "lamperti", "qnd_estimator", "lamperti_distance"]

# E[A(inf)] for a fresh xi path is O(1); this factor turns the current
# integrand level into a conservative remaining-mass estimate
_REMAINDER_FACTOR = 100.0


@dataclass(frozen=True)
class LampertiResult:
    """X^(alpha) evaluated on a grid, plus its jump record.

    values are 0 after the lifetime (cemetery).  tau_knots are the pairs
    (s_i, A(s_i)) at the underlying path's knots; jump_times/jump_sizes
    record the jumps of X itself on the X time axis.
    """

    alpha: float
    x: float
    t_grid: np.ndarray
    values: np.ndarray
    lifetime: float  # math.inf when the transform never dies
    tau_knots: np.ndarray  # shape (k, 2): (s, A(s)) post-jump
    jump_times: np.ndarray
    jump_sizes: np.ndarray
    truncation_error: float = 0.0
    # time change tau(t) in xi-time at the grid points; +inf past the
    # lifetime, so that int_0^t du/X(u) = tau(t) stays meaningful
    tau_grid: np.ndarray | None = None


def _segment_integrals(times, right, slope, alpha):
    """Exact integrals of e^{-alpha xi} over the inter-knot segments."""
    dt = np.diff(times)
    v = -alpha * right[:-1]
    d = -alpha * slope
    if d == 0.0:
        return np.exp(v) * dt
    return np.exp(v) * np.expm1(d * dt) / d


def lamperti(xi_path: JumpPath, alpha: float, x: float, t_grid,
             rng=None, rel_tol: float = 1e-6,
             max_horizon: float = 65536.0) -> LampertiResult:
    """Lamperti-transform a Lévy path; see the module docstring.

    For alpha = -1 the path is extended by fresh increments (using rng)
    until the estimated remaining additive mass is below rel_tol of the
    accumulated total; hitting max_horizon first is reported through
    truncation_error instead of an exception.
    """
    if x <= 0:
        raise ValueError("start value x must be positive")
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if np.any(t_grid < 0):
        raise ValueError("t_grid must be non-negative")

    trunc = 0.0
    if alpha == -1.0:
        path = xi_path
        while True:
            times, left, right = path.knots()
            seg = _segment_integrals(times, right, path.slope, alpha)
            total = float(np.sum(seg))
            rem = _REMAINDER_FACTOR * math.exp(right[-1])
            if rem <= rel_tol * total:
                break
            if path.horizon >= max_horizon or rng is None:
                # cannot (or may not) extend further: report, don't raise
                trunc = rem
                break
            path = extend_xi(path, path.horizon, rng)
        lifetime = x * total
    elif alpha == 0.0:
        path = xi_path
        times, left, right = path.knots()
        seg = _segment_integrals(times, right, path.slope, alpha)
        lifetime = math.inf
        if np.max(t_grid, initial=0.0) > path.horizon:
            raise ValueError("alpha = 0 transform needs horizon >= max(t_grid)")
    else:
        raise ValueError("alpha must be 0 or -1")

    A = np.concatenate([[0.0], np.cumsum(seg)])  # A at knot times
    scale = x ** (-alpha)  # X time = scale * A(s)

    # X values on the grid: invert A within the bracketing segment
    u = t_grid * x**alpha
    vals = np.zeros_like(t_grid)
    taus = np.full_like(t_grid, math.inf)
    alive = u < A[-1] if alpha != 0.0 else u <= A[-1]
    if np.any(alive):
        ua = np.minimum(u[alive], np.nextafter(A[-1], 0.0))
        i = np.searchsorted(A, ua, side="right") - 1
        i = np.clip(i, 0, len(seg) - 1)
        rem = ua - A[i]
        v = right[i]
        d = path.slope
        if alpha == 0.0:
            delta = rem
        else:
            da = -alpha * d
            ev = np.exp(alpha * v)  # e^{-(-alpha) v} = 1/e^{-alpha v}
            if da == 0.0:
                delta = rem * ev
            else:
                delta = np.log1p(rem * da * ev) / da
        vals[alive] = x * np.exp(v + d * delta)
        taus[alive] = times[i] + delta

    # jumps of X on the X time axis
    njump = len(path.jump_times)
    if njump:
        Aj = A[1 : njump + 1]  # A is continuous at jumps: A(s_i)
        jt = scale * Aj
        js = x * (np.exp(right[1 : njump + 1]) - np.exp(left[1 : njump + 1]))
    else:
        jt = np.empty(0)
        js = np.empty(0)

    return LampertiResult(
        alpha=alpha, x=x, t_grid=t_grid, values=vals, lifetime=lifetime,
        tau_knots=np.column_stack([times, A]),
        jump_times=jt, jump_sizes=js,
        truncation_error=x * trunc if alpha == -1.0 else 0.0,
        tau_grid=taus)


def qnd_estimator(path, u: float, eps: float) -> float:
    """eps times the number of jumps before time u with |size| in [eps, 2eps].

    `path` may be anything exposing jump_times/jump_sizes (JumpPath,
    LampertiResult) or a pair of arrays (times, sizes).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if hasattr(path, "jump_times"):
        jt, js = path.jump_times, path.jump_sizes
    else:
        jt, js = path
    jt = np.asarray(jt, dtype=float)
    js = np.asarray(js, dtype=float)
    a = np.abs(js)
    count = int(np.sum((jt <= u) & (a >= eps) & (a <= 2.0 * eps)))
    return eps * count


def lamperti_distance(path, d_q: float) -> float:
    """int_0^{d_q} dt / Y(t) for a piecewise-constant-between-jumps path.

    `path` is a zero-slope JumpPath or a pair (times, values) with values
    held on [times[i], times[i+1]).  Exact; errors if Y touches 0.
    """
    if d_q < 0:
        raise ValueError("d_q must be >= 0")
    if isinstance(path, JumpPath):
        if path.slope != 0.0:
            raise ValueError("exact formula needs a piecewise-constant path")
        times, _, vals = path.knots()
        times, vals = times[:-1], vals[:-1]
    else:
        times, vals = (np.asarray(a, dtype=float) for a in path)
    if times[0] != 0.0:
        raise ValueError("path must start at time 0")
    ends = np.concatenate([times[1:], [max(d_q, times[-1])]])
    dt = np.clip(np.minimum(ends, d_q) - np.minimum(times, d_q), 0.0, None)
    live = dt > 0
    if np.any(vals[live] <= 0):
        raise ValueError("path touches 0 before d_q")
    return float(np.sum(dt[live] / vals[live]))
