"""Statistical comparison utilities for the verification harness."""

from __future__ import annotations

import numpy as np
from scipy.stats import kendalltau

__all__ = ["ks_two_sample", "bootstrap_ks_ci", "kendall_trend",
           "weighted_quantiles"]


def _wcdf_at(sorted_x, cum_w, points):
    """Weighted empirical CDF of (sorted_x, cum_w) at given points."""
    idx = np.searchsorted(sorted_x, points, side="right")
    return np.where(idx > 0, cum_w[idx - 1], 0.0) / cum_w[-1]


def ks_two_sample(a, b, weights_b=None) -> float:
    """Sup-norm distance between the empirical CDFs of a and b.

    b may carry non-negative weights (importance-weighted ensemble); the
    CDF of b is then weight-normalized.  Infinities are legal sample
    values (atoms at +/- inf compare naturally).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be nonempty")
    ia = np.argsort(a)
    a = a[ia]
    wa = np.ones_like(a)
    if weights_b is None:
        wb = np.ones_like(b)
    else:
        wb = np.asarray(weights_b, dtype=float)
        if np.all(wb == 0):
            raise ValueError("all weights are zero")
    ib = np.argsort(b)
    b, wb = b[ib], wb[ib]
    grid = np.concatenate([a, b])
    fa = _wcdf_at(a, np.cumsum(wa), grid)
    fb = _wcdf_at(b, np.cumsum(wb), grid)
    return float(np.max(np.abs(fa - fb)))


def bootstrap_ks_ci(a, b, weights_b=None, n_boot: int = 200, rng=None,
                    level: float = 0.9):
    """Percentile bootstrap confidence interval for ks_two_sample."""
    if rng is None:
        rng = np.random.default_rng()
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    wb = None if weights_b is None else np.asarray(weights_b, dtype=float)
    vals = np.empty(n_boot)
    for i in range(n_boot):
        ra = rng.integers(0, len(a), len(a))
        rb = rng.integers(0, len(b), len(b))
        vals[i] = ks_two_sample(a[ra], b[rb],
                                None if wb is None else wb[rb])
    q = (1.0 - level) / 2.0
    lo, hi = np.quantile(vals, [q, 1.0 - q])
    return float(lo), float(hi)


def kendall_trend(x, y) -> float:
    """Kendall tau of y against x (NaN-safe; returns 0 for length < 2)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 2:
        return 0.0
    tau = kendalltau(x, y).statistic
    return float(tau) if np.isfinite(tau) else 0.0


def weighted_quantiles(values, q, weights=None):
    """Quantiles of a (weighted) sample; q in [0, 1].

    Uses the right-continuous inverse of the weighted CDF, so results are
    always actual sample values (monotone in q by construction).
    """
    values = np.asarray(values, dtype=float)
    q = np.atleast_1d(np.asarray(q, dtype=float))
    if weights is None:
        weights = np.ones_like(values)
    else:
        weights = np.asarray(weights, dtype=float)
    order = np.argsort(values)
    v, w = values[order], weights[order]
    cw = np.cumsum(w)
    if cw[-1] <= 0:
        raise ValueError("total weight must be positive")
    targets = q * cw[-1]
    idx = np.searchsorted(cw, targets, side="left")
    idx = np.clip(idx, 0, len(v) - 1)
    return v[idx]
