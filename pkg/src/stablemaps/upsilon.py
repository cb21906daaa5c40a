"""Importance-weighted ensembles for conditioned Cauchy processes.

The process conditioned to stay positive (Doob h-transform with
h(x) = sqrt(x)) and the positive Doob pair are represented by ensembles of
unconditioned symmetric-Cauchy paths with per-path importance weights,
which is unbiased for bounded-horizon functionals; the effective sample
size is reported so callers can reject under-resolved ensembles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .levy import sample_cauchy

__all__ = ["WeightedEnsemble", "sample_upsilon_up", "doob_pair_ensemble"]


@dataclass(frozen=True)
class WeightedEnsemble:
    """Paths plus non-negative weights, self-normalized on use."""

    paths: tuple
    weights: np.ndarray
    horizon: float
    normalization: str = "self"

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("weights must be finite and >= 0")
        object.__setattr__(self, "weights", w)

    @property
    def ess(self) -> float:
        """Effective sample size (sum w)^2 / sum w^2."""
        s = float(np.sum(self.weights))
        if s == 0.0:
            return 0.0
        return s**2 / float(np.sum(self.weights**2))

    def values_at(self, t, component=None):
        """Evaluate every path (or pair component) at time t."""
        if component is None:
            return np.asarray([p(t) for p in self.paths])
        return np.asarray([p[component](t) for p in self.paths])


def sample_upsilon_up(horizon: float, N: int, rng=None,
                      eps_cut: float = 0.01,
                      max_retries: int = 6) -> WeightedEnsemble:
    """The Cauchy process from 1 conditioned to stay positive, on
    [0, horizon], as sqrt(S(horizon))-weighted unconditioned paths."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if rng is None:
        rng = np.random.default_rng()
    eps = eps_cut
    for _ in range(max_retries):
        paths, weights = [], np.empty(N)
        for i in range(N):
            p = sample_cauchy(1.0, horizon, eps, rng, half=False)
            paths.append(p)
            pos = p.min_value() > 0.0
            weights[i] = math.sqrt(p(horizon)) if pos else 0.0
        if np.any(weights > 0):
            return WeightedEnsemble(paths=tuple(paths), weights=weights,
                                    horizon=horizon)
        eps /= 2.0  # refine: coarse truncation can kill every path
    raise RuntimeError("all importance weights zero after retries")


def doob_pair_ensemble(x: float, y: float, t: float, N: int, rng=None,
                       eps_cut: float = 0.01) -> WeightedEnsemble:
    """Pairs of Cauchy paths from (x, y) weighted by ((x+y)/S~_t)^2 on the
    event that both coordinates stay positive up to t."""
    if x <= 0 or y <= 0:
        raise ValueError("both start values must be positive")
    if rng is None:
        rng = np.random.default_rng()
    paths, weights = [], np.empty(N)
    for i in range(N):
        L = sample_cauchy(x, t, eps_cut, rng)
        R = sample_cauchy(y, t, eps_cut, rng)
        paths.append((L, R))
        if L.min_value() > 0.0 and R.min_value() > 0.0:
            s_t = L(t) + R(t)
            weights[i] = ((x + y) / s_t) ** 2
        else:
            weights[i] = 0.0
    return WeightedEnsemble(paths=tuple(paths), weights=weights, horizon=t)
