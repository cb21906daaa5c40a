"""Samplers for the continuum jump measures.

Two Lévy measures appear in the scaling limits:

* the log-transformed measure of the Cauchy-type ssMp: in the spatial
  variable x = e^y it is dx / (pi (x(1-x))^2) on (1/2, 1) u (1, infinity),
  which the substitution y = log x turns into
  lambda(y) = e^{-y} / (pi (1 - e^y)^2) on (-log 2, 0) u (0, infinity);
* the symmetric Cauchy measure dx/x^2 (half mass per sign).

Jumps above a threshold eps_cut are drawn by inverse CDF from the
closed-form antiderivative Phi of the spatial density,

    Phi(t) = (1/pi) (2 log(t/|1-t|) - 1/t + 1/(1-t)),   Phi'(t) = 1/(pi (t(1-t))^2),

with Phi(1/2) = 0 and Phi(t) -> 0 as t -> infinity.  Sub-threshold jumps
are compensated by the constant m(eps) = int_0^eps y (lambda(y) - lambda(-y)) dy,
added to the -2/pi drift so the truncated path keeps the mean drift of the
symmetric principal-value limit.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .jumppath import JumpPath

__all__ = ["sample_xi", "sample_cauchy", "extend_xi", "lambda_density",
           "phi_antiderivative", "xi_jump_rate", "XI_DRIFT"]

# Drift of xi in the convention where jumps are compensated by (e^y - 1):
# psi(q) = XI_DRIFT*q + int (e^{qy} - 1 - q(e^y - 1)) Lambda(dy).
XI_DRIFT = -2.0 / math.pi
# int (e^y - 1) Lambda(dy) = -2/pi exactly (principal value), so the linear
# drift of the plain-jump representation used by the sampler is
# XI_DRIFT - (-2/pi) = 0; the sub-cutoff jump mean is restored separately
# through the `compensation` field.
_XI_LINEAR = XI_DRIFT + 2.0 / math.pi
_LOG2 = math.log(2.0)


def lambda_density(y):
    """Lévy density of xi in the log variable; 0 outside its support."""
    y = np.asarray(y, dtype=float)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        val = np.exp(-y) / (math.pi * np.expm1(y) ** 2)
    ok = (y > -_LOG2) & (y != 0.0)
    out = np.where(ok, val, 0.0)
    return out if out.ndim else float(out)


def phi_antiderivative(t):
    """Antiderivative of the spatial density 1/(pi (x(1-x))^2)."""
    t = np.asarray(t, dtype=float)
    out = (2.0 * np.log(t / np.abs(1.0 - t)) - 1.0 / t + 1.0 / (1.0 - t)) / math.pi
    return out if out.ndim else float(out)


def _invert_phi(v, lo, hi):
    """Solve Phi(x) = v on the monotone branch [lo, hi] (vectorized)."""
    lo = np.full_like(v, lo, dtype=float)
    hi = np.full_like(v, hi, dtype=float)
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        below = phi_antiderivative(mid) < v
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


@lru_cache(maxsize=None)
def _xi_side_masses(eps_cut: float):
    """(mass of y > eps, mass of y < -eps) for the xi measure."""
    if not 0.0 < eps_cut < _LOG2:
        raise ValueError("eps_cut must lie in (0, log 2)")
    pos = -phi_antiderivative(math.exp(eps_cut))
    neg = phi_antiderivative(math.exp(-eps_cut))
    return pos, neg


@lru_cache(maxsize=None)
def _xi_compensation(eps_cut: float) -> float:
    """m(eps) = int_0^eps y (lambda(y) - lambda(-y)) dy (about -4eps/pi)."""
    val, _ = quad(lambda y: y * (lambda_density(y) - lambda_density(-y)),
                  0.0, eps_cut, limit=200)
    return val


def xi_jump_rate(eps_cut: float) -> float:
    """Total intensity of xi jumps with |y| > eps_cut."""
    pos, neg = _xi_side_masses(eps_cut)
    return pos + neg


def sample_xi(horizon: float, eps_cut: float = 0.01, rng=None,
              start: float = 0.0) -> JumpPath:
    """Sample the Lévy process xi (drift -2/pi, measure lambda) on
    [0, horizon], truncating jumps below eps_cut."""
    if eps_cut <= 0 or eps_cut > 0.1:
        raise ValueError("eps_cut must lie in (0, 0.1]")
    if rng is None:
        rng = np.random.default_rng()
    pos_mass, neg_mass = _xi_side_masses(eps_cut)
    rate = pos_mass + neg_mass
    n = rng.poisson(rate * horizon)
    times = np.sort(rng.random(n)) * horizon
    take_pos = rng.random(n) < pos_mass / rate
    u = rng.random(n)
    sizes = np.empty(n)
    if np.any(take_pos):
        # x in (e^eps, inf): Phi increases from Phi(x0) = -pos_mass to 0
        v = (1.0 - u[take_pos]) * (-pos_mass)
        x = _invert_phi(v, math.exp(eps_cut), 1e12)
        sizes[take_pos] = np.log(x)
    if np.any(~take_pos):
        # x in (1/2, e^-eps): Phi increases from 0 to neg_mass
        v = u[~take_pos] * neg_mass
        x = _invert_phi(v, 0.5, math.exp(-eps_cut))
        sizes[~take_pos] = np.log(x)
    return JumpPath(horizon=horizon, start=start, drift=_XI_LINEAR,
                    compensation=_xi_compensation(eps_cut), eps_cut=eps_cut,
                    jump_times=_dedupe(times), jump_sizes=sizes)


def extend_xi(path: JumpPath, extra: float, rng=None) -> JumpPath:
    """Append an independent xi increment of length `extra` to a path."""
    return path.extended(sample_xi(extra, path.eps_cut, rng))


def _dedupe(times: np.ndarray) -> np.ndarray:
    """Nudge ties apart (probability-zero events made impossible)."""
    if times.size > 1:
        eq = np.flatnonzero(np.diff(times) <= 0)
        while eq.size:
            times[eq + 1] = np.nextafter(times[eq + 1], np.inf)
            eq = np.flatnonzero(np.diff(times) <= 0)
    return times


def sample_cauchy(start: float, horizon: float, eps_cut: float = 0.01,
                  rng=None, half: bool = True) -> JumpPath:
    """Sample a symmetric Cauchy-type pure-jump path on [0, horizon].

    Jump measure dx/x^2 split as half = True: 1/(2x^2) per sign (the
    normalization used by the conditioned and Doob-paired processes);
    half = False doubles the intensity.  Zero drift; the symmetric
    compensation cancels exactly.
    """
    if eps_cut <= 0 or eps_cut > 0.1:
        raise ValueError("eps_cut must lie in (0, 0.1]")
    if rng is None:
        rng = np.random.default_rng()
    side_mass = (0.5 if half else 1.0) / eps_cut
    n = rng.poisson(2.0 * side_mass * horizon)
    times = np.sort(rng.random(n)) * horizon
    # |x| = eps/U has density eps/x^2 on (eps, inf), normalized per side
    mag = eps_cut / rng.random(n)
    sign = np.where(rng.random(n) < 0.5, 1.0, -1.0)
    return JumpPath(horizon=horizon, start=start, drift=0.0,
                    compensation=0.0, eps_cut=eps_cut,
                    jump_times=_dedupe(times), jump_sizes=sign * mag)
