"""Peeling transition laws for finite and infinite Boltzmann maps.

Both laws are expressed through the base nu-walk of the model:

* finite mode (locally-largest filling): perimeter step s has probability
  nu(s) w(p+s)/w(p) for s >= 0 (event C_{s+1}) and, for s = -(j+1) with
  j <= (p-1)/2, probability nu(s) w(p+s)/w(p) (halved at the exact middle
  split of odd p), the swallowed hole having half-perimeter j;
* infinite mode: the h_up-Doob transform nu(s) h_up(p+s)/h_up(p) with
  killing at perimeters <= 0, side of the swallowed hole uniform.

Sampling is by vectorized rejection against the nu-walk restricted to a
window, with a discrete-Pareto proposal for the rare growth steps beyond p
in infinite mode (where the h_up ratio is unbounded).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .partition import PartitionTable, h_up

__all__ = ["StepLaw", "transition_law", "sample_steps"]

# envelope constant for h_up(p+s)/h_up(p) <= KAPPA * sqrt((p+s)/p):
# h_up(m)/sqrt(m) increases from 1 (m = 1) to its limit 2/sqrt(pi)
_KAPPA = 2.0 / math.sqrt(math.pi) * 1.0000001
# positive-step proposal table extent; target mass beyond is bounded by
# sup(m^2 nu(m)) * (p / S_TAB)^2 / S_TAB < 1e-11 at desk-scale perimeters
_S_TAB = 1 << 20
# above this perimeter the bulk window is clamped to [-K, K] and both tails
# are served by discrete-Pareto proposals, so memory stays p-independent
_K_BIG = 1 << 19


class _NuTables:
    """Cached CDF tables of the nu-walk attached to a PartitionTable."""

    def __init__(self, table: PartitionTable, neg_extent: int):
        self.table = table
        self.neg_extent = neg_extent  # steps -1 .. -neg_extent available
        s_neg = np.arange(-self.neg_extent, 0)
        s_pos = np.arange(0, _S_TAB)
        self.s_lo = -self.neg_extent
        self.nu_all = np.concatenate([table.nu(s_neg), table.nu(s_pos)])
        self.cdf = np.cumsum(self.nu_all)
        # decreasing-w envelope used by the finite-mode acceptance ratio
        self.w_arr = table.w_scaled
        self.a2 = table.weights.nu_plus_coef_sup(table.c_q)

    def nu_of(self, s):
        return self.nu_all[s - self.s_lo]

    def cdf_at(self, s):
        """CDF evaluated at integer s (inclusive); -inf side is 0."""
        idx = s - self.s_lo
        out = np.where(idx >= 0, self.cdf[np.clip(idx, 0, len(self.cdf) - 1)], 0.0)
        return out


def _tables(table: PartitionTable, neg_extent: int = 0) -> _NuTables:
    """Fetch (or grow) the cached nu-walk tables.

    ``neg_extent`` is the deepest negative step the caller may need; the
    table is rebuilt at the next power of two when it is exceeded, so
    infinite-mode explorations can outgrow the solver's pad range.
    """
    cache = getattr(table, "_nu_tables", None)
    if cache is None or cache.neg_extent < neg_extent:
        ext = max(table.pad_len + 1, neg_extent)
        if ext > (1 << 23):
            raise RuntimeError(
                f"perimeter {neg_extent} too large for step-law tables"
            )
        ext = 1 << max(ext - 1, 1).bit_length()
        cache = _NuTables(table, ext)
        object.__setattr__(table, "_nu_tables", cache)
    return cache


def _sample_window(nt: _NuTables, lo, hi, rng, size):
    """Draw s from nu restricted to the integer window [lo, hi]."""
    a = nt.cdf_at(lo - 1)
    b = nt.cdf_at(hi)
    u = a + rng.random(size) * (b - a)
    s = np.searchsorted(nt.cdf, u, side="right") + nt.s_lo
    return np.clip(s, lo, hi), b - a


def sample_steps(table: PartitionTable, p, mode: str, rng) -> np.ndarray:
    """Draw one peeling perimeter step for each entry of p (vectorized).

    Returns the array of signed steps s: s >= 0 encodes event C_{s+1}
    (new face of degree 2(s+1)); s <= -1 encodes a G event swallowing a
    hole of half-perimeter j = -s-1.
    """
    p = np.asarray(p, dtype=np.int64)
    if np.any(p < 1):
        raise ValueError("perimeters must be >= 1 while active")
    pmax = int(p.max()) if p.size else 0
    if mode == "finite" and pmax > 64 * table.L_max:
        # beyond the solved range the step law is computed from the tail
        # ansatz (relative error O(1/p)); rare upward excursions of finite
        # explorations are allowed well past the trusted table, but a walk
        # living at 64x the solved range signals a mis-sized solve
        raise ValueError(
            f"half-perimeter beyond 64*L_max = {64 * table.L_max}: "
            "re-solve with a larger L_max"
        )
    nt = _tables(table, min(pmax, _K_BIG) if mode == "infinite" else 0)
    out = np.empty(p.shape, dtype=np.int64)
    pending = np.ones(p.shape, dtype=bool)
    for _ in range(400):
        idx = np.flatnonzero(pending)
        if idx.size == 0:
            return out
        pp = p[idx]
        if mode == "finite":
            s, acc = _propose_finite(nt, pp, rng)
        else:
            s, acc = _propose_infinite(nt, pp, rng)
        u = rng.random(idx.size)
        ok = u < acc
        out[idx[ok]] = s[ok]
        pending[idx] = ~ok
    raise RuntimeError("rejection sampler failed to accept after 400 rounds")


def _propose_finite(nt: _NuTables, p, rng):
    """One proposal round of the finite locally-largest step law."""
    table = nt.table
    jmax = (p - 1) // 2  # largest swallowable half-perimeter
    lo = -(jmax + 1)
    hi = np.minimum(np.maximum(64 * p, 4096), _S_TAB - 1)
    s, _ = _sample_window(nt, lo, hi, rng, p.shape)
    # envelope: w(p+s)/w(p) <= w(p + lo)/w(p), w decreasing; remote C-steps
    # are weighted by the tail ansatz (non-strict range)
    wp = table.w(p, strict=False)
    env = table.w(p + lo, strict=False) / wp
    ratio = table.w(p + s, strict=False) / wp
    middle = 2 * s == -(p + 1)  # j == p-1-j, single ordered split
    acc = np.where(middle, 0.5, 1.0) * ratio / np.maximum(env, 1.0)
    return s, acc


def _propose_infinite(nt: _NuTables, p, rng):
    """One proposal round of the h_up-Doob-transformed step law.

    Proposal is a mixture: with probability 1 - beta the nu-walk restricted
    to [1-p, p] (where the h_up ratio is bounded by KAPPA*sqrt(2)), with
    probability beta a discrete Pareto(1/2) on the rare growth steps s > p.
    A single global envelope M covers both branches so the mixture is
    rejection-correct.  Perimeters beyond the table extent are routed to
    the clamped-window variant whose memory does not grow with p.
    """
    big = p > nt.neg_extent
    if np.any(big):
        s = np.empty(p.shape, dtype=np.int64)
        acc = np.empty(p.shape, dtype=float)
        s[big], acc[big] = _propose_infinite_big(nt, p[big], rng)
        sm = ~big
        s[sm], acc[sm] = _propose_infinite(nt, p[sm], rng)
        return s, acc
    pf = p.astype(float)
    beta = np.minimum(0.2, 4.0 * nt.a2 / pf)
    mass = nt.cdf_at(p) - nt.cdf_at(-p)  # nu-mass of the window [1-p, p]
    Mb = _KAPPA * math.sqrt(2.0) * mass / (1.0 - beta)
    Mt = 2.0 * math.sqrt(2.0) * _KAPPA * nt.a2 / (beta * pf)
    M = np.maximum(Mb, Mt)
    take_tail = rng.random(p.shape) < beta
    s = np.empty(p.shape, dtype=np.int64)
    acc = np.empty(p.shape, dtype=float)
    hp = h_up(pf)

    bulk = ~take_tail
    if np.any(bulk):
        pb = p[bulk]
        sb, mass_b = _sample_window(nt, 1 - pb, pb, rng, pb.shape)
        hnew = np.where(sb + pb >= 1, h_up(np.maximum(pb + sb, 1).astype(float)), 0.0)
        # g(s) = (1-beta) nu(s)/mass; acc = target / (M g)
        acc[bulk] = (
            hnew / hp[bulk] * mass_b / ((1.0 - beta[bulk]) * M[bulk])
        )
        s[bulk] = sb
    if np.any(take_tail):
        pt = p[take_tail]
        # discrete Pareto(1/2) on s > p: P(S=s) = sqrt(p)(1/sqrt(s-1)-1/sqrt(s))
        u = rng.random(pt.shape)
        v = np.minimum(pt / u**2, 4e18)
        st = np.maximum(np.ceil(v).astype(np.int64), pt + 1)
        # pmf written in cancellation-free form: sqrt(p) (1/sqrt(s-1) - 1/sqrt(s))
        r0, r1 = np.sqrt(st - 1.0), np.sqrt(st.astype(float))
        pmf = np.sqrt(pt.astype(float)) / (r0 * r1 * (r0 + r1))
        target = nt.table.nu(st) * h_up((pt + st).astype(float)) / hp[take_tail]
        acc[take_tail] = target / (beta[take_tail] * pmf * M[take_tail])
        s[take_tail] = st
    return s, acc


def _propose_infinite_big(nt: _NuTables, p, rng):
    """Doob-transformed proposal round for perimeters beyond the tables.

    The nu-walk bulk is clamped to the window [-K, K] with K the table
    extent; growth steps s > K use the discrete Pareto(1/2) proposal and
    shrink steps s < -K a discrete Pareto matched to the tail exponent of
    the partition function, against which nu(-m) is exactly the algebraic
    ansatz (all such m lie beyond the solver's padded range).
    """
    table = nt.table
    K = nt.neg_extent
    if K <= table.pad_len:
        raise RuntimeError("clamped window does not cover the solved range")
    pf = p.astype(float)
    hp = h_up(pf)
    beta_t = beta_n = 0.05
    bulk_w = 1.0 - beta_t - beta_n
    mass_b = nt.cdf_at(np.full(p.shape, K)) - nt.cdf_at(np.full(p.shape, -K - 1))
    # envelope pieces: sup target/(branch-probability * proposal-pmf)
    Mb = _KAPPA * np.sqrt(1.0 + K / pf) * mass_b / bulk_w
    Mt = 2.0 * _KAPPA * nt.a2 * np.sqrt(1.0 / K + 1.0 / pf) / (math.sqrt(K) * beta_t)
    g = table.tail_exponent - 1.0
    c_ans = 2.0 * table.w(table.pad_len) * table.pad_len**table.tail_exponent / table.c_q
    Mn = (
        _KAPPA * c_ans * ((K + 2.0) / K) ** (g + 1.0)
        / (g * (K + 1.0) ** g * beta_n)
    )
    M = np.maximum(np.maximum(Mb, Mt), Mn)

    u = rng.random(p.shape)
    take_t = u < beta_t
    take_n = (u >= beta_t) & (u < beta_t + beta_n)
    bulk = ~(take_t | take_n)
    s = np.empty(p.shape, dtype=np.int64)
    acc = np.empty(p.shape, dtype=float)
    if np.any(bulk):
        sb, mb = _sample_window(nt, -K, K, rng, int(bulk.sum()))
        acc[bulk] = h_up((p[bulk] + sb).astype(float)) / hp[bulk] * mb / (bulk_w * M[bulk])
        s[bulk] = sb
    if np.any(take_t):
        ut = rng.random(int(take_t.sum()))
        st = np.maximum(np.ceil(np.minimum(K / ut**2, 4e18)).astype(np.int64), K + 1)
        r0, r1 = np.sqrt(st - 1.0), np.sqrt(st.astype(float))
        pmf = math.sqrt(K) / (r0 * r1 * (r0 + r1))
        target = table.nu(st) * h_up((p[take_t] + st).astype(float)) / hp[take_t]
        acc[take_t] = target / (beta_t * pmf * M[take_t])
        s[take_t] = st
    if np.any(take_n):
        un = np.maximum(rng.random(int(take_n.sum())), 1e-15)
        m = np.minimum(np.floor((K + 1.0) * un ** (-1.0 / g)), 8e18).astype(np.int64)
        m = np.maximum(m, K + 1)
        pmf = ((K + 1.0) / m) ** g - ((K + 1.0) / (m + 1.0)) ** g
        pn = p[take_n]
        alive = m <= pn - 1
        hnew = np.where(alive, h_up(np.maximum(pn - m, 1).astype(float)), 0.0)
        target = table.nu(-m) * hnew / hp[take_n]
        acc[take_n] = np.where(alive, target / (beta_n * pmf * M[take_n]), 0.0)
        s[take_n] = -m
    return s, acc


@dataclass(frozen=True)
class StepLaw:
    """Explicit transition law of one peeling step at half-perimeter p.

    ``mode`` is "finite" or "infinite".  Event probabilities follow the
    module conventions; ``support`` enumerates events to a cumulative tail
    remainder below ``mass_tol`` (documented bound for C_k truncation).
    """

    table: PartitionTable
    mode: str
    p: int
    mass_tol: float = 1e-12

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("p must be >= 1")
        if self.mode not in ("finite", "infinite"):
            raise ValueError("mode must be finite or infinite")

    def prob_C(self, k) -> float:
        """Probability of discovering a face of degree 2k."""
        k = np.asarray(k)
        s = k - 1
        t = self.table
        if self.mode == "finite":
            val = t.nu(s) * t.w(self.p + s, strict=False) / t.w(self.p)
        else:
            val = t.nu(s) * h_up((self.p + s).astype(float)) / h_up(float(self.p))
        return val if np.ndim(val) else float(val)

    def prob_G(self, j: int, side: str = "right") -> float:
        """Probability of gluing with swallowed half-perimeter j on a side.

        In finite mode j indexes the ordered split (j, p-1-j); the filled
        hole is the smaller one.  In infinite mode j is the swallowed finite
        hole and the two sides are uniform.
        """
        t, p = self.table, self.p
        if side not in ("left", "right"):
            raise ValueError("side must be left or right")
        if not 0 <= j <= p - 1:
            raise ValueError("split index out of range")
        if self.mode == "finite":
            # per-orientation ordered-split probability W_j W_{p-1-j} / W_p
            return float(t.w(j) * t.w(p - 1 - j) / (t.w(p) * t.c_q))
        retained = p - 1 - j
        if retained <= 0:
            return 0.0
        return float(0.5 * t.nu(-(j + 1)) * h_up(float(retained)) / h_up(float(p)))

    def step_probability(self, s: int) -> float:
        """Probability that the half-perimeter changes by s in one step."""
        t, p = self.table, self.p
        if s >= 0:
            return float(self.prob_C(np.asarray(s + 1)))
        j = -s - 1
        if self.mode == "finite":
            if j > (p - 1) // 2:
                return 0.0
            mult = 1.0 if 2 * j + 1 == p else 2.0
            return mult * self.prob_G(j)
        if p + s < 1 and p + s != 0:
            return 0.0
        return 2.0 * self.prob_G(j) if j <= p - 1 else 0.0

    def total_mass(self, s_max: int | None = None) -> float:
        """Total probability enumerated up to the documented tail bound."""
        t, p = self.table, self.p
        if self.mode == "infinite":
            # exact normalization via the harmonicity identity machinery
            from .partition import harmonicity_defect

            return 1.0 + float(harmonicity_defect(t, [p])[0])
        if s_max is None:
            # algebraic envelope: remainder <= a2 * p^2 / s^3
            a2 = _tables(t).a2
            s_max = int(max(4096, (a2 * max(p, 1) ** 2 / self.mass_tol) ** (1.0 / 3.0)))
            s_max = min(s_max, _S_TAB - 1)
        s = np.arange(0, s_max + 1)
        total = float(np.sum(self.prob_C(s + 1)))
        for j in range(0, (p - 1) // 2 + 1):
            mult = 1.0 if 2 * j + 1 == p else 2.0
            total += mult * self.prob_G(j)
        return total

    def sample(self, rng, n: int = 1):
        """Draw n steps; see sample_steps for the encoding."""
        return sample_steps(self.table, np.full(n, self.p), self.mode, rng)


def transition_law(table: PartitionTable, mode: str, p: int) -> StepLaw:
    """Transition law of one peeling step; see StepLaw."""
    if mode == "finite" and p > 8 * table.L_max:
        raise ValueError("perimeter beyond usable table range")
    return StepLaw(table=table, mode=mode, p=p)
