"""Vectorized ensemble kernels for the Monte-Carlo experiments.

All replicates of an experiment advance in lockstep: one sample_steps call
per peeling step serves every alive replicate, which keeps the Python
overhead at O(steps) instead of O(steps * replicates).  The layered
bookkeeping is the branchless counterpart of boundary.peel_step on the
compressed (p, m, h) state.
"""

from __future__ import annotations

import numpy as np

from .partition import PartitionTable
from .steplaw import sample_steps

__all__ = ["uniform_ensemble", "height_ensemble", "faces_ensemble",
           "ball_ensemble"]


def _layer_update(p, m, h, s, go_left):
    """Apply signed steps s to compressed layered states (vectorized).

    Returns (p, m, h, height_inc).  Entries with s >= 0 are C events
    (peeled low edge replaced by high edges); s = -(j+1) are G events
    removing the peeled edge, its partner and the 2j edges between them on
    the chosen side.  Absorbed entries end with p = 0.
    """
    grow = s >= 0
    j = -s - 1
    new_p = p + s
    rem_right = np.minimum(2 * j + 2, m)
    rem_left = 1 + np.maximum(0, m - (2 * p - 2 * j - 1))
    new_m = np.where(grow, m - 1,
                     m - np.where(go_left, rem_left, rem_right))
    dead = new_p == 0
    norm = (~dead) & (new_m == 0)
    new_m = np.where(norm, 2 * new_p, new_m)
    new_m = np.where(dead, 0, new_m)
    inc = norm.astype(h.dtype)
    return new_p, new_m, h + inc, inc


def uniform_ensemble(table: PartitionTable, ell: int, N: int, record_steps,
                     mode: str, rng, with_fpp: bool = False,
                     max_steps: int | None = None,
                     run_to_absorption: bool = False) -> dict:
    """Uniform-peeling perimeter (and fpp clock) ensemble.

    Returns P at every requested step for each replicate (0 once
    absorbed), the fpp clock T at those steps if requested, and the
    absorption step (-1 while alive at the end).
    """
    record_steps = np.asarray(sorted(record_steps), dtype=np.int64)
    horizon = int(record_steps.max(initial=0))
    if max_steps is None:
        max_steps = horizon if (mode == "infinite" or not run_to_absorption) \
            else max(100 * ell, horizon)
    P = np.full(N, ell, dtype=np.int64)
    T = np.zeros(N) if with_fpp else None
    absorb = np.full(N, -1, dtype=np.int64)
    P_rec = np.zeros((len(record_steps), N), dtype=np.int64)
    T_rec = np.zeros((len(record_steps), N)) if with_fpp else None
    ptr = 0
    for n in range(max_steps + 1):
        while ptr < len(record_steps) and record_steps[ptr] == n:
            P_rec[ptr] = P
            if with_fpp:
                T_rec[ptr] = T
            ptr += 1
        if n == max_steps:
            break
        alive = np.flatnonzero(P > 0)
        if alive.size == 0:
            # remaining records are constant (all replicates dead)
            while ptr < len(record_steps):
                P_rec[ptr] = P
                if with_fpp:
                    T_rec[ptr] = T
                ptr += 1
            break
        pa = P[alive]
        if with_fpp:
            T[alive] += rng.exponential(size=alive.size) / (2.0 * pa)
        s = sample_steps(table, pa, mode, rng)
        P[alive] = pa + s
        died = alive[P[alive] == 0]
        absorb[died] = n + 1
        if ptr >= len(record_steps) and not run_to_absorption:
            break
    out = {"P": P_rec, "absorb_step": absorb, "record_steps": record_steps}
    if with_fpp:
        out["T"] = T_rec
    return out


def height_ensemble(table: PartitionTable, ell: int, N: int, record_steps,
                    rng, mode: str = "finite") -> dict:
    """Peeling-by-layers ensemble recording heights (and perimeters)."""
    record_steps = np.asarray(sorted(record_steps), dtype=np.int64)
    horizon = int(record_steps.max(initial=0))
    p = np.full(N, ell, dtype=np.int64)
    m = np.full(N, 2 * ell, dtype=np.int64)
    h = np.zeros(N, dtype=np.int64)
    absorb = np.full(N, -1, dtype=np.int64)
    H_rec = np.zeros((len(record_steps), N), dtype=np.int64)
    P_rec = np.zeros((len(record_steps), N), dtype=np.int64)
    ptr = 0
    for n in range(horizon + 1):
        while ptr < len(record_steps) and record_steps[ptr] == n:
            H_rec[ptr], P_rec[ptr] = h, p
            ptr += 1
        if n == horizon:
            break
        alive = np.flatnonzero(p > 0)
        if alive.size == 0:
            while ptr < len(record_steps):
                H_rec[ptr], P_rec[ptr] = h, p
                ptr += 1
            break
        s = sample_steps(table, p[alive], mode, rng)
        left = rng.random(alive.size) < 0.5
        np_, nm, nh, _ = _layer_update(p[alive], m[alive], h[alive], s, left)
        p[alive], m[alive], h[alive] = np_, nm, nh
        absorb[alive[np_ == 0]] = n + 1
    return {"H": H_rec, "P": P_rec, "absorb_step": absorb,
            "record_steps": record_steps}


def faces_ensemble(table: PartitionTable, ell: int, N: int, rng,
                   top: int = 3, degree_floor: int | None = None,
                   max_steps: int | None = None) -> dict:
    """Largest faces of the locally-largest layers branch, per replicate.

    Runs each replicate to absorption (capped) and keeps every discovered
    face of half-degree >= degree_floor (default ell // 256, far below any
    plausible top-`top` face).  Returns ragged face records plus the
    per-replicate top-`top` (degree, step, height) triples, ranked by
    non-increasing degree.
    """
    if degree_floor is None:
        degree_floor = max(2, ell // 256)
    if max_steps is None:
        max_steps = 200 * ell
    p = np.full(N, ell, dtype=np.int64)
    m = np.full(N, 2 * ell, dtype=np.int64)
    h = np.zeros(N, dtype=np.int64)
    reps, degs, steps, heights = [], [], [], []
    for n in range(max_steps):
        alive = np.flatnonzero(p > 0)
        if alive.size == 0:
            break
        s = sample_steps(table, p[alive], "finite", rng)
        big = s + 1 >= degree_floor
        if np.any(big):
            reps.append(alive[big])
            degs.append(2 * (s[big] + 1))
            steps.append(np.full(int(big.sum()), n, dtype=np.int64))
            heights.append(h[alive][big])
        left = rng.random(alive.size) < 0.5
        np_, nm, nh, _ = _layer_update(p[alive], m[alive], h[alive], s, left)
        p[alive], m[alive], h[alive] = np_, nm, nh
    if np.any(p > 0):
        raise RuntimeError("faces ensemble hit the step cap before "
                           "absorption of all replicates")
    rep = np.concatenate(reps) if reps else np.empty(0, dtype=np.int64)
    deg = np.concatenate(degs) if degs else np.empty(0, dtype=np.int64)
    stp = np.concatenate(steps) if steps else np.empty(0, dtype=np.int64)
    hgt = np.concatenate(heights) if heights else np.empty(0, dtype=np.int64)

    out = np.full((N, top, 3), -1, dtype=np.int64)
    order = np.lexsort((stp, -deg, rep))  # by rep, then degree desc
    rep_s, deg_s = rep[order], deg[order]
    stp_s, hgt_s = stp[order], hgt[order]
    starts = np.searchsorted(rep_s, np.arange(N), side="left")
    ends = np.searchsorted(rep_s, np.arange(N), side="right")
    for i in range(N):
        k = min(top, ends[i] - starts[i])
        sl = slice(starts[i], starts[i] + k)
        out[i, :k, 0] = deg_s[sl]
        out[i, :k, 1] = stp_s[sl]
        out[i, :k, 2] = hgt_s[sl]
    return {"top": out, "rep": rep, "deg": deg, "step": stp, "height": hgt}


def ball_ensemble(table: PartitionTable, ell: int, N: int, r: int,
                  cutoff: int, rng, top: int = 3,
                  max_steps: int | None = None) -> np.ndarray:
    """Top-`top` cycle half-perimeters at global height r per replicate.

    Wave-vectorized branching: all tracked cells of all replicates step in
    lockstep; a cell records its perimeter the first time its global
    height reaches r (at birth, if born there) and is retired once its
    height exceeds r.  Children below `cutoff` are not tracked.
    """
    if r < 0:
        raise ValueError("height must be >= 0")
    if max_steps is None:
        max_steps = 400 * ell * (r + 1)
    rec_rep, rec_val = [], []

    rep = np.arange(N, dtype=np.int64)
    p = np.full(N, ell, dtype=np.int64)
    m = np.full(N, 2 * ell, dtype=np.int64)
    h = np.zeros(N, dtype=np.int64)
    if r == 0:
        rec_rep.append(rep.copy())
        rec_val.append(p.copy())
    buf_rep, buf_p, buf_h = [], [], []
    for n in range(max_steps):
        if p.size == 0:
            if not buf_rep:
                break
            rep = np.concatenate([np.asarray(x, dtype=np.int64)
                                  for x in buf_rep])
            p = np.concatenate([np.asarray(x, dtype=np.int64)
                                for x in buf_p])
            h = np.concatenate([np.asarray(x, dtype=np.int64)
                                for x in buf_h])
            m = 2 * p
            buf_rep, buf_p, buf_h = [], [], []
            born_here = h == r
            if np.any(born_here):
                rec_rep.append(rep[born_here])
                rec_val.append(p[born_here])
            continue
        s = sample_steps(table, p, "finite", rng)
        # children: G events swallowing >= cutoff, born at the current h
        j = -s - 1
        is_child = (s < 0) & (j >= cutoff) & (h <= r)
        if np.any(is_child):
            buf_rep.append(rep[is_child])
            buf_p.append(j[is_child])
            buf_h.append(h[is_child])
        left = rng.random(p.size) < 0.5
        p, m, h, inc = _layer_update(p, m, h, s, left)
        hit = (inc == 1) & (h == r) & (p > 0)
        if np.any(hit):
            rec_rep.append(rep[hit])
            rec_val.append(p[hit])
        keep = (p > 0) & (h <= r)
        rep, p, m, h = rep[keep], p[keep], m[keep], h[keep]
    else:
        raise RuntimeError("ball ensemble hit the step cap")

    out = np.zeros((N, top), dtype=np.int64)
    if rec_rep:
        rr = np.concatenate(rec_rep)
        vv = np.concatenate(rec_val)
        order = np.lexsort((-vv, rr))
        rr, vv = rr[order], vv[order]
        starts = np.searchsorted(rr, np.arange(N), side="left")
        ends = np.searchsorted(rr, np.arange(N), side="right")
        for i in range(N):
            k = min(top, ends[i] - starts[i])
            out[i, :k] = vv[starts[i] : starts[i] + k]
    return out
