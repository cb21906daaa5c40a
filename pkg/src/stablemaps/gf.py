"""Self-similar growth-fragmentation cell systems.

The root cell evolves as X^(alpha) from x; every negative jump of absolute
size >= delta starts an independent child cell from that size, recursively
(children are Ulam-labelled in decreasing order of birth size).  Because a
negative jump of the underlying path removes at most half the cell's value
(jump ratios e^y - 1 > -1/2), sizes at least halve down the genealogy and
the number of cells ever exceeding delta is finite on every run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lamperti import lamperti
from .levy import sample_xi

__all__ = ["GFState", "growth_fragmentation"]


@dataclass(frozen=True)
class GFState:
    """Multiset of alive cell sizes at one time."""

    t: float
    cells: tuple  # (size, ulam_label, birth_time), sizes non-increasing
    cutoff: float

    @property
    def sizes(self) -> np.ndarray:
        return np.asarray([c[0] for c in self.cells])


def growth_fragmentation(x: float, alpha: float, t_grid, delta: float,
                         rng=None, eps_cut: float = 0.01,
                         max_cells: int = 200000) -> list:
    """Simulate the growth-fragmentation driven by X^(alpha); returns the
    list of GFState at each grid time.  delta > 0 bounds the tree."""
    if delta <= 0:
        raise ValueError("delta must be positive (delta = 0 is an "
                         "unbounded tree)")
    if alpha not in (0.0, -1.0):
        raise ValueError("alpha must be 0 or -1")
    if rng is None:
        rng = np.random.default_rng()
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if np.any(t_grid < 0):
        raise ValueError("t_grid must be non-negative")
    tmax = float(t_grid.max(initial=0.0))

    # (label, birth_time, birth_size), explored depth-first
    stack = [("", 0.0, x)]
    cells = []  # (label, birth, LampertiResult on the local grid)
    while stack:
        label, birth, size = stack.pop()
        if len(cells) >= max_cells:
            raise RuntimeError("growth-fragmentation cell budget exceeded")
        local = np.clip(t_grid - birth, 0.0, None)
        horizon = max(tmax - birth, 1e-9) if alpha == 0.0 else 4.0
        xp = sample_xi(horizon, eps_cut, rng)
        res = lamperti(xp, alpha, size, local, rng=rng)
        cells.append((label, birth, res))
        kids = [(float(res.jump_times[i]), float(-res.jump_sizes[i]))
                for i in range(len(res.jump_times))
                if res.jump_sizes[i] < 0
                and -res.jump_sizes[i] >= delta
                and birth + res.jump_times[i] <= tmax]
        kids.sort(key=lambda ts: -ts[1])  # Ulam order: decreasing size
        for i, (jt, sz) in enumerate(kids, start=1):
            child = f"{label}.{i}" if label else str(i)
            stack.append((child, birth + jt, sz))

    states = []
    for gi, t in enumerate(t_grid):
        alive = []
        for label, birth, res in cells:
            if birth > t:
                continue
            if not math.isinf(res.lifetime) and t - birth >= res.lifetime:
                continue
            v = float(res.values[gi])
            if v > 0.0:
                alive.append((v, label, birth))
        alive.sort(key=lambda c: -c[0])
        states.append(GFState(t=float(t), cells=tuple(alive), cutoff=delta))
    return states
