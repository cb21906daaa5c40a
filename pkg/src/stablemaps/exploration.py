"""Single peeling explorations and their traces.

`run_exploration` drives one exploration of a Boltzmann map from a root
boundary of half-perimeter l, either edge-by-edge in uniform order (which
carries the first-passage-percolation clock T) or by layers (which carries
the height process H).  Ensemble experiments use the vectorized kernels in
`ensemble` instead; this scalar driver backs the CLI and the tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundary import LayeredBoundary, PeelEvent, peel_step
from .partition import PartitionTable
from .steplaw import sample_steps

__all__ = ["ExplorationTrace", "run_exploration"]

_MODE_ALIASES = {"finite": "finite", "finite_locally_largest": "finite",
                 "infinite": "infinite"}


@dataclass(frozen=True)
class ExplorationTrace:
    """Recorded observables of one exploration.

    P, H, T have length n+1 (index = step count); events has length n.
    faces lists (degree, step_index, height_at_discovery) for every C
    event.  T is the fpp clock (uniform algo only; zeros under layers).
    """

    P: np.ndarray
    H: np.ndarray
    T: np.ndarray
    events: tuple
    faces: tuple
    absorbed: bool

    def __len__(self):
        return len(self.events)


def _event_from_step(s: int, rng) -> PeelEvent:
    if s >= 0:
        return PeelEvent("C", k=int(s) + 1)
    side = "right" if rng.random() < 0.5 else "left"
    return PeelEvent("G", side=side, j=int(-s) - 1)


def run_exploration(table: PartitionTable, ell: int, algo: str = "uniform",
                    mode: str = "finite", rng=None, max_steps: int = 100000,
                    events=None, exponentials=None,
                    debug_words: bool = False) -> ExplorationTrace:
    """Explore one Boltzmann map; see the module docstring.

    ``events`` / ``exponentials`` are injection hooks: iterables that
    override the drawn PeelEvents / the exponential clocks E_n, used by
    deterministic tests.  ``debug_words`` carries the explicit boundary
    word through every step (slow; invariant suite only).
    """
    if ell < 1:
        raise ValueError("root half-perimeter must be >= 1")
    if algo not in ("uniform", "layers"):
        raise ValueError("algo must be uniform or layers")
    try:
        mode = _MODE_ALIASES[mode]
    except KeyError:
        raise ValueError(f"unknown mode {mode!r}") from None
    if rng is None:
        rng = np.random.default_rng()
    ev_iter = iter(events) if events is not None else None
    e_iter = iter(exponentials) if exponentials is not None else None

    state = LayeredBoundary(p=ell)
    if debug_words:
        state = state.with_word()
    P, H, T = [ell], [0], [0.0]
    rec_events, faces = [], []
    absorbed = False

    for n in range(max_steps):
        p, h_before = state.p, state.h
        if ev_iter is not None:
            try:
                event = next(ev_iter)
            except StopIteration:
                break
        else:
            s = int(sample_steps(table, np.asarray([p]), mode, rng)[0])
            event = _event_from_step(s, rng)
        state, out = peel_step(state, event, mode=mode)

        if algo == "uniform":
            e = next(e_iter) if e_iter is not None else rng.exponential()
            T.append(T[-1] + e / (2.0 * p))
            H.append(0)
        else:
            T.append(T[-1])
            H.append(H[-1] + out.height_increment)
        P.append(state.p)
        rec_events.append(event)
        if out.face_degree is not None:
            faces.append((out.face_degree, n, h_before))
        if out.absorbed:
            absorbed = True
            break

    return ExplorationTrace(P=np.asarray(P, dtype=np.int64),
                            H=np.asarray(H, dtype=np.int64),
                            T=np.asarray(T, dtype=float),
                            events=tuple(rec_events), faces=tuple(faces),
                            absorbed=absorbed)
