"""Branching cell systems built over peeling explorations.

A cell is one locally-largest peeling branch of a finite Boltzmann map;
every gluing event that swallows a hole of half-perimeter >= cutoff spawns
a child cell, explored as an independent Boltzmann map of that perimeter
(spatial Markov property).  Cells are indexed by Ulam labels: the root is
"", its children "1", "2", ... in non-increasing order of swallowed size
(ties broken by decreasing jump time), grandchildren "1.2" and so on.

Time bookkeeping: a child born at local jump step N of its parent has
birth time B_child = B_parent + N, and birth height
H~_child = H~_parent + H_parent(N); a face discovered at local step k of
cell u has global exploration time n(f) = B_u + k.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .exploration import run_exploration
from .partition import PartitionTable

__all__ = ["Cell", "CellSystem", "run_cell_system", "ball_perimeters",
           "decorate_o2"]


@dataclass(frozen=True)
class Cell:
    """One explored peeling branch; local traces plus birth bookkeeping."""

    label: str
    P: np.ndarray
    H: np.ndarray
    birth_time: int
    birth_height: int
    parent_jump_index: int
    faces: tuple  # (degree, local_step, local_height) per C event
    swallowed: tuple  # (local_step, half_perimeter) per G event
    absorbed: bool
    nesting: int = 0  # number of enclosing O(2) loops

    def to_dict(self) -> dict:
        return {
            "P": [int(x) for x in self.P],
            "H": [int(x) for x in self.H],
            "birth_time": self.birth_time,
            "birth_height": self.birth_height,
            "parent_jump_index": self.parent_jump_index,
            "faces": [list(f) for f in self.faces],
            "swallowed": [list(s) for s in self.swallowed],
            "absorbed": self.absorbed,
            "nesting": self.nesting,
        }


@dataclass(frozen=True)
class CellSystem:
    """All cells of one exploration, keyed by Ulam label string."""

    cells: dict
    ell: int
    cutoff: int
    algo: str
    loops: tuple = ()  # (host_label, local_step, half_degree) once decorated

    @property
    def root(self) -> Cell:
        return self.cells[""]

    def to_dict(self) -> dict:
        return {
            "ell": self.ell,
            "cutoff": self.cutoff,
            "algo": self.algo,
            "cells": {u: c.to_dict() for u, c in sorted(self.cells.items())},
            "loops": [list(x) for x in self.loops],
        }


def _explore_cell(table, label, p0, birth_time, birth_height, jump_index,
                  algo, mode, rng, max_steps, nesting=0):
    tr = run_exploration(table, p0, algo=algo, mode=mode, rng=rng,
                         max_steps=max_steps)
    swallowed = tuple(
        (n, ev.j) for n, ev in enumerate(tr.events) if ev.kind == "G"
    )
    return Cell(label=label, P=tr.P, H=tr.H, birth_time=birth_time,
                birth_height=birth_height, parent_jump_index=jump_index,
                faces=tr.faces, swallowed=swallowed, absorbed=tr.absorbed,
                nesting=nesting)


def _spawn_children(cell: Cell, cutoff: int):
    """Child seeds of a cell: (jump_step, size) sorted by the Ulam rule."""
    cand = [(n, j) for n, j in cell.swallowed if j >= cutoff]
    cand.sort(key=lambda nj: (-nj[1], -nj[0]))
    return cand


def run_cell_system(table: PartitionTable, ell: int, algo: str = "layers",
                    cutoff: int = 1, rng=None, max_steps: int = 10**7,
                    mode: str = "finite") -> CellSystem:
    """Breadth-first cell system of one finite Boltzmann map exploration."""
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1 (cutoff 0 is an unbounded tree)")
    if rng is None:
        rng = np.random.default_rng()
    root = _explore_cell(table, "", ell, 0, 0, 0, algo, mode, rng, max_steps)
    cells = {"": root}
    queue = [root]
    while queue:
        parent = queue.pop(0)
        for i, (n, j) in enumerate(_spawn_children(parent, cutoff), start=1):
            label = f"{parent.label}.{i}" if parent.label else str(i)
            child = _explore_cell(
                table, label, j,
                parent.birth_time + n,
                parent.birth_height + int(parent.H[n]),
                n, algo, "finite", rng, max_steps,
                nesting=parent.nesting)
            cells[label] = child
            queue.append(child)
    return CellSystem(cells=cells, ell=ell, cutoff=cutoff, algo=algo)


def ball_perimeters(cs: CellSystem, r: int) -> list:
    """Half-perimeters of the cycles at global height r, non-increasing.

    Each cell alive at height r (born at or below r, reaching r before it
    dies) contributes its perimeter at the first local step where its
    global height H~_u + H_u(n) reaches r.  Cells swallowed below the
    cutoff are not tracked and contribute nothing.
    """
    if r < 0:
        raise ValueError("height must be >= 0")
    out = []
    for cell in cs.cells.values():
        local = r - cell.birth_height
        if local < 0:
            continue
        hit = np.flatnonzero(cell.H >= local)
        if hit.size == 0:
            continue
        n = int(hit[0])
        if cell.P[n] >= 1:
            out.append(int(cell.P[n]))
    out.sort(reverse=True)
    return out


def decorate_o2(table: PartitionTable, cs: CellSystem, rng=None,
                max_depth: int = 16) -> CellSystem:
    """Decorate a cell system with O(2) loops.

    Every discovered face of half-degree k independently becomes a loop
    with probability 2 W^(k) / (c_q^(2k) q_k); a loop face of half-degree
    >= cutoff recursively hosts a fresh decorated exploration of
    half-perimeter k whose cells sit one nesting level deeper.  A computed
    loop probability > 1 signals an inadmissible weight sequence.
    """
    if rng is None:
        rng = np.random.default_rng()
    cells = dict(cs.cells)
    loops = list(cs.loops)
    frontier = list(cs.cells.values())
    depth = 0
    while frontier and depth < max_depth:
        new_frontier = []
        for cell in frontier:
            for deg, step, _h in cell.faces:
                k = deg // 2
                p = float(table.loop_probability(k))
                if not np.isfinite(p) or p > 1.0:
                    raise ValueError(
                        f"inadmissible weight sequence: loop probability "
                        f"{p} > 1 at half-degree k={k}")
                if rng.random() >= p:
                    continue
                loops.append((cell.label, step, k))
                if k < cs.cutoff:
                    continue  # loop recorded, interior not explored
                sub = run_cell_system(table, k, algo=cs.algo,
                                      cutoff=cs.cutoff, rng=rng)
                base = f"{cell.label}:{step}" if cell.label else f":{step}"
                for u, c in sub.cells.items():
                    lbl = f"{base}/{u}" if u else base
                    c2 = replace(c, label=lbl, nesting=cell.nesting + 1,
                                 birth_height=cell.birth_height)
                    cells[lbl] = c2
                    new_frontier.append(c2)
        frontier = new_frontier
        depth += 1
    return CellSystem(cells=cells, ell=cs.ell, cutoff=cs.cutoff,
                      algo=cs.algo, loops=tuple(loops))
