"""Reader for the verification harness's CSV/verdict file contract.

Each experiment directory entry is a pair ``<name>.csv`` /
``<name>.verdict.json``.  CSV columns: ell, t, ks, ks_ci_lo, ks_ci_hi,
q01..q99, n, ess.  Rows with ell = 0 carry the continuum reference
ensemble and leave the ks fields empty.  This module never recomputes
statistics; it is a display-only consumer.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

EXPECTED_HEADER = (["ell", "t", "ks", "ks_ci_lo", "ks_ci_hi"]
                   + [f"q{i:02d}" for i in range(1, 100)] + ["n", "ess"])


class SchemaError(ValueError):
    """The file does not conform to the harness CSV contract."""


@dataclass
class Row:
    ell: int
    t: float
    ks: float | None
    ks_ci: tuple
    quantiles: np.ndarray  # q01..q99
    n: int
    ess: float


@dataclass
class ExperimentData:
    name: str
    rows: list
    verdict: dict | None = None

    @property
    def ladder(self) -> list:
        return sorted({r.ell for r in self.rows if r.ell > 0})

    @property
    def t_values(self) -> list:
        return sorted({r.t for r in self.rows})

    def row(self, ell: int, t: float) -> Row | None:
        for r in self.rows:
            if r.ell == ell and r.t == t:
                return r
        return None

    @property
    def passed(self) -> bool | None:
        if self.verdict is None:
            return None
        return bool(self.verdict.get("pass"))


def _parse_row(cells: list, lineno: int) -> Row:
    if len(cells) != len(EXPECTED_HEADER):
        raise SchemaError(f"line {lineno}: expected "
                          f"{len(EXPECTED_HEADER)} columns, got {len(cells)}")
    try:
        ell = int(cells[0])
        t = float(cells[1])
        ks = float(cells[2]) if cells[2] != "" else None
        ci = (float(cells[3]), float(cells[4])) if cells[3] != "" \
            else (None, None)
        quantiles = np.asarray([float(x) for x in cells[5:104]])
        n = int(cells[104])
        ess = float(cells[105])
    except ValueError as exc:
        raise SchemaError(f"line {lineno}: {exc}") from None
    if ks is not None and not 0.0 <= ks <= 1.0:
        raise SchemaError(f"line {lineno}: ks out of [0, 1]")
    finite = quantiles[np.isfinite(quantiles)]
    if np.any(np.diff(finite) < 0):
        raise SchemaError(f"line {lineno}: quantiles not monotone")
    return Row(ell=ell, t=t, ks=ks, ks_ci=ci, quantiles=quantiles, n=n,
               ess=ess)


def read_experiment_csv(path: str) -> ExperimentData:
    name = os.path.splitext(os.path.basename(path))[0]
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise SchemaError("empty file")
    if lines[0].split(",") != EXPECTED_HEADER:
        raise SchemaError("bad header")
    rows = [_parse_row(line.split(","), i + 2)
            for i, line in enumerate(lines[1:]) if line]
    if not rows:
        raise SchemaError("no data rows")
    data = ExperimentData(name=name, rows=rows)
    vpath = os.path.join(os.path.dirname(path), f"{name}.verdict.json")
    if os.path.exists(vpath):
        try:
            with open(vpath) as fh:
                v = json.load(fh)
            if {"experiment", "pass"} <= set(v):
                data.verdict = v
        except (json.JSONDecodeError, OSError):
            pass  # a broken verdict only loses the badge, not the figure
    return data


def discover(in_dir: str) -> list:
    """Paths of all experiment CSVs in a directory, sorted by name."""
    return sorted(os.path.join(in_dir, f) for f in os.listdir(in_dir)
                  if f.endswith(".csv"))
