"""Face-weight sequences for bipartite Boltzmann planar maps.

A weight sequence assigns a non-negative weight ``q_k`` to every face of
degree ``2k``.  Two flavours are supported:

* the built-in preset ``"budd-o2-example"``, an infinite sequence with a
  geometric-times-algebraic tail whose scaling constants are known to be in
  the 3/2-stable (type 2) universality class, and
* finite user tables ``{k: q_k}`` where absent entries default to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

PRESET_NAME = "budd-o2-example"


def _preset_coef(k):
    """Algebraic part of the preset weights: q_k * (3*pi)^(k-1).

    Valid for real k (used by tail integrals); equals
    (2/pi)/((2k-3)(2k-1)) + 1_{k=1}.
    """
    k = np.asarray(k, dtype=float)
    out = (2.0 / math.pi) / ((2.0 * k - 3.0) * (2.0 * k - 1.0))
    return out + (k == 1.0)


@dataclass(frozen=True)
class WeightSequence:
    """Lazily evaluable sequence q_k of face weights.

    Attributes
    ----------
    descriptor : preset name or ``"table"``.
    table : explicit entries for user tables (empty for presets).
    geom_scale : s such that q_k = coef(k) * s^(1-k) with coef algebraically
        decaying; this is the radius of convergence of sum q_k t^(k-1).
        ``inf`` for finite tables.
    kmax : largest k with q_k > 0, or None for infinite support.
    tail_exponent_hint : optional expected exponent of the partition tail.
    """

    descriptor: str
    table: dict = field(default_factory=dict)
    geom_scale: float = math.inf
    kmax: int | None = None
    tail_exponent_hint: float | None = None

    @property
    def is_preset(self) -> bool:
        return self.descriptor == PRESET_NAME

    @property
    def has_smooth_tail(self) -> bool:
        """Whether q extends to a smooth function of real k (tail integrals)."""
        return self.is_preset

    def q(self, k):
        """Weight of a face of degree 2k; vectorized over integer k >= 1."""
        k = np.asarray(k)
        if np.any(k < 1):
            raise ValueError("face half-degree k must be >= 1")
        if self.is_preset:
            kf = k.astype(float)
            return _preset_coef(kf) * (3.0 * math.pi) ** (1.0 - kf)
        out = np.zeros(k.shape, dtype=float)
        for kk, v in self.table.items():
            out[k == kk] = v
        return out if out.ndim else float(out)

    def nu_plus(self, m, c):
        """Scaled growth coefficients nu+(m) = q_{m+1} * c^m, m >= 0.

        Computed without overflow for the preset by cancelling the geometric
        part against ``geom_scale``.
        """
        m = np.asarray(m, dtype=float)
        if self.is_preset:
            return _preset_coef(m + 1.0) * (c / self.geom_scale) ** m
        out = np.zeros(m.shape, dtype=float)
        for kk, v in self.table.items():
            out[m == kk - 1] = v * c ** (kk - 1)
        return out

    def nu_plus_coef_sup(self, c):
        """sup_m (m^2 * nu+(m; c)) over m >= 1: algebraic tail envelope."""
        m = np.arange(1.0, 4097.0)
        vals = self.nu_plus(m, c) * m**2
        return float(vals.max()) if vals.size else 0.0


def make_weight_sequence(preset_or_table) -> WeightSequence:
    """Build a WeightSequence from a preset name or a finite {k: q_k} table."""
    if isinstance(preset_or_table, str):
        if preset_or_table != PRESET_NAME:
            raise ValueError(f"unknown preset {preset_or_table!r}")
        return WeightSequence(
            descriptor=PRESET_NAME,
            geom_scale=3.0 * math.pi,
            kmax=None,
            tail_exponent_hint=2.0,
        )
    if isinstance(preset_or_table, WeightSequence):
        return preset_or_table
    table = {int(k): float(v) for k, v in dict(preset_or_table).items()}
    if any(k < 1 for k in table):
        raise ValueError("face half-degrees must be >= 1")
    if any(v < 0 for v in table.values()):
        raise ValueError("negative face weight")
    table = {k: v for k, v in table.items() if v > 0}
    if not table:
        raise ValueError("all-zero weight sequence")
    return WeightSequence(
        descriptor="table",
        table=table,
        geom_scale=math.inf,
        kmax=max(table),
    )
