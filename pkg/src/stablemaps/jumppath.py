"""Compound-Poisson-with-drift paths (truncated Lévy processes).

A JumpPath is the simulable truncation of a Lévy process: linear drift,
a per-unit-time compensation constant for the omitted sub-threshold jumps,
and finitely many recorded jumps.  Evaluation is right-continuous.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["JumpPath"]


@dataclass(frozen=True)
class JumpPath:
    """Piecewise-linear path with jumps: start + (drift+compensation)*t
    + sum of jump sizes at times <= t."""

    horizon: float
    start: float = 0.0
    drift: float = 0.0
    compensation: float = 0.0
    eps_cut: float = 0.0
    jump_times: np.ndarray = None
    jump_sizes: np.ndarray = None

    def __post_init__(self):
        if self.horizon < 0:
            raise ValueError("horizon must be >= 0")
        jt = np.asarray([] if self.jump_times is None else self.jump_times,
                        dtype=float)
        js = np.asarray([] if self.jump_sizes is None else self.jump_sizes,
                        dtype=float)
        if jt.shape != js.shape:
            raise ValueError("jump times and sizes must align")
        if jt.size and (np.any(np.diff(jt) <= 0) or jt[0] <= 0
                        or jt[-1] > self.horizon):
            raise ValueError("jump times must be strictly increasing in "
                             "(0, horizon]")
        object.__setattr__(self, "jump_times", jt)
        object.__setattr__(self, "jump_sizes", js)

    @property
    def slope(self) -> float:
        return self.drift + self.compensation

    def __call__(self, t):
        """Evaluate the path (right-continuously) at times t."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > self.horizon):
            raise ValueError("evaluation time outside [0, horizon]")
        k = np.searchsorted(self.jump_times, t, side="right")
        csum = np.concatenate([[0.0], np.cumsum(self.jump_sizes)])
        out = self.start + self.slope * t + csum[k]
        return out if out.ndim else float(out)

    def knots(self):
        """(times, left-limit values, post-jump values) at 0, jumps, horizon."""
        times = np.concatenate([[0.0], self.jump_times, [self.horizon]])
        csum = np.concatenate([[0.0], np.cumsum(self.jump_sizes)])
        pre = self.start + self.slope * times
        left = pre + np.concatenate([[0.0], csum[:-1], [csum[-1]]])
        right = pre + np.concatenate([csum, [csum[-1]]])
        return times, left, right

    def min_value(self) -> float:
        """Pathwise infimum over [0, horizon] (attained at a knot)."""
        _, left, right = self.knots()
        return float(min(left.min(), right.min()))

    def extended(self, other: "JumpPath") -> "JumpPath":
        """Concatenate an independent increment path after this one."""
        if other.start != 0.0:
            raise ValueError("extension must start from 0")
        return JumpPath(
            horizon=self.horizon + other.horizon,
            start=self.start, drift=self.drift,
            compensation=self.compensation, eps_cut=self.eps_cut,
            jump_times=np.concatenate([self.jump_times,
                                       self.horizon + other.jump_times]),
            jump_sizes=np.concatenate([self.jump_sizes, other.jump_sizes]))
