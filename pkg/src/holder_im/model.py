"""Domain types: Hölder constraint parameters, datasets and per-point neighbor views."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np


class DomainError(ValueError):
    """Input is well-formed but violates a modelling assumption."""


@dataclass(frozen=True)
class HolderConfig:
    """Constraint |f(t) - f(s)| <= M |t - s|^gamma, noise SD ``sigma``, level ``alpha``."""

    M: float = 1.0
    gamma: float = 0.5
    sigma: float = 1.0
    alpha: float = 0.05

    def __post_init__(self):
        if not (math.isfinite(self.M) and self.M >= 0):
            raise DomainError(f"M must be a finite nonnegative number, got {self.M}")
        if not 0 < self.gamma <= 1:
            raise DomainError(f"gamma must lie in (0, 1], got {self.gamma}")
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise DomainError(f"sigma must be positive, got {self.sigma}")
        if not 0 < self.alpha < 1:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha}")

    def bound(self, distance):
        """Hölder radius M * distance**gamma (vectorised)."""
        return self.M * np.abs(distance) ** self.gamma


def pairwise_bound(cfg: HolderConfig, t_i: float, t_j: float) -> float:
    return float(cfg.M * abs(t_i - t_j) ** cfg.gamma)


@dataclass(frozen=True)
class Dataset:
    """Design points with (possibly missing) responses, held in ascending-t order.

    Missing responses are ``None`` (NaN on input is treated the same way).
    Construction rejects duplicate design points; points outside [0, 1] are
    accepted but flagged through :attr:`out_of_unit_interval`.
    """

    t: tuple
    y: tuple
    out_of_unit_interval: bool = field(default=False, compare=False)

    def __init__(self, t: Sequence[float], y: Sequence[Optional[float]]):
        if len(t) != len(y):
            raise DomainError("t and y must have the same length")
        ts = [float(v) for v in t]
        ys = [None if (v is None or (isinstance(v, float) and math.isnan(v))) else float(v)
              for v in y]
        if any(not math.isfinite(v) for v in ts):
            raise DomainError("design points must be finite")
        if any(v is not None and not math.isfinite(v) for v in ys):
            raise DomainError("responses must be finite or missing")
        order = sorted(range(len(ts)), key=lambda k: ts[k])
        ts = [ts[k] for k in order]
        ys = [ys[k] for k in order]
        for a, b in zip(ts, ts[1:]):
            if a == b:
                raise DomainError(f"duplicate design point t={a}")
        outside = any(v < 0 or v > 1 for v in ts)
        if outside:
            warnings.warn("design points outside [0, 1]; Hölder bounds applied as-is",
                          stacklevel=2)
        object.__setattr__(self, "t", tuple(ts))
        object.__setattr__(self, "y", tuple(ys))
        object.__setattr__(self, "out_of_unit_interval", outside)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple]) -> "Dataset":
        pairs = list(pairs)
        return cls([p[0] for p in pairs], [p[1] for p in pairs])

    def __len__(self):
        return len(self.t)

    @property
    def observed(self) -> list[int]:
        return [k for k, v in enumerate(self.y) if v is not None]

    @property
    def missing(self) -> list[int]:
        return [k for k, v in enumerate(self.y) if v is None]


def _readonly(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class NeighborView:
    """Other observed points seen from ``target_index``, nearest first.

    ``bounds[j]`` is the Hölder radius for neighbor j and ``diffs[j]`` is
    ``y_target - y_neighbor``; both are in response units.
    """

    target_index: int
    ordered_indices: tuple
    distances: np.ndarray
    bounds: np.ndarray
    diffs: np.ndarray

    def __len__(self):
        return len(self.ordered_indices)

    def scaled(self, sigma: float) -> "NeighborView":
        """Same view with bounds and diffs divided by ``sigma``."""
        return NeighborView(self.target_index, self.ordered_indices, self.distances,
                            _readonly(self.bounds / sigma), _readonly(self.diffs / sigma))

    @classmethod
    def from_bounds(cls, bounds: Sequence[float], diffs: Sequence[float] | None = None):
        """Synthetic view for solver work where only the bounds matter."""
        b = np.asarray(bounds, dtype=float)
        d = np.zeros_like(b) if diffs is None else np.asarray(diffs, dtype=float)
        return cls(0, tuple(range(1, len(b) + 1)), _readonly(np.full_like(b, np.nan)),
                   _readonly(b), _readonly(d))


def neighbor_view(data: Dataset, cfg: HolderConfig, i: int) -> NeighborView:
    """Sort the other observed points by distance to point ``i`` (ties: ascending t)."""
    if not 0 <= i < len(data):
        raise DomainError(f"point index {i} out of range")
    y_i = data.y[i]
    if y_i is None:
        raise DomainError(f"point {i} (t={data.t[i]}) has no observed response")
    others = [k for k in data.observed if k != i]
    if not others:
        raise DomainError("no other observed point to condition on")
    t = np.array([data.t[k] for k in others])
    dist = np.abs(t - data.t[i])
    order = np.lexsort((t, dist))
    idx = tuple(others[k] for k in order)
    dist = dist[order]
    diffs = np.array([y_i - data.y[k] for k in idx])
    return NeighborView(i, idx, _readonly(dist), _readonly(cfg.bound(dist)), _readonly(diffs))
