"""Seeded Monte Carlo experiments: width comparisons, coverage, curve fitting.

Every trial draws from its own Philox stream keyed by ``(seed, trial)``, so
results do not depend on evaluation order or on the number of workers.
Normal variates are produced by inverting the CDF with :func:`phi_inv`.
"""

from __future__ import annotations

import bisect
import enum
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .gauss import critical_value, phi_inv
from .im_core import Method, PlausibilityInterval, one_point_region
from .model import Dataset, DomainError, HolderConfig, neighbor_view
from .partial_cond import (
    MixingWeights,
    OptimizerOptions,
    interval_for_point,
    interval_with_weights,
    optimize_weights,
    two_point_optimal,
    width_objective,
)


class Truth(str, enum.Enum):
    SQRT = "sqrt"
    ZERO = "zero"

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.sqrt(t) if self is Truth.SQRT else np.zeros_like(t)


class Design(str, enum.Enum):
    UNIFORM = "uniform"
    EQUISPACED = "equispaced"


COVERAGE_METHODS = ("one_point", "marginal", "partial", "cond_1pt", "cond_all")


@dataclass(frozen=True)
class ExperimentConfig:
    """Simulation settings.

    ``target`` fixes the observation whose mean is covered in
    :func:`coverage_estimate` and restricts :func:`run_n_point` to a single
    point; ``None`` means a uniformly drawn point per trial in the former
    and every point in the latter.
    """

    n_points: int = 2
    trials: int = 100
    seed: int = 1234
    truth: Truth = Truth.SQRT
    design: Design = Design.UNIFORM
    cfg: HolderConfig = field(default_factory=HolderConfig)
    target: Optional[int] = None
    opts: OptimizerOptions = field(default_factory=OptimizerOptions)

    def __post_init__(self):
        object.__setattr__(self, "truth", Truth(self.truth))
        object.__setattr__(self, "design", Design(self.design))
        if self.n_points < 1:
            raise DomainError("n_points must be positive")
        if self.trials < 1:
            raise DomainError("trials must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be an unsigned 64-bit integer")
        if self.target is not None and not 0 <= self.target < self.n_points:
            raise DomainError(f"target {self.target} out of range for n={self.n_points}")


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    point_index: int
    t: tuple
    bounds: tuple
    widths: dict
    covered: dict

    @property
    def B_sum(self) -> float:
        return float(sum(self.bounds))


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, trial])))


def _open_uniform(rng: np.random.Generator, size: int) -> np.ndarray:
    # (k + 0.5) / 2^53 never hits 0 or 1
    return (rng.integers(0, 2**53, size=size) + 0.5) / 2.0**53


def standard_normals(rng: np.random.Generator, size: int) -> np.ndarray:
    return np.atleast_1d(phi_inv(_open_uniform(rng, size)))


def simulate_dataset(expcfg: ExperimentConfig, rng: np.random.Generator) -> Dataset:
    n = expcfg.n_points
    if expcfg.design is Design.UNIFORM:
        t = np.sort(_open_uniform(rng, n))
    else:
        t = np.arange(n) / n
    y = expcfg.truth(t) + expcfg.cfg.sigma * standard_normals(rng, n)
    return Dataset(t.tolist(), y.tolist())


def _workers(threads: int | None) -> int:
    if threads is None:
        threads = int(os.environ.get("HOLDER_IM_THREADS", "1") or 1)
    if threads == 0:
        threads = os.cpu_count() or 1
    return max(1, threads)


def _map(fn: Callable, items: Sequence, threads: int | None) -> list:
    workers = _workers(threads)
    if workers == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


class _TwoPointTrial:
    def __init__(self, expcfg: ExperimentConfig):
        self.expcfg = expcfg

    def __call__(self, trial: int) -> TrialRecord:
        expcfg = self.expcfg
        cfg = expcfg.cfg
        z = critical_value(cfg.alpha)
        data = simulate_dataset(expcfg, trial_rng(expcfg.seed, trial))
        i = 1
        view = neighbor_view(data, cfg, i).scaled(cfg.sigma)
        B = float(view.bounds[0])
        lam_hat, mix_width = two_point_optimal(B, z)
        truth = float(expcfg.truth(data.t[i]))
        intervals = {
            "marginal": interval_with_weights(data.y[i], view, [0.0], z, cfg.sigma,
                                              cfg.alpha, Method.MARGINAL),
            "mixture": interval_with_weights(data.y[i], view, [lam_hat], z, cfg.sigma,
                                             cfg.alpha, Method.PARTIAL_CONDITIONING),
            "conservative": interval_with_weights(data.y[i], view, [1.0], z, cfg.sigma,
                                                  cfg.alpha, Method.CONSERVATIVE_CONDITIONAL),
        }
        widths = {
            "marginal": cfg.sigma * (2.0 * z),
            "mixture": cfg.sigma * mix_width,
            "conservative": cfg.sigma * (B + math.sqrt(2.0) * z),
        }
        covered = {k: truth in v for k, v in intervals.items()}
        return TrialRecord(trial, i, data.t, (B * cfg.sigma,), widths, covered)


def run_two_point(expcfg: ExperimentConfig, threads: int | None = 1) -> list[TrialRecord]:
    """Marginal, partial-conditioning (closed form) and conservative widths for n = 2."""
    if expcfg.n_points != 2:
        raise DomainError("run_two_point needs n_points = 2")
    return _map(_TwoPointTrial(expcfg), range(expcfg.trials), threads)


def _point_record(trial: int, data: Dataset, i: int, expcfg: ExperimentConfig,
                  z: float) -> TrialRecord:
    cfg = expcfg.cfg
    view = neighbor_view(data, cfg, i).scaled(cfg.sigma)
    m = len(view)
    try:
        lam, mix = optimize_weights(view, z, expcfg.opts)
    except Exception as exc:
        raise RuntimeError(f"optimizer failed in trial {trial}, point {i}") from exc
    weights = {
        "marginal": MixingWeights.vertex(m, None),
        "mixture": lam,
        "cond_1pt": MixingWeights.vertex(m, 1),
        "cond_all": MixingWeights.vertex(m, m),
    }
    u_widths = {k: width_objective(w, view, z) for k, w in weights.items()}
    u_widths["mixture"] = mix
    methods = {"marginal": Method.MARGINAL, "mixture": Method.PARTIAL_CONDITIONING,
               "cond_1pt": Method.CONSERVATIVE_CONDITIONAL,
               "cond_all": Method.CONSERVATIVE_CONDITIONAL}
    truth = float(expcfg.truth(data.t[i]))
    covered = {
        k: truth in interval_with_weights(data.y[i], view, w, z, cfg.sigma, cfg.alpha, methods[k])
        for k, w in weights.items()
    }
    widths = {k: cfg.sigma * w for k, w in u_widths.items()}
    bounds = tuple(float(b) for b in view.bounds * cfg.sigma)
    return TrialRecord(trial, i, data.t, bounds, widths, covered)


class _NPointTrial:
    def __init__(self, expcfg: ExperimentConfig):
        self.expcfg = expcfg

    def __call__(self, trial: int) -> list[TrialRecord]:
        expcfg = self.expcfg
        z = critical_value(expcfg.cfg.alpha)
        data = simulate_dataset(expcfg, trial_rng(expcfg.seed, trial))
        points = range(len(data)) if expcfg.target is None else [expcfg.target]
        return [_point_record(trial, data, i, expcfg, z) for i in points]


def run_n_point(expcfg: ExperimentConfig, threads: int | None = 1) -> list[TrialRecord]:
    """Widths and coverage of all four methods at every (or the target) point."""
    if expcfg.n_points < 3:
        raise DomainError("run_n_point needs n_points >= 3")
    per_trial = _map(_NPointTrial(expcfg), range(expcfg.trials), threads)
    return [rec for recs in per_trial for rec in recs]


class _CoverageTrial:
    def __init__(self, expcfg: ExperimentConfig, method: str):
        self.expcfg = expcfg
        self.method = method

    def __call__(self, trial: int) -> bool:
        expcfg, cfg = self.expcfg, self.expcfg.cfg
        rng = trial_rng(expcfg.seed, trial)
        data = simulate_dataset(expcfg, rng)
        n = len(data)
        i = expcfg.target if expcfg.target is not None else int(rng.integers(0, n))
        truth = float(expcfg.truth(data.t[i]))
        method = self.method
        if method in ("one_point", "marginal") or n == 1:
            interval = one_point_region(data.y[i], cfg)
        elif method == "partial":
            interval = interval_for_point(data, cfg, i, expcfg.opts)
        else:
            view = neighbor_view(data, cfg, i).scaled(cfg.sigma)
            m = len(view)
            lam = MixingWeights.vertex(m, 1 if method == "cond_1pt" else m)
            interval = interval_with_weights(data.y[i], view, lam, critical_value(cfg.alpha),
                                             cfg.sigma, cfg.alpha,
                                             Method.CONSERVATIVE_CONDITIONAL)
        return truth in interval


def coverage_estimate(expcfg: ExperimentConfig, method: str,
                      threads: int | None = 1) -> tuple[float, float]:
    """Empirical coverage of theta_0(t_i) and its binomial standard error."""
    if method not in COVERAGE_METHODS:
        raise DomainError(f"unknown method {method!r}; expected one of {COVERAGE_METHODS}")
    hits = _map(_CoverageTrial(expcfg, method), range(expcfg.trials), threads)
    rate = sum(hits) / expcfg.trials
    return rate, math.sqrt(rate * (1.0 - rate) / expcfg.trials)


def fit_curve(data: Dataset, cfg: HolderConfig, at: Sequence[float] = (),
              opts: OptimizerOptions | None = None) -> list[tuple[float, PlausibilityInterval]]:
    """Intervals at every design point of ``data`` plus the extra locations ``at``.

    Observed points get their partial-conditioning interval. Elsewhere the
    intervals of the flanking observed points are widened by their Hölder
    radius and intersected; past either end only one flank exists. Should
    the two widened intervals fail to overlap, the nearer flank is used.
    """
    obs = data.observed
    if not obs:
        raise DomainError("no observed points")
    obs_t = [data.t[k] for k in obs]
    fitted = {data.t[k]: interval_for_point(data, cfg, k, opts) for k in obs}

    def widen(tj: float, t: float) -> PlausibilityInterval:
        iv = fitted[tj]
        b = cfg.M * abs(t - tj) ** cfg.gamma
        return PlausibilityInterval(iv.lower - b, iv.upper + b, iv.alpha, iv.method)

    out = []
    for t in sorted(set(data.t) | {float(v) for v in at}):
        if t in fitted:
            out.append((t, fitted[t]))
            continue
        r = bisect.bisect_left(obs_t, t)
        flanks = [obs_t[k] for k in (r - 1, r) if 0 <= k < len(obs_t)]
        pieces = [widen(tj, t) for tj in flanks]
        lower = max(p.lower for p in pieces)
        upper = min(p.upper for p in pieces)
        if lower <= upper:
            out.append((t, PlausibilityInterval(lower, upper, cfg.alpha, pieces[0].method)))
        else:
            nearest = min(flanks, key=lambda tj: abs(t - tj))
            out.append((t, widen(nearest, t)))
    return out
