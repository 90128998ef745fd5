"""Partial-conditioning plausibility intervals.

For a target point i with neighbors sorted by distance, the unobserved
error u_i is predicted from the partial regression

    u_i ~ N( sum_k lambda_k/(k+1) * sum_{j<=k} v_j , Delta_lambda^2 )

where v_j = u_i - u_j is only known up to the Hölder box
[y_i - y_j - B_j, y_i - y_j + B_j]. Taking the union of the predictive
intervals over that box gives an interval of width

    2 sum_j c_j B_j + 2 z Delta_lambda,    c_j = sum_{k>=j} lambda_k/(k+1),

which is convex in lambda and is minimised over the capped simplex
{lambda >= 0, sum(lambda) <= 1}. lambda = 0 is the marginal interval and
lambda = e_k is conditioning on the k nearest neighbors.

Everything below the ``interval_*`` functions works in units of sigma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .gauss import critical_value
from .im_core import Method, PlausibilityInterval, one_point_region
from .model import Dataset, DomainError, HolderConfig, NeighborView, neighbor_view

FEASIBILITY_TOL = 1e-12

BASELINES = ("marginal", "cond_1pt", "cond_all")


class OptimizerError(RuntimeError):
    pass


@dataclass(frozen=True)
class MixingWeights:
    """Feasible point of the capped simplex {lambda >= 0, sum(lambda) <= 1}."""

    lam: np.ndarray

    def __post_init__(self):
        lam = np.array(self.lam, dtype=float).ravel()
        check_feasible(lam)
        lam.setflags(write=False)
        object.__setattr__(self, "lam", lam)

    def __len__(self):
        return len(self.lam)

    @classmethod
    def vertex(cls, m: int, k: int | None) -> "MixingWeights":
        """``e_k`` (1-based) in dimension m, or the origin when k is None."""
        lam = np.zeros(m)
        if k is not None:
            lam[k - 1] = 1.0
        return cls(lam)


def check_feasible(lam: np.ndarray, tol: float = FEASIBILITY_TOL) -> None:
    if lam.ndim != 1 or lam.size == 0:
        raise DomainError("mixing weights must be a nonempty vector")
    if not np.all(np.isfinite(lam)):
        raise DomainError("mixing weights must be finite")
    if lam.min() < -tol or lam.sum() > 1.0 + tol:
        raise DomainError(f"infeasible mixing weights {lam}")


def _as_lambda(lam) -> np.ndarray:
    if isinstance(lam, MixingWeights):
        return lam.lam
    arr = np.asarray(lam, dtype=float).ravel()
    check_feasible(arr)
    return arr


@dataclass(frozen=True)
class PredictiveSpec:
    """Regression coefficients on v_1..v_m and the residual SD."""

    center_coeff: np.ndarray
    own_coeff: float
    delta: float


def predictive_spec(lam) -> PredictiveSpec:
    lam = _as_lambda(lam)
    k = np.arange(1, lam.size + 1)
    c = np.cumsum((lam / (k + 1))[::-1])[::-1]
    a = 1.0 - np.sum(lam * k / (k + 1))
    delta = math.sqrt(a * a + float(c @ c))
    # a + sum(c) == 1, so Delta^2 >= 1/(m+1) on the whole simplex
    assert delta > 0
    return PredictiveSpec(c, a, delta)


def delta_lambda(lam) -> float:
    return predictive_spec(lam).delta


def _check_dims(lam: np.ndarray, view: NeighborView):
    if lam.size != len(view):
        raise DomainError(f"{lam.size} weights for {len(view)} neighbors")


def width_objective(lam, view: NeighborView, z: float) -> float:
    """Full width 2 sum_j c_j B_j + 2 z Delta_lambda of the box-union interval."""
    lam = _as_lambda(lam)
    _check_dims(lam, view)
    spec = predictive_spec(lam)
    return 2.0 * float(spec.center_coeff @ view.bounds) + 2.0 * z * spec.delta


def width_gradient(lam, view: NeighborView, z: float) -> np.ndarray:
    lam = _as_lambda(lam)
    _check_dims(lam, view)
    spec = predictive_spec(lam)
    k = np.arange(1, lam.size + 1)
    # sum_{j<=k} B_j and sum_{j<=k} c_j
    cum_b = np.cumsum(view.bounds)
    cum_c = np.cumsum(spec.center_coeff)
    d_delta = (-(k / (k + 1)) * spec.own_coeff + cum_c / (k + 1)) / spec.delta
    return 2.0 * (cum_b / (k + 1) + z * d_delta)


def two_point_optimal(B: float, z: float) -> tuple[float, float]:
    """Closed-form minimiser of lambda*B + 2z*sqrt(1 - lambda + lambda^2/2) on [0, 1].

    Returns ``(lambda_hat, width)``.
    """
    if B < 0 or z <= 0:
        raise DomainError("need B >= 0 and z > 0")
    if B < z:
        root = math.sqrt(2.0 * z * z - B * B)
        return 1.0 - B / root, B + root
    return 0.0, 2.0 * z


def project_capped_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum(x) <= 1}."""
    x = np.maximum(v, 0.0)
    if x.sum() <= 1.0:
        return x
    # active sum constraint: project onto the probability simplex by sorting
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    rho = np.nonzero(u * np.arange(1, v.size + 1) > css)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


@dataclass(frozen=True)
class OptimizerOptions:
    tol: float = 1e-8
    max_iters: int = 10_000
    restarts: int = 0
    seed: int | None = None

    def __post_init__(self):
        if not self.tol > 0:
            raise DomainError("tol must be positive")
        if self.max_iters < 1:
            raise DomainError("max_iters must be at least 1")
        if self.restarts < 0:
            raise DomainError("restarts must be nonnegative")


def _descend(lam, f, grad, opts: OptimizerOptions):
    """Projected gradient with Barzilai-Borwein trial steps and Armijo backtracking."""
    gtol = 0.1 * opts.tol
    ftol = 1e-4 * opts.tol
    fx = f(lam)
    g = grad(lam)
    step = 1.0
    prev = None
    for _ in range(opts.max_iters):
        if np.linalg.norm(lam - project_capped_simplex(lam - g)) < gtol:
            break
        if prev is not None:
            s, y = lam - prev[0], g - prev[1]
            sy = float(s @ y)
            if sy > 0:
                step = min(max(float(s @ s) / sy, 1e-12), 1e12)
        for _ in range(80):
            cand = project_capped_simplex(lam - step * g)
            fc = f(cand)
            if fc <= fx + 1e-4 * float(g @ (cand - lam)):
                break
            step *= 0.5
        else:
            break
        prev = (lam, g)
        decrease = fx - fc
        lam, fx = cand, fc
        g = grad(lam)
        if decrease < ftol and np.linalg.norm(lam - prev[0]) < math.sqrt(gtol):
            break
    return lam, fx


def _slsqp(start, f, grad, opts: OptimizerOptions):
    m = start.size
    res = minimize(f, start, jac=grad, method="SLSQP", bounds=[(0.0, 1.0)] * m,
                   constraints=[{"type": "ineq", "fun": lambda lam: 1.0 - lam.sum(),
                                 "jac": lambda lam: -np.ones(m)}],
                   options={"ftol": 1e-6 * opts.tol, "maxiter": opts.max_iters})
    lam = project_capped_simplex(np.asarray(res.x, dtype=float))
    fx = f(lam)
    if not res.success:
        # usually a line-search stall at machine precision; polish to be safe
        lam, fx = _descend(lam, f, grad, opts)
    return lam, fx


def optimize_weights(view: NeighborView, z: float,
                     opts: OptimizerOptions | None = None) -> tuple[MixingWeights, float]:
    """Minimise the interval width over the capped simplex.

    ``view`` must already be in sigma units. SLSQP is started from the best
    of the baseline vertices (origin and each e_k) and its answer is only
    kept when it improves on that vertex, so the result is never wider than
    any baseline.
    """
    opts = opts or OptimizerOptions()
    m = len(view)
    if m < 1:
        raise DomainError("need at least one neighbor")

    def f(lam):
        return width_objective(lam, view, z)

    def grad(lam):
        return width_gradient(lam, view, z)

    vertices = [np.zeros(m)] + [np.eye(m)[k] for k in range(m)]
    best = min(vertices, key=f)
    result = (best, f(best))
    starts = [best]
    if opts.restarts:
        rng = np.random.default_rng(opts.seed)
        starts += [rng.dirichlet(np.ones(m + 1))[:m] for _ in range(opts.restarts)]
    for start in starts:
        lam, fx = _slsqp(start, f, grad, opts)
        if fx < result[1]:
            result = (lam, fx)
    lam, fx = result
    if not np.isfinite(fx):
        raise OptimizerError("optimizer produced a non-finite width")
    return MixingWeights(lam), fx


def interval_with_weights(y_i: float, view: NeighborView, lam, z: float, sigma: float,
                          alpha: float, method: Method) -> PlausibilityInterval:
    """Box-union interval for theta(t_i) with fixed weights.

    ``view`` is in sigma units. Every c_j is nonnegative, so the union over
    the v-box is attained at the box corners: lower v for the lower end of
    the u-interval, upper v for the upper end.
    """
    spec = predictive_spec(lam)
    center = float(spec.center_coeff @ view.diffs)
    half = float(spec.center_coeff @ view.bounds) + z * spec.delta
    u_lo, u_hi = center - half, center + half
    return PlausibilityInterval(y_i - sigma * u_hi, y_i - sigma * u_lo, alpha, method)


def interval_for_point(data: Dataset, cfg: HolderConfig, i: int,
                       opts: OptimizerOptions | None = None) -> PlausibilityInterval:
    """Width-minimising partial-conditioning interval for theta(t_i)."""
    y_i = data.y[i] if 0 <= i < len(data) else None
    if y_i is None:
        raise DomainError(f"point {i} is not observed")
    if len(data.observed) == 1:
        return one_point_region(y_i, cfg)
    view = neighbor_view(data, cfg, i).scaled(cfg.sigma)
    z = critical_value(cfg.alpha)
    lam, _ = optimize_weights(view, z, opts)
    return interval_with_weights(y_i, view, lam, z, cfg.sigma, cfg.alpha,
                                 Method.PARTIAL_CONDITIONING)


def baseline_interval(data: Dataset, cfg: HolderConfig, i: int,
                      method: str) -> PlausibilityInterval:
    """Comparison intervals: ``marginal``, ``cond_1pt`` (nearest neighbor) or ``cond_all``."""
    if method not in BASELINES:
        raise DomainError(f"unknown baseline {method!r}; expected one of {BASELINES}")
    y_i = data.y[i] if 0 <= i < len(data) else None
    if y_i is None:
        raise DomainError(f"point {i} is not observed")
    z = critical_value(cfg.alpha)
    if method == "marginal" or len(data.observed) == 1:
        half = cfg.sigma * z
        return PlausibilityInterval(y_i - half, y_i + half, cfg.alpha, Method.MARGINAL)
    view = neighbor_view(data, cfg, i).scaled(cfg.sigma)
    m = len(view)
    lam = MixingWeights.vertex(m, 1 if method == "cond_1pt" else m)
    return interval_with_weights(y_i, view, lam, z, cfg.sigma, cfg.alpha,
                                 Method.CONSERVATIVE_CONDITIONAL)
