"""Basic inferential models for a single observation and the exact B=0 pair.

Only singleton assertions {theta0} are supported. For those the belief is
always zero and the plausibility has a closed form.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .gauss import critical_value, phi
from .model import DomainError, HolderConfig


class Method(str, enum.Enum):
    MARGINAL = "marginal"
    CONDITIONAL_FULL = "conditional_full"
    CONSERVATIVE_CONDITIONAL = "conservative_conditional"
    PARTIAL_CONDITIONING = "partial_conditioning"
    ONE_POINT = "one_point"


@dataclass(frozen=True)
class PlausibilityInterval:
    lower: float
    upper: float
    alpha: float
    method: Method

    def __post_init__(self):
        if not self.lower <= self.upper:
            raise ValueError(f"empty interval [{self.lower}, {self.upper}]")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def __contains__(self, value: float) -> bool:
        return self.lower <= value <= self.upper


@dataclass(frozen=True)
class SingletonAssertion:
    t: float
    theta0: float


def one_point_plausibility(y1: float, cfg: HolderConfig, theta0: float) -> float:
    """pl(theta0) = 2 (1 - Phi(|theta0 - y1| / sigma))."""
    # 2 Phi(-x) keeps precision far in the tail
    return 2.0 * phi(-abs(theta0 - y1) / cfg.sigma)


def one_point_belief(y1: float, cfg: HolderConfig, assertion: SingletonAssertion) -> float:
    # A random interval of positive length is never inside a singleton.
    return 0.0


def one_point_region(y1: float, cfg: HolderConfig) -> PlausibilityInterval:
    """Level-alpha plausibility region {theta0 : pl(theta0) >= alpha}."""
    half = cfg.sigma * critical_value(cfg.alpha)
    return PlausibilityInterval(y1 - half, y1 + half, cfg.alpha, Method.ONE_POINT)


def _require_zero_bound(bound: float):
    if bound != 0:
        raise DomainError(f"conditional two-point IM is exact only for B = 0, got B={bound}")


def conditional_two_point_plausibility(y1: float, y2: float, cfg: HolderConfig,
                                       theta0_at_t2: float, bound: float = 0.0) -> float:
    """Exact conditional plausibility when the two means are known to coincide.

    ``bound`` is the caller's Hölder radius M|t2 - t1|^gamma.

    Raises
    ------
    DomainError
        If ``bound`` is positive.
    """
    _require_zero_bound(bound)
    dev = abs(theta0_at_t2 - 0.5 * (y1 + y2)) / cfg.sigma
    return 2.0 * phi(-math.sqrt(2.0) * dev)


def conditional_two_point_region(y1: float, y2: float, cfg: HolderConfig,
                                 bound: float = 0.0) -> PlausibilityInterval:
    _require_zero_bound(bound)
    center = 0.5 * (y1 + y2)
    half = cfg.sigma * critical_value(cfg.alpha) / math.sqrt(2.0)
    return PlausibilityInterval(center - half, center + half, cfg.alpha,
                                Method.CONDITIONAL_FULL)
