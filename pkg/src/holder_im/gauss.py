"""Standard normal CDF, quantile and two-sided critical values.

All Gaussian tail arithmetic in the package goes through this module.
``phi`` is exact to double precision via the complementary error function;
``phi_inv`` uses Wichura's AS 241 rational approximation followed by one
Newton step against ``phi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

# AS 241 (PPND16) coefficients, central region |p - 0.5| <= 0.425
_A = (3.387132872796366608, 133.14166789178437745, 1971.5909503065514427,
      13731.693765509461125, 45921.953931549871457, 67265.770927008700853,
      33430.575583588128105, 2509.0809287301226727)
_B = (1.0, 42.313330701600911252, 687.1870074920579083, 5394.1960214247511077,
      21213.794301586595867, 39307.89580009271061, 28729.085735721942674,
      5226.495278852545925)
# intermediate tail, r = sqrt(-log(min(p, 1-p))) <= 5
_C = (1.42343711074968357734, 4.6303378461565452959, 5.7694972214606914055,
      3.64784832476320460504, 1.27045825245236838258, 0.24178072517745061177,
      0.0227238449892691845833, 7.7454501427834140764e-4)
_D = (1.0, 2.05319162663775882187, 1.6763848301838038494, 0.68976733498510000455,
      0.14810397642748007459, 0.0151986665636164571966, 5.475938084995344946e-4,
      1.05075007164441684324e-9)
# far tail
_E = (6.6579046435011037772, 5.4637849111641143699, 1.7848265399172913358,
      0.29656057182850489123, 0.026532189526576123093, 0.0012426609473880784386,
      2.71155556874348757815e-5, 2.01033439929228813265e-7)
_F = (1.0, 0.59983220655588793769, 0.13692988092273580531, 0.0148753612908506148525,
      7.868691311456132591e-4, 1.8463183175100546818e-5, 1.4215117583164458887e-7,
      2.04426310338993978564e-15)


def _poly(coeffs, x):
    # Horner, coefficients in ascending order
    out = np.zeros_like(x)
    for c in reversed(coeffs):
        out = out * x + c
    return out


def phi(x):
    """Standard normal CDF. Accepts scalars or arrays."""
    x = np.asarray(x, dtype=float)
    out = 0.5 * erfc(-x / _SQRT2)
    return float(out) if out.ndim == 0 else out


def pdf(x):
    x = np.asarray(x, dtype=float)
    out = _INV_SQRT_2PI * np.exp(-0.5 * x * x)
    return float(out) if out.ndim == 0 else out


def _lower_tail_quantile(p: np.ndarray) -> np.ndarray:
    """AS 241 quantile for p in (0, 0.5], refined by one Newton step."""
    q = p - 0.5
    x = np.empty_like(p)

    central = np.abs(q) <= 0.425
    if central.any():
        qc = q[central]
        r = 0.180625 - qc * qc
        x[central] = qc * _poly(_A, r) / _poly(_B, r)

    tail = ~central
    if tail.any():
        r = np.sqrt(-np.log(p[tail]))
        near = r <= 5.0
        xt = np.empty_like(r)
        rn = r[near] - 1.6
        xt[near] = _poly(_C, rn) / _poly(_D, rn)
        rf = r[~near] - 5.0
        xt[~near] = _poly(_E, rf) / _poly(_F, rf)
        x[tail] = -xt

    # p <= 0.5 keeps phi(x) - p free of cancellation in the lower tail
    dens = _INV_SQRT_2PI * np.exp(-0.5 * x * x)
    ok = dens > 0
    x[ok] -= (0.5 * erfc(-x[ok] / _SQRT2) - p[ok]) / dens[ok]
    return x


def phi_inv(p):
    """Standard normal quantile, ``phi(phi_inv(p)) == p`` to ~1e-16.

    Raises
    ------
    ValueError
        If any ``p`` lies outside the open interval (0, 1).
    """
    p = np.asarray(p, dtype=float)
    if np.any(~((p > 0.0) & (p < 1.0))):
        raise ValueError("phi_inv requires 0 < p < 1")
    flat = np.atleast_1d(p).ravel()
    upper = flat > 0.5
    lo = np.where(upper, 1.0 - flat, flat)
    x = _lower_tail_quantile(lo)
    x = np.where(upper, -x, x).reshape(p.shape)
    return float(x) if x.ndim == 0 else x


@dataclass(frozen=True)
class CriticalValue:
    """Two-sided critical value ``z = phi_inv(1 - alpha/2)``."""

    alpha: float
    z: float

    @classmethod
    def for_alpha(cls, alpha: float) -> "CriticalValue":
        return cls(alpha=alpha, z=critical_value(alpha))


def critical_value(alpha: float) -> float:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    return phi_inv(1.0 - alpha / 2.0)
