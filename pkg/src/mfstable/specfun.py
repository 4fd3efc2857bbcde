"""Gamma-based special functions and the psi / h / phi triple of the
stability-index estimator.

All functions take an :class:`ExponentPair` ``(u, v)`` with ``u > v > 0``.
For the estimator ``u = -beta1`` and ``v = -beta2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from .errors import DomainError, NumericFailure

__all__ = [
    "ExponentPair",
    "ln_gamma",
    "lgamma1p",
    "c_beta",
    "c_uv",
    "psi",
    "h",
    "phi",
]

_EULER = 0.57721566490153286061
# Coefficients zeta(k)/k of the Maclaurin series of lnGamma(1+z), k = 2..40.
_ZETA_OVER_K = np.array([special.zeta(k, 1) / k for k in range(2, 41)])
_SERIES_RADIUS = 0.2

PHI_BRACKET = (1e-12, 1e12)
# brentq stops on rtol alone, i.e. at full double precision
PHI_XTOL = 1e-300


@dataclass(frozen=True)
class ExponentPair:
    """Exponents ``u > v > 0`` of the psi/h/phi family."""

    u: float
    v: float

    def __post_init__(self):
        if not (self.u > self.v > 0):
            raise DomainError(f"need u > v > 0, got u={self.u}, v={self.v}")

    @classmethod
    def from_betas(cls, beta1: float, beta2: float) -> "ExponentPair":
        return cls(-beta1, -beta2)


def lgamma1p(z):
    """``ln Gamma(1 + z)`` accurate for small ``|z|`` (no ``1 + z`` rounding)."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    small = np.abs(z) < _SERIES_RADIUS
    if np.any(small):
        zs = z[small]
        powers = (-zs[:, None]) ** np.arange(2, 41)[None, :]
        out[small] = -_EULER * zs + powers @ _ZETA_OVER_K
    big = ~small
    if np.any(big):
        out[big] = special.gammaln(1.0 + z[big])
    return out[()] if out.ndim == 0 else out


def ln_gamma(x):
    """Natural log of the Gamma function for positive real ``x``.

    Scalar or array input. Near the zeros of ``ln Gamma`` at 1 and 2 the value
    comes from the Maclaurin series of ``ln Gamma(1 + z)`` so that relative
    accuracy survives; elsewhere scipy's ``gammaln`` is used.
    """
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("ln_gamma needs x > 0")
    out = special.gammaln(x)
    near1 = np.abs(x - 1.0) < _SERIES_RADIUS
    near2 = np.abs(x - 2.0) < _SERIES_RADIUS
    if np.any(near1):
        out = np.where(near1, lgamma1p(np.where(near1, x - 1.0, 0.0)), out)
    if np.any(near2):
        z = np.where(near2, x - 2.0, 0.0)
        out = np.where(near2, np.log1p(z) + lgamma1p(z), out)
    return out[()] if out.ndim == 0 else out


def c_beta(beta: float) -> float:
    """``2^(beta+1) Gamma((beta+1)/2) / Gamma(-beta/2)`` for ``-1 < beta < 0``."""
    if not (-1.0 < beta < 0.0):
        raise DomainError(f"c_beta needs -1 < beta < 0, got {beta}")
    return math.exp(
        (beta + 1.0) * math.log(2.0)
        + ln_gamma((beta + 1.0) / 2.0)
        - ln_gamma(-beta / 2.0)
    )


def c_uv(pair: ExponentPair) -> float:
    """Constant term of :func:`psi`."""
    u, v = pair.u, pair.v
    return (
        0.5 * (u - v) * math.log(math.pi)
        + u * ln_gamma(1.0 + v / 2.0)
        + v * ln_gamma((1.0 - u) / 2.0)
        - v * ln_gamma(1.0 + u / 2.0)
        - u * ln_gamma((1.0 - v) / 2.0)
    )


def psi(pair: ExponentPair, x: float, y: float) -> float:
    """``-v ln x + u ln y + C(u, v)``.

    With ``x = V(beta1)`` and ``y = V(beta2)`` any common scale factor of the
    data cancels, since ``x`` scales like ``c**-u`` and ``y`` like ``c**-v``.
    """
    if not (x > 0 and y > 0):
        raise DomainError(f"psi needs positive arguments, got x={x}, y={y}")
    return -pair.v * math.log(x) + pair.u * math.log(y) + c_uv(pair)


def h(pair: ExponentPair, x):
    """``u lnGamma(1 + v/x) - v lnGamma(1 + u/x)``, negative and increasing."""
    xa = np.asarray(x, dtype=float)
    if np.any(~(xa > 0)):
        raise DomainError("h needs x > 0")
    flat = np.atleast_1d(xa).ravel()
    u, v = pair.u, pair.v
    out = u * lgamma1p(v / flat) - v * lgamma1p(u / flat)
    # For large x the first-order terms cancel analytically; sum the series
    # without them to keep the sign and relative accuracy.
    tail = (u / flat) < _SERIES_RADIUS
    if np.any(tail):
        k = np.arange(2, 41)
        coef = (-1.0) ** k * _ZETA_OVER_K * (u * v**k - v * u**k)
        out[tail] = (coef * (1.0 / flat[tail, None]) ** k).sum(axis=1)
    out = out.reshape(xa.shape)
    return out[()] if out.ndim == 0 else out


def phi(pair: ExponentPair, x: float) -> float:
    """Inverse of :func:`h` on the negative half line, 0 on ``x >= 0``.

    The root is bracketed by geometric expansion from ``[0.5, 2]`` inside
    ``[1e-12, 1e12]`` and refined with Brent's method.
    """
    if x >= 0:
        return 0.0
    lo_lim, hi_lim = PHI_BRACKET
    f = lambda t: float(h(pair, t)) - x  # noqa: E731
    lo, hi = 0.5, 2.0
    while f(lo) > 0:
        if lo <= lo_lim:
            raise NumericFailure(
                f"phi: h(x) = {x} lies below h({lo_lim:g}); root not bracketable"
            )
        lo = max(lo / 8.0, lo_lim)
    while f(hi) < 0:
        if hi >= hi_lim:
            raise NumericFailure(
                f"phi: h(x) = {x} lies above h({hi_lim:g}); root not bracketable"
            )
        hi = min(hi * 8.0, hi_lim)
    if f(lo) == 0:
        return lo
    if f(hi) == 0:
        return hi
    return optimize.brentq(f, lo, hi, xtol=PHI_XTOL, rtol=4 * np.finfo(float).eps)
