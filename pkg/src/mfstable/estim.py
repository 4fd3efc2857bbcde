"""Localised negative power variations and the estimators of H(t0) and alpha."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .errors import ConfigError, DegenerateDataError, DomainError, EmptyNeighborhoodError
from .filters import FilterSeq, binomial_filter, discrete_variations
from .specfun import ExponentPair, phi, psi

__all__ = [
    "EstimatorConfig",
    "Neighborhood",
    "EstimationResult",
    "neighborhood",
    "v_stat",
    "v_stat_detail",
    "w_stat",
    "estimate_H",
    "estimate_alpha",
    "h_from_v",
    "alpha_from_v",
    "estimate",
    "rate_dn_gaussian",
    "rate_dn_stable",
    "rate_dn",
]

DEFAULT_ZERO_GUARD = 1e-300


@dataclass(frozen=True)
class EstimatorConfig:
    t0: float = 0.5
    gamma: float = 0.8
    beta: float = -0.3
    beta1: float = -0.4
    beta2: float = -0.2
    filter: FilterSeq = field(default_factory=lambda: binomial_filter(2))
    zero_guard: float = DEFAULT_ZERO_GUARD

    def __post_init__(self):
        if not (0.0 < self.gamma < 1.0):
            raise ConfigError(f"gamma must lie in (0, 1), got {self.gamma}")
        if not (-0.5 < self.beta < 0.0):
            raise ConfigError(f"beta must lie in (-1/2, 0), got {self.beta}")
        if not (-0.5 < self.beta1 < self.beta2 < 0.0):
            raise ConfigError(
                f"need -1/2 < beta1 < beta2 < 0, got beta1={self.beta1}, beta2={self.beta2}"
            )
        if self.zero_guard < 0:
            raise ConfigError("zero_guard must be non-negative")

    def check_gamma(self, h_plus: float):
        """``gamma`` must exceed the supremum of the true ``H``."""
        if not h_plus < self.gamma:
            raise ConfigError(
                f"gamma = {self.gamma} must exceed sup H = {h_plus} on the domain"
            )


@dataclass(frozen=True)
class Neighborhood:
    n: int
    indices: np.ndarray
    count: int


@dataclass
class EstimationResult:
    H_hat: float
    alpha_hat: float
    V_values: dict
    counts: dict
    d_n_reported: float
    guard_hits: int

    def to_dict(self) -> dict:
        return {
            "H_hat": self.H_hat,
            "alpha_hat": self.alpha_hat,
            "V_values": {f"n={n},beta={b!r}": v for (n, b), v in self.V_values.items()},
            "counts": {str(n): c for n, c in self.counts.items()},
            "d_n_reported": self.d_n_reported,
            "guard_hits": self.guard_hits,
        }


def neighborhood(n: int, gamma: float, t0: float, K: int) -> Neighborhood:
    """Indices ``k`` with ``|(k+p)/n - t0| <= n^-gamma`` for all ``p = 0..K``.

    The bounds ``ceil(n t0 - n^(1-gamma))`` and ``floor(n t0 + n^(1-gamma))``
    are computed in 50-digit arithmetic from the binary values of the inputs,
    so no rounding slack is involved.
    """
    if n < 2:
        raise ConfigError(f"n must be at least 2, got {n}")
    if not (0.0 < gamma < 1.0):
        raise ConfigError(f"gamma must lie in (0, 1), got {gamma}")
    if K < 1:
        raise ConfigError(f"K must be at least 1, got {K}")
    with mpmath.workdps(50):
        center = mpmath.mpf(n) * mpmath.mpf(t0)
        radius = mpmath.power(mpmath.mpf(n), 1 - mpmath.mpf(gamma))
        lo = int(mpmath.ceil(center - radius))
        hi = int(mpmath.floor(center + radius)) - K
    if hi < lo:
        raise EmptyNeighborhoodError(
            f"no admissible index at n={n}, gamma={gamma}, t0={t0}, K={K}; use a larger n"
        )
    idx = np.arange(lo, hi + 1)
    return Neighborhood(n, idx, len(idx))


def v_stat_detail(path, f: FilterSeq, nb: Neighborhood, beta: float,
                  zero_guard: float = DEFAULT_ZERO_GUARD) -> tuple[float, int]:
    """``V`` and the number of variations clamped at ``zero_guard``.

    The statistic itself is defined for ``-1/2 <= beta < 0``; the estimators
    keep ``beta`` inside the open interval where its mean is finite.
    """
    if not (-0.5 <= beta < 0.0):
        raise DomainError(f"beta must lie in [-1/2, 0), got {beta}")
    if nb.count == 0:
        raise EmptyNeighborhoodError("empty neighborhood")
    if path.n != nb.n:
        raise ConfigError(f"path resolution {path.n} does not match neighborhood n={nb.n}")
    delta = np.abs(discrete_variations(path, f, nb.indices))
    if not np.all(np.isfinite(delta)):
        raise DegenerateDataError("non-finite variations in the window")
    small = delta < zero_guard if zero_guard > 0 else delta == 0.0
    hits = int(small.sum())
    if hits == len(delta):
        raise DegenerateDataError(
            "every variation in the window is below the zero guard (constant or polynomial path)"
        )
    if zero_guard > 0:
        delta = np.where(small, zero_guard, delta)
    elif hits:
        raise DegenerateDataError(f"{hits} zero variations and no zero guard")
    return float(np.mean(delta**beta)), hits


def v_stat(path, f: FilterSeq, nb: Neighborhood, beta: float,
           zero_guard: float = DEFAULT_ZERO_GUARD) -> float:
    """``(1/count) sum_k |Delta_k X|^beta`` over the window."""
    return v_stat_detail(path, f, nb, beta, zero_guard)[0]


def w_stat(V: float, n: int, beta: float, H_true: float) -> float:
    """``n^(beta H) V``: the normalised statistic, given the true ``H(t0)``."""
    if not V > 0:
        raise DomainError(f"V must be positive, got {V}")
    return n ** (beta * H_true) * V


def _require_even(path):
    if path.n % 2:
        raise ConfigError(f"n = {path.n} is odd; the H estimator needs n/2")


def h_from_v(v_half: float, v_full: float, beta: float) -> float:
    """``(1/beta) log2(v_half / v_full)``."""
    return math.log2(v_half / v_full) / beta


def estimate_H(path, cfg: EstimatorConfig) -> float:
    """``(1/beta) log2(V_{n/2} / V_n)`` with ``V_{n/2}`` from the even samples."""
    _require_even(path)
    f = cfg.filter
    v_full = v_stat(path, f, neighborhood(path.n, cfg.gamma, cfg.t0, f.K), cfg.beta, cfg.zero_guard)
    half = path.subsample(2)
    v_half = v_stat(half, f, neighborhood(half.n, cfg.gamma, cfg.t0, f.K), cfg.beta, cfg.zero_guard)
    return h_from_v(v_half, v_full, cfg.beta)


def alpha_from_v(v1: float, v2: float, beta1: float, beta2: float) -> float:
    """``phi(psi(v1, v2))`` for the pair ``u = -beta1, v = -beta2``."""
    pair = ExponentPair.from_betas(beta1, beta2)
    return phi(pair, psi(pair, v1, v2))


def estimate_alpha(path, cfg: EstimatorConfig) -> float:
    """``phi(psi(V_n(beta1), V_n(beta2)))`` with ``u = -beta1, v = -beta2``."""
    f = cfg.filter
    nb = neighborhood(path.n, cfg.gamma, cfg.t0, f.K)
    v1 = v_stat(path, f, nb, cfg.beta1, cfg.zero_guard)
    v2 = v_stat(path, f, nb, cfg.beta2, cfg.zero_guard)
    return alpha_from_v(v1, v2, cfg.beta1, cfg.beta2)


def estimate(path, cfg: EstimatorConfig, H_true: float | None = None,
             alpha_true: float | None = None) -> EstimationResult:
    """Both estimators plus the intermediate statistics.

    The reported rate uses the true ``H(t0)`` and ``alpha`` when given,
    otherwise the estimates; it is NaN when those fall outside every branch.
    """
    _require_even(path)
    f = cfg.filter
    half = path.subsample(2)
    nb_full = neighborhood(path.n, cfg.gamma, cfg.t0, f.K)
    nb_half = neighborhood(half.n, cfg.gamma, cfg.t0, f.K)
    V = {}
    hits = 0
    for beta in sorted({cfg.beta, cfg.beta1, cfg.beta2}):
        V[(path.n, beta)], c = v_stat_detail(path, f, nb_full, beta, cfg.zero_guard)
        hits = max(hits, c)
    V[(half.n, cfg.beta)], c_half = v_stat_detail(half, f, nb_half, cfg.beta, cfg.zero_guard)
    hits += c_half
    H_hat = h_from_v(V[(half.n, cfg.beta)], V[(path.n, cfg.beta)], cfg.beta)
    alpha_hat = alpha_from_v(V[(path.n, cfg.beta1)], V[(path.n, cfg.beta2)], cfg.beta1, cfg.beta2)
    H_r = H_hat if H_true is None else H_true
    a_r = alpha_hat if alpha_true is None else alpha_true
    try:
        d_n = rate_dn(path.n, a_r, H_r, cfg.gamma, f.L)
    except DomainError:
        d_n = float("nan")
    return EstimationResult(
        H_hat, alpha_hat, V, {path.n: nb_full.count, half.n: nb_half.count}, d_n, hits
    )


# ---------------------------------------------------------------------------
# Theoretical rates
# ---------------------------------------------------------------------------


def rate_dn_gaussian(n: int, H_t0: float, gamma: float) -> float:
    if not (H_t0 < gamma < 1.0):
        raise DomainError(f"need H(t0) < gamma < 1, got H={H_t0}, gamma={gamma}")
    if gamma <= (1.0 + 2.0 * H_t0) / 3.0:
        return n ** (H_t0 - gamma)
    return n ** ((gamma - 1.0) / 2.0)


def rate_dn_stable(n: int, alpha: float, H_t0: float, gamma: float, L: int) -> float:
    if not (0.0 < alpha < 2.0):
        raise DomainError(f"alpha must lie in (0, 2), got {alpha}")
    if not (H_t0 < gamma < 1.0):
        raise DomainError(f"need H(t0) < gamma < 1, got H={H_t0}, gamma={gamma}")
    if L < 1:
        raise DomainError(f"L must be at least 1, got {L}")
    crit = L + 1 - 2.0 / alpha
    slow = n ** (alpha * (H_t0 - gamma) / 4.0)
    fast = n ** ((gamma - 1.0) / 2.0)
    if math.isclose(H_t0, crit, rel_tol=0.0, abs_tol=1e-12):
        if gamma < (L + 1) * alpha / (2.0 + alpha):
            return slow
        return fast * math.sqrt(math.log(n))
    if H_t0 < crit:
        return slow if gamma <= (2.0 + alpha * H_t0) / (2.0 + alpha) else fast
    if gamma >= (L + 1) / (L + 2 - H_t0):
        return n ** (alpha * (1.0 - gamma) * (H_t0 - (L + 1)) / 4.0)
    return slow


def rate_dn(n: int, alpha: float, H_t0: float, gamma: float, L: int) -> float:
    if alpha == 2.0:
        return rate_dn_gaussian(n, H_t0, gamma)
    return rate_dn_stable(n, alpha, H_t0, gamma, L)
