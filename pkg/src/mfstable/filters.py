"""Vanishing-moment filters and the discrete variations they define."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import CapacityError, DomainError, PathRangeError

__all__ = [
    "FilterSeq",
    "MomentReport",
    "binomial_filter",
    "verify_moments",
    "discrete_variations",
    "MAX_BINOMIAL_ORDER",
]

MAX_BINOMIAL_ORDER = 20


@dataclass(frozen=True)
class FilterSeq:
    """Coefficients ``a_0..a_K`` with ``L`` vanishing moments.

    Construct arbitrary sequences with :meth:`from_coefficients`, which checks
    the moment conditions; :func:`binomial_filter` gives the standard choice.
    """

    L: int
    coefficients: tuple

    @property
    def K(self) -> int:
        return len(self.coefficients) - 1

    @property
    def a(self) -> np.ndarray:
        return np.asarray(self.coefficients, dtype=float)

    @classmethod
    def from_coefficients(cls, coefficients, L: int) -> "FilterSeq":
        f = cls(int(L), tuple(float(c) for c in coefficients))
        if f.K < 1:
            raise DomainError("a filter needs at least two coefficients")
        report = verify_moments(f)
        if not report.ok:
            raise DomainError(
                f"coefficients do not have exactly {L} vanishing moments: "
                f"{report.moments}"
            )
        return f

    def reversed(self) -> "FilterSeq":
        return FilterSeq(self.L, tuple(reversed(self.coefficients)))


@dataclass(frozen=True)
class MomentReport:
    moments: tuple
    scale: float
    tol: float = 1e-10

    @property
    def vanishing_ok(self) -> bool:
        return all(abs(m) <= self.tol * self.scale for m in self.moments[:-1])

    @property
    def nonzero_ok(self) -> bool:
        return self.scale > 0 and abs(self.moments[-1]) > self.tol * self.scale

    @property
    def ok(self) -> bool:
        return self.vanishing_ok and self.nonzero_ok


def binomial_filter(L: int) -> FilterSeq:
    """``a_k = (-1)^(L+1-k) C(L+1, k)`` for ``k = 0..L+1``."""
    if L < 0:
        raise DomainError(f"L must be non-negative, got {L}")
    if L > MAX_BINOMIAL_ORDER:
        raise CapacityError(
            f"binomial filters are supported up to L = {MAX_BINOMIAL_ORDER}"
        )
    K = L + 1
    coeffs = tuple(float((-1) ** (K - k) * comb(K, k)) for k in range(K + 1))
    return FilterSeq(L, coeffs)


def verify_moments(f: FilterSeq) -> MomentReport:
    """Moments ``sum_k k^q a_k`` for ``q = 0..L+1`` (``0^0 = 1``).

    Integer-valued coefficients are summed exactly.
    """
    a = f.a
    k = np.arange(f.K + 1)
    if np.all(a == np.round(a)) and np.all(np.abs(a) < 2**53):
        ai = [int(c) for c in a]
        moments = tuple(
            float(sum(kk**q * c for kk, c in zip(range(f.K + 1), ai)))
            for q in range(f.L + 2)
        )
    else:
        moments = tuple(float(np.sum(k.astype(float) ** q * a)) for q in range(f.L + 2))
    return MomentReport(moments, float(np.sum(np.abs(a))))


def discrete_variations(path, f: FilterSeq, indices) -> np.ndarray:
    """``Delta_k = sum_p a_p X((k+p)/n)`` for each absolute index ``k``.

    ``path`` is a :class:`mfstable.sim.SamplePath`; ``indices`` are absolute
    grid indices, i.e. ``k`` refers to time ``k / path.n``.
    """
    idx = np.asarray(indices, dtype=np.int64)
    rel = idx - path.i_start
    values = np.asarray(path.values)
    bad = (rel < 0) | (rel + f.K >= len(values))
    if np.any(bad):
        k = int(idx[np.argmax(bad)])
        raise PathRangeError(
            f"variation at k={k} needs samples {k}..{k + f.K}, path covers "
            f"{path.i_start}..{path.i_start + len(values) - 1}",
            k=k,
        )
    # sum a_p (X_{k+p} - X_k): neighbouring samples subtract without
    # cancellation against the level of the path
    base = values[rel]
    a0 = float(sum(f.coefficients))
    out = a0 * base if a0 != 0.0 else np.zeros(len(idx))
    for p, a_p in enumerate(f.coefficients[1:], start=1):
        if a_p != 0.0:
            out += a_p * (values[rel + p] - base)
    return out
