"""Quadrature values of the limiting constants of the variation statistics.

``M`` is the alpha-norm of the filtered kernel at the local exponent,
``M_beta`` the limit of the normalised negative power variation and
``sigma_kn`` the alpha-norm of one normalised variation of the process
with a time-varying exponent. These values are the ground truth the
estimator tests compare against; they do not depend on any simulation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .errors import DegenerateKernelError, DomainError, NumericFailure
from .filters import FilterSeq
from .specfun import ExponentPair, c_beta, h, ln_gamma, psi

__all__ = [
    "KernelSpec",
    "m_t0",
    "m_t0_beta_quadrature",
    "m_t0_beta_closed",
    "stable_moment_integral",
    "sigma_kn",
    "fixed_point_residual",
]

QUAD_EPSREL = 1e-11
QUAD_LIMIT = 400
TARGET_RTOL = 1e-8
_SERIES_TERMS = 60


@dataclass(frozen=True)
class KernelSpec:
    """Kernel parameters at ``t0``.

    ``normalized`` selects the kernel atom ``(x**d - 1) / (pi d)`` used by the
    default simulator instead of the raw ``x**d``; the two differ by the
    factor ``pi |d|`` and only the former is defined at ``d = 0``.
    """

    alpha: float
    H_at_t0: float
    filter: FilterSeq
    H_function: object = None
    normalized: bool = False

    def __post_init__(self):
        if not (0.0 < self.alpha <= 2.0):
            raise DomainError(f"alpha must lie in (0, 2], got {self.alpha}")
        if not (0.0 < self.H_at_t0 < 1.0):
            raise DomainError(f"H must lie in (0, 1), got {self.H_at_t0}")

    @property
    def exponent(self) -> float:
        return self.H_at_t0 - 1.0 / self.alpha


def _quad(f, a, b, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err, info, *rest = integrate.quad(
            f, a, b, epsabs=0.0, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT,
            full_output=1, **kw,
        )
    return val, err


def _weighted(g, a, b, wl, wr):
    """``g / ((s-a)^wl (b-s)^wr)`` for an algebraic-weight rule."""
    lo = a + max(1e-13 * (b - a), 4.0 * np.spacing(abs(a)))
    hi = b - max(1e-13 * (b - a), 4.0 * np.spacing(abs(b)))

    def fw(s):
        s = min(max(s, lo), hi)
        return g(s) / ((s - a) ** wl * (b - s) ** wr)

    return fw


def _check(total, err, what):
    if not np.isfinite(total) or err > TARGET_RTOL * abs(total):
        raise NumericFailure(
            f"{what}: quadrature reached relative error {err / abs(total) if total else err:.3g}, "
            f"target {TARGET_RTOL:g}",
            achieved=err / abs(total) if total else err,
        )


# ---------------------------------------------------------------------------
# alpha-norm of a finite sum of power atoms
# ---------------------------------------------------------------------------


def _atom(x, d: float, normalized: bool):
    """``x**d`` or ``(x**d - 1) / (pi d)`` (``log(x) / pi`` at ``d = 0``)."""
    if not normalized:
        return x**d
    with np.errstate(divide="ignore"):
        if d == 0.0:
            return np.log(x) / math.pi
        return np.expm1(d * np.log(x)) / (math.pi * d)


class _AtomSum:
    """``G(s) = sum_i c_i A(|s - z_i|; d_i)`` with exact local evaluation.

    ``near(j, delta)`` returns ``G(z_j + delta) * |delta|^(-e_j)`` where
    ``e_j`` is the most negative exponent sitting at ``z_j`` (no scaling
    when it is non-negative). The atoms at ``z_j`` are evaluated from
    ``delta`` itself so nothing is lost to the rounding of ``z_j + delta``.
    """

    def __init__(self, z, coef, d, normalized: bool, far=None, far_radius=math.inf):
        self.z_all = np.asarray(z, dtype=float)
        self.c_all = np.asarray(coef, dtype=float)
        self.d_all = np.asarray(d, dtype=float)
        self.normalized = normalized
        self.points = np.unique(self.z_all)
        self.groups = [np.flatnonzero(self.z_all == zz) for zz in self.points]
        self.exps = np.array([self.d_all[g].min() for g in self.groups])
        self.far = far
        self.far_radius = far_radius
        self.center = 0.5 * (self.points[0] + self.points[-1])

    def _terms(self, idx, dist):
        out = 0.0
        for i in idx:
            out += self.c_all[i] * _atom(dist[i], self.d_all[i], self.normalized)
        return out

    def __call__(self, s: float) -> float:
        if self.far is not None and abs(s - self.center) > self.far_radius:
            return self.far(s)
        dist = np.abs(s - self.z_all)
        return float(self._terms(range(len(self.z_all)), dist))

    def near(self, j: int, delta: float) -> float:
        e = self.exps[j]
        ad = abs(delta)
        s = self.points[j] + delta
        g = self.groups[j]
        others = np.setdiff1d(np.arange(len(self.z_all)), g)
        dist = np.abs(s - self.z_all)
        rest = float(self._terms(others, dist))
        local = 0.0
        for i in g:
            di, ci = self.d_all[i], self.c_all[i]
            if e < 0:
                if not self.normalized:
                    local += ci * ad ** (di - e)
                elif di == 0.0:
                    local += ci * math.log(ad) * ad ** (-e) / math.pi
                else:
                    local += ci * (ad ** (di - e) - ad ** (-e)) / (math.pi * di)
            else:
                local += ci * float(_atom(ad, di, self.normalized))
        if e < 0:
            rest *= ad ** (-e)
        return local + rest


def _sign_changes(f, xs):
    vals = np.array([f(x) for x in xs])
    roots = []
    for i in range(len(xs) - 1):
        if vals[i] == 0.0:
            roots.append(xs[i])
        elif vals[i] * vals[i + 1] < 0:
            roots.append(optimize.brentq(f, xs[i], xs[i + 1], xtol=1e-15, rtol=1e-15))
    span = xs[-1] - xs[0]
    out = []
    for r in sorted(roots):
        if xs[0] + 1e-12 * span < r < xs[-1] - 1e-12 * span and (not out or r - out[-1] > 1e-12 * span):
            out.append(r)
    return out


def _integrate_pieces(phi, a, b, roots, alpha, mu_left=0.0):
    """``int_a^b (x - a)^mu_left phi(x) dx`` with simple zeros of ``phi`` at ``roots``.

    ``phi`` behaves like ``|x - r|^alpha`` at each root, which becomes part
    of the algebraic weight of the sub-interval.
    """
    edges = [a] + list(roots) + [b]
    if mu_left:
        full = lambda x: (x - a) ** mu_left * phi(x)  # noqa: E731
    else:
        full = phi
    total, err = 0.0, 0.0
    for i in range(len(edges) - 1):
        lo, hi = edges[i], edges[i + 1]
        dl = alpha if i > 0 else 0.0
        dr = alpha if i < len(edges) - 2 else 0.0
        g = phi if i == 0 else full
        wl = dl if i > 0 else mu_left
        if wl or dr:
            if dl or dr:
                g = _weighted(g, lo, hi, dl, dr)
            v, e = _quad(g, lo, hi, weight="alg", wvar=(wl, dr))
        else:
            v, e = _quad(g, lo, hi)
        total += v
        err += e
    return total, err


def _alpha_norm_integral(G: _AtomSum, alpha: float, samples: int = 48) -> tuple[float, float]:
    """``int_R |G(s)|^alpha ds`` and its error estimate."""
    pts = G.points
    total, err = 0.0, 0.0
    # half pieces around every singular point
    for j, z in enumerate(pts):
        e = G.exps[j]
        for side in (-1.0, 1.0):
            nb = j + int(side)
            length = 1.0 if not (0 <= nb < len(pts)) else 0.5 * abs(pts[nb] - z)
            if e == 0.0:
                f = lambda x, j=j, side=side: abs(G.near(j, side * x)) ** alpha  # noqa: E731
                xs = length * np.linspace(0, 1, samples + 1)[1:] ** 2
                xs = np.concatenate([[1e-300], xs])
                roots = _sign_changes(lambda x, j=j, side=side: G.near(j, side * x), xs)
                v, er = _integrate_pieces(f, 0.0, length, roots, alpha)
            else:
                ae = abs(e)
                scale = alpha if e < 0 else 0.0
                mu = 1.0 / ae - 1.0 - scale
                sgn = lambda x, j=j, side=side, ae=ae: G.near(j, side * x ** (1.0 / ae))  # noqa: E731
                xmax = length**ae
                xs = xmax * np.linspace(0, 1, samples + 1)[1:] ** 2
                xs = np.concatenate([[xmax * 1e-12], xs])
                roots = _sign_changes(sgn, xs)
                phi_ = lambda x, sgn=sgn, ae=ae: abs(sgn(x)) ** alpha / ae  # noqa: E731
                v, er = _integrate_pieces(phi_, 0.0, xmax, roots, alpha, mu_left=mu)
            total += v
            err += er
    # tails beyond one unit from the outermost points, s = edge +- 1/u
    for edge, side in ((pts[-1], 1.0), (pts[0], -1.0)):
        f = lambda u, edge=edge, side=side: G(edge + side / u)  # noqa: E731
        us = np.linspace(0, 1, samples + 1)[1:]
        roots = _sign_changes(f, us)
        phi_ = lambda u, f=f: abs(f(u)) ** alpha / u**2  # noqa: E731
        v, er = _integrate_pieces(phi_, 0.0, 1.0, roots, alpha)
        total += v
        err += er
    return total, err


# ---------------------------------------------------------------------------
# M: alpha-norm of the filtered kernel
# ---------------------------------------------------------------------------


def _far_series(filt: FilterSeq, d: float, normalized: bool):
    """Far-field expansion of ``sum_p a_p A(|p - s|)`` for ``|s| >> K``."""
    a = filt.a
    p = np.arange(filt.K + 1, dtype=float)
    jmax = filt.L + 1 + _SERIES_TERMS
    j = np.arange(jmax + 1)
    moments = np.array([np.sum(a * p**jj) for jj in j])
    moments[: filt.L + 1] = 0.0
    coef = np.empty(jmax + 1)
    c = 1.0
    coef[0] = 1.0
    for jj in range(1, jmax + 1):
        # binom(d, j), or binom(d, j) / d for the normalised atom
        c = c * ((d - (jj - 1)) if (jj > 1 or not normalized) else 1.0) / jj
        coef[jj] = c
    series = coef * moments

    def far(s):
        poly = float(np.sum(series * (-1.0 / s) ** j))
        val = abs(s) ** d * poly
        return val / math.pi if normalized else val

    return far


def m_t0(spec: KernelSpec) -> float:
    """``(int_R |sum_p a_p |p - s|^(H - 1/alpha)|^alpha ds)^(1/alpha)``.

    The line is cut at the singular points ``0..K``. Next to each point the
    variable ``x = |s - p|^|d|`` turns the power singularity into an
    algebraic weight, zero crossings of the kernel become end points with an
    ``|x - r|^alpha`` weight, and the tails are mapped by ``s -> 1/s`` with
    a moment series for the far field.
    """
    d = spec.exponent
    if not spec.normalized and d == 0.0:
        raise DegenerateKernelError("H = 1/alpha: the raw kernel vanishes and M would be 0")
    f = spec.filter
    K = f.K
    G = _AtomSum(
        np.arange(K + 1), f.a, np.full(K + 1, d), spec.normalized,
        far=_far_series(f, d, spec.normalized), far_radius=4.0 * K + 0.5 * K,
    )
    total, err = _alpha_norm_integral(G, spec.alpha)
    _check(total, err, "m_t0")
    return total ** (1.0 / spec.alpha)


# ---------------------------------------------------------------------------
# M_beta: limit of the normalised negative power variation
# ---------------------------------------------------------------------------


def _check_alpha_beta(alpha, beta):
    if not (0.0 < alpha <= 2.0):
        raise DomainError(f"alpha must lie in (0, 2], got {alpha}")
    if not (-0.5 < beta < 0.0):
        raise DomainError(f"beta must lie in (-1/2, 0), got {beta}")


def stable_moment_integral(alpha: float, beta: float) -> float:
    """``int_R exp(-|y|^alpha) |y|^-(1+beta) dy`` by quadrature."""
    _check_alpha_beta(alpha, beta)
    f = lambda y: math.exp(-(y**alpha))  # noqa: E731
    v0, e0 = _quad(f, 0.0, 1.0, weight="alg", wvar=(-(1.0 + beta), 0.0))
    v1, e1 = _quad(lambda y: f(y) * y ** (-(1.0 + beta)), 1.0, np.inf)
    total, err = 2.0 * (v0 + v1), 2.0 * (e0 + e1)
    _check(total, err, "stable_moment_integral")
    return total


def m_t0_beta_quadrature(alpha: float, beta: float, M: float) -> float:
    """``E|Z|^beta`` for ``Z`` SaS with scale ``M``, via the Fourier route.

    ``M**beta * C_beta / (2 sqrt(pi)) * int exp(-|y|^alpha) |y|^-(1+beta) dy``.
    The Fourier constant ``1 / (2 sqrt(pi))`` is the one for which the formula
    reproduces the Gaussian absolute moments under the
    ``exp(-scale^alpha |y|^alpha)`` convention.
    """
    _check_alpha_beta(alpha, beta)
    if not M > 0:
        raise DomainError(f"M must be positive, got {M}")
    integral = stable_moment_integral(alpha, beta)
    return M**beta * c_beta(beta) / (2.0 * math.sqrt(math.pi)) * integral


def m_t0_beta_closed(alpha: float, beta: float, M: float) -> float:
    """``M^b 2^b Gamma((b+1)/2) Gamma(1 - b/alpha) / (sqrt(pi) Gamma(1 - b/2))``."""
    _check_alpha_beta(alpha, beta)
    if not M > 0:
        raise DomainError(f"M must be positive, got {M}")
    return math.exp(
        beta * math.log(M)
        + beta * math.log(2.0)
        + ln_gamma((beta + 1.0) / 2.0)
        + ln_gamma(1.0 - beta / alpha)
        - 0.5 * math.log(math.pi)
        - ln_gamma(1.0 - beta / 2.0)
    )


def fixed_point_residual(alpha: float, beta1: float, beta2: float, M: float = 1.0) -> float:
    """``psi(M_beta1, M_beta2) - h(alpha)`` with closed-form ``M_beta``."""
    pair = ExponentPair.from_betas(beta1, beta2)
    x = m_t0_beta_closed(alpha, beta1, M)
    y = m_t0_beta_closed(alpha, beta2, M)
    return psi(pair, x, y) - float(h(pair, alpha))


# ---------------------------------------------------------------------------
# sigma_kn: scale of one normalised variation under a varying exponent
# ---------------------------------------------------------------------------


def _pair_kernel(x: float, s: float, d: float, normalized: bool) -> float:
    """``A(|x - s|) - A(|s|)`` evaluated without cancellation."""
    r = x / s
    lg = math.log1p(-r) if abs(r) < 0.5 else math.log(abs(1.0 - r))
    if normalized:
        if d == 0.0:
            return lg / math.pi
        return abs(s) ** d * math.expm1(d * lg) / (math.pi * d)
    return abs(s) ** d * math.expm1(d * lg)


def sigma_kn(k: int, n: int, t0: float, model: KernelSpec, gamma: float | None = None) -> float:
    """``|| Delta_{k,n} X / n^(-H(t0)) ||_alpha`` by quadrature.

    ``model.H_function`` gives the exponent at each sample time
    ``(k + p)/n``; without it ``H`` is the constant ``model.H_at_t0``.
    With ``gamma`` given, ``k`` must belong to the window around ``t0``.

    In the variable ``u = n s`` the integral reads
    ``int |sum_p a_p n^(H(t0) - H_p) (A(|k+p-u|) - A(|u|))|^alpha du``,
    with singular points at ``0`` and ``k..k+K``.
    """
    from .estim import neighborhood

    alpha = model.alpha
    f = model.filter
    a = f.a
    if gamma is not None:
        nb = neighborhood(n, gamma, t0, f.K)
        if k not in set(nb.indices.tolist()):
            raise DomainError(f"k = {k} is outside the window around t0 = {t0}")
    if k <= 0:
        raise DomainError(f"k must be positive, got {k}")
    times = (k + np.arange(f.K + 1)) / n
    if model.H_function is None:
        Hs = np.full(f.K + 1, model.H_at_t0)
    else:
        Hs = np.asarray(model.H_function(times), dtype=float)
    ds = Hs - 1.0 / alpha
    if not model.normalized and np.any(ds == 0.0):
        raise DegenerateKernelError("H = 1/alpha at a sample time: the raw kernel vanishes")
    c = a * float(n) ** (model.H_at_t0 - Hs)
    x = k + np.arange(f.K + 1, dtype=float)

    def far(u):
        return sum(
            cp * _pair_kernel(xp, u, dp, model.normalized) for cp, xp, dp in zip(c, x, ds)
        )

    G = _AtomSum(
        np.concatenate([x, np.zeros(f.K + 1)]),
        np.concatenate([c, -c]),
        np.concatenate([ds, ds]),
        model.normalized,
        far=far,
        far_radius=0.5 * x[-1] + 2.0,
    )
    total, err = _alpha_norm_integral(G, alpha)
    _check(total, err, "sigma_kn")
    return total ** (1.0 / alpha)
