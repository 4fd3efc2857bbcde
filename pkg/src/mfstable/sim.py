"""Sample paths of multifractional Brownian motion and linear multifractional
stable motion.

A path is the Riemann sum

    X(t) = sum_j k(t, s_j) dM_j,   k(t, s) = A(|t - s|) - A(|s|)

over cells of width ``delta = 1 / (n m)`` covering ``[min(U, 0) - R,
max(U, 0) + R]``. The ``s_j`` are cell midpoints and the ``dM_j`` are
independent symmetric alpha-stable variables of scale ``delta**(1/alpha)``.
One realisation of ``dM`` is shared by every grid time.

Two kernel atoms ``A`` are available (``ModelSpec.normalization``):

``"none"``
    ``A(x) = x**d`` with ``d = H(t) - 1/alpha``, the raw moving-average
    kernel. It vanishes identically when ``H = 1/alpha``.
``"unit"`` (default)
    ``A(x) = (x**d - 1) / (pi d)``, continued by ``log(x) / pi`` at
    ``d = 0``. For constant ``H`` this is the raw process divided by
    ``pi d``, so the estimators see the same law up to scale, and at
    ``alpha = 2, H = 1/2`` it is Brownian motion with ``Var X(t) = 2t``.

By default (``ModelSpec.rule = "cell"``) each cell carries the exact average
of ``A`` over the cell rather than its midpoint value, which removes most of
the bias next to the singular point ``s = t``.

Cells farther than ``ModelSpec.near_field`` grid steps from a time are
handled per block of ``m`` cells through the first four moments of the
block's increments (``near_field = None`` gives the plain sum; the two agree
to about 1e-8 relative at the default). For a time-varying exponent the sum
is evaluated at Chebyshev nodes in ``d`` and interpolated to each grid time;
the sum is entire in ``d`` so the interpolation error is at rounding level.
"""

from __future__ import annotations

import hashlib
import io
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy import fft as sp_fft

from .errors import CapacityError, ConfigError, DomainError

__all__ = [
    "HurstFunction",
    "ModelSpec",
    "SamplePath",
    "sas_variate",
    "sas_variates",
    "replicate_seed",
    "make_rng",
    "measure_increments",
    "path_from_increments",
    "coarsen_increments",
    "simulate",
    "simulate_lmsm",
    "simulate_mbm",
    "simulate_fbm_exact",
    "write_path",
    "read_path",
    "path_checksum",
    "HURST_PRESETS",
    "FBM_EXACT_MAX_POINTS",
]

FBM_EXACT_MAX_POINTS = 2**13
_HURST_KINDS = ("constant", "affine-clipped", "logistic", "sinusoidal")
_HURST_PARAMS = {
    "constant": ("value",),
    "affine-clipped": ("intercept", "slope", "lower", "upper"),
    "logistic": ("lower", "upper", "center", "steepness"),
    "sinusoidal": ("mean", "amplitude", "frequency", "phase"),
}
_SAMPLE_GRID = 20001


# ---------------------------------------------------------------------------
# Multifractional function
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HurstFunction:
    """A multifractional function ``H: U -> (0, 1)``.

    ``h_minus``, ``h_plus`` and ``derivative_bound`` are computed on the
    domain interval at construction.
    """

    kind: str
    params: dict
    domain: tuple = (0.0, 1.0)
    h_minus: float = field(init=False)
    h_plus: float = field(init=False)
    derivative_bound: float = field(init=False)

    def __post_init__(self):
        if self.kind not in _HURST_KINDS:
            raise ConfigError(f"unknown H-function kind {self.kind!r}")
        missing = [p for p in _HURST_PARAMS[self.kind] if p not in self.params]
        if missing:
            raise ConfigError(
                f"H-function {self.kind!r} is missing parameter(s): {', '.join(missing)}"
            )
        object.__setattr__(
            self, "params", {k: float(self.params[k]) for k in _HURST_PARAMS[self.kind]}
        )
        a, b = self.domain
        if not b > a:
            raise ConfigError(f"empty domain {self.domain}")
        t = np.linspace(a, b, _SAMPLE_GRID)
        vals = self(t)
        lo, hi = float(vals.min()), float(vals.max())
        dbound = float(np.abs(self.derivative(t)).max())
        if self.kind == "sinusoidal":
            p = self.params
            dbound = abs(p["amplitude"]) * 2 * math.pi * abs(p["frequency"])
        object.__setattr__(self, "h_minus", lo)
        object.__setattr__(self, "h_plus", hi)
        object.__setattr__(self, "derivative_bound", dbound)
        if not (0.0 < lo and hi < 1.0):
            raise ConfigError(f"H must take values in (0, 1) on {self.domain}, got [{lo}, {hi}]")

    @classmethod
    def constant(cls, value, domain=(0.0, 1.0)):
        return cls("constant", {"value": value}, tuple(domain))

    @classmethod
    def logistic(cls, lower, upper, center, steepness, domain=(0.0, 1.0)):
        return cls(
            "logistic",
            {"lower": lower, "upper": upper, "center": center, "steepness": steepness},
            tuple(domain),
        )

    @classmethod
    def affine_clipped(cls, intercept, slope, lower, upper, domain=(0.0, 1.0)):
        return cls(
            "affine-clipped",
            {"intercept": intercept, "slope": slope, "lower": lower, "upper": upper},
            tuple(domain),
        )

    @classmethod
    def sinusoidal(cls, mean, amplitude, frequency, phase=0.0, domain=(0.0, 1.0)):
        return cls(
            "sinusoidal",
            {"mean": mean, "amplitude": amplitude, "frequency": frequency, "phase": phase},
            tuple(domain),
        )

    @property
    def is_constant(self) -> bool:
        return self.kind == "constant"

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        p = self.params
        if self.kind == "constant":
            out = np.full_like(t, p["value"])
        elif self.kind == "affine-clipped":
            out = np.clip(p["intercept"] + p["slope"] * t, p["lower"], p["upper"])
        elif self.kind == "logistic":
            z = p["steepness"] * (t - p["center"])
            out = p["lower"] + (p["upper"] - p["lower"]) / (1.0 + np.exp(-z))
        else:
            out = p["mean"] + p["amplitude"] * np.sin(
                2 * np.pi * p["frequency"] * t + p["phase"]
            )
        return out[()] if out.ndim == 0 else out

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        p = self.params
        if self.kind == "constant":
            out = np.zeros_like(t)
        elif self.kind == "affine-clipped":
            raw = p["intercept"] + p["slope"] * t
            inside = (raw > p["lower"]) & (raw < p["upper"])
            out = np.where(inside, p["slope"], 0.0)
        elif self.kind == "logistic":
            e = np.exp(-p["steepness"] * (t - p["center"]))
            out = (p["upper"] - p["lower"]) * p["steepness"] * e / (1.0 + e) ** 2
        else:
            w = 2 * np.pi * p["frequency"]
            out = p["amplitude"] * w * np.cos(w * t + p["phase"])
        return out[()] if out.ndim == 0 else out

    def with_domain(self, domain) -> "HurstFunction":
        return HurstFunction(self.kind, dict(self.params), tuple(domain))

    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.params}


HURST_PRESETS = {
    "bm": lambda domain=(0.0, 1.0): HurstFunction.constant(0.5, domain),
    # H(0.5) = 0.6, sup over [0, 1] is about 0.696 < 0.7
    "logistic": lambda domain=(0.0, 1.0): HurstFunction.logistic(0.5, 0.7, 0.5, 8.0, domain),
    "sinusoidal": lambda domain=(0.0, 1.0): HurstFunction.sinusoidal(0.5, 0.15, 1.0, 0.0, domain),
}


# ---------------------------------------------------------------------------
# Model and path containers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModelSpec:
    alpha: float
    hurst: HurstFunction
    n: int
    domain: tuple = (0.0, 1.0)
    truncation_radius: float = 8.0
    refinement: int = 16
    seed: int = 0
    normalization: str = "unit"
    rule: str = "cell"
    near_field: int | None = 16

    def __post_init__(self):
        if not (0.0 < self.alpha <= 2.0):
            raise ConfigError(f"alpha must lie in (0, 2], got {self.alpha}")
        if int(self.n) != self.n or self.n < 2:
            raise ConfigError(f"n must be an integer >= 2, got {self.n}")
        if int(self.refinement) != self.refinement or self.refinement < 1:
            raise ConfigError(f"refinement must be an integer >= 1, got {self.refinement}")
        if self.normalization not in ("unit", "none"):
            raise ConfigError(f"normalization must be 'unit' or 'none', got {self.normalization!r}")
        if self.rule not in ("cell", "midpoint"):
            raise ConfigError(f"rule must be 'cell' or 'midpoint', got {self.rule!r}")
        if self.near_field is not None and (
            int(self.near_field) != self.near_field or self.near_field < 1
        ):
            raise ConfigError(f"near_field must be a positive integer or None, got {self.near_field}")
        a, b = map(float, self.domain)
        if not b > a:
            raise ConfigError(f"empty domain {self.domain}")
        if self.truncation_radius < 2.0 * ((b - a) + 1.0):
            raise ConfigError(
                f"truncation_radius {self.truncation_radius} is too small for domain "
                f"{self.domain}; need at least {2.0 * ((b - a) + 1.0)}"
            )
        for end in (a, b):
            if abs(end * self.n - round(end * self.n)) > 1e-9:
                raise ConfigError(f"domain endpoint {end} is not on the 1/{self.n} grid")
        object.__setattr__(self, "domain", (a, b))
        if tuple(self.hurst.domain) != (a, b):
            object.__setattr__(self, "hurst", self.hurst.with_domain((a, b)))

    @property
    def i_start(self) -> int:
        return int(round(self.domain[0] * self.n))

    @property
    def i_end(self) -> int:
        return int(round(self.domain[1] * self.n))

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.i_start, self.i_end + 1) / self.n


@dataclass
class SamplePath:
    """Values ``X(t_start + i/n)`` on a uniform grid."""

    n: int
    t_start: float
    values: np.ndarray
    alpha: float = float("nan")
    seed: int | None = None
    model: ModelSpec | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if abs(self.t_start * self.n - round(self.t_start * self.n)) > 1e-9:
            raise ConfigError(f"t_start {self.t_start} is not on the 1/{self.n} grid")

    @property
    def i_start(self) -> int:
        return int(round(self.t_start * self.n))

    @property
    def times(self) -> np.ndarray:
        return (self.i_start + np.arange(len(self.values))) / self.n

    def __len__(self):
        return len(self.values)

    def subsample(self, step: int = 2) -> "SamplePath":
        """Keep the points whose absolute index is a multiple of ``step``."""
        if self.n % step:
            raise ConfigError(f"n = {self.n} is not divisible by {step}")
        offset = (-self.i_start) % step
        vals = self.values[offset::step]
        return SamplePath(
            self.n // step,
            (self.i_start + offset) / self.n,
            vals,
            self.alpha,
            self.seed,
            self.model,
        )

    def scaled(self, c: float) -> "SamplePath":
        return replace(self, values=c * self.values)

    def shifted(self, c: float) -> "SamplePath":
        return replace(self, values=self.values + c)


# ---------------------------------------------------------------------------
# Randomness
# ---------------------------------------------------------------------------


def replicate_seed(seed: int, replicate: int) -> int:
    """Seed of replicate ``r`` of an experiment with base seed ``seed``.

    ``SeedSequence(entropy=seed, spawn_key=(r,))`` hashed to 63 bits. Streams
    for distinct ``r`` are independent and adding replicates never changes
    the seeds of existing ones.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(replicate),))
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def sas_variates(alpha: float, scale: float, size, rng: np.random.Generator) -> np.ndarray:
    """Symmetric alpha-stable draws with characteristic function
    ``exp(-scale**alpha |y|**alpha)`` (Chambers-Mallows-Stuck).

    ``alpha = 2`` draws ``N(0, 2 scale**2)`` directly.
    """
    if not (0.0 < alpha <= 2.0):
        raise DomainError(f"alpha must lie in (0, 2], got {alpha}")
    if not scale > 0:
        raise DomainError(f"scale must be positive, got {scale}")
    if alpha == 2.0:
        return rng.standard_normal(size) * (math.sqrt(2.0) * scale)
    v = rng.uniform(-np.pi / 2, np.pi / 2, size)
    if alpha == 1.0:
        return scale * np.tan(v)
    w = rng.standard_exponential(size)
    x = (
        np.sin(alpha * v)
        / np.cos(v) ** (1.0 / alpha)
        * (np.cos((1.0 - alpha) * v) / w) ** ((1.0 - alpha) / alpha)
    )
    return scale * x


def sas_variate(alpha: float, scale: float, rng: np.random.Generator) -> float:
    return float(sas_variates(alpha, scale, None, rng))


# ---------------------------------------------------------------------------
# Moving-average Riemann sum
# ---------------------------------------------------------------------------


def _cell_range(spec: ModelSpec) -> tuple[int, int]:
    """Integer cell indices ``[j0, j1)``; cell ``j`` is ``[j, j+1) * delta``."""
    nm = spec.n * spec.refinement
    a, b = spec.domain
    lo = (min(a, 0.0) - spec.truncation_radius) * nm
    hi = (max(b, 0.0) + spec.truncation_radius) * nm
    return math.floor(lo + 1e-9), math.ceil(hi - 1e-9)


def measure_increments(spec: ModelSpec, rng: np.random.Generator) -> tuple[int, np.ndarray]:
    """First cell index and the cell increments ``dM_j`` for ``spec``."""
    j0, j1 = _cell_range(spec)
    delta = 1.0 / (spec.n * spec.refinement)
    return j0, sas_variates(spec.alpha, delta ** (1.0 / spec.alpha), j1 - j0, rng)


def coarsen_increments(j0_fine: int, dm_fine: np.ndarray, spec_coarse: ModelSpec,
                       factor: int = 2) -> np.ndarray:
    """Sum groups of ``factor`` fine cells into the cells of ``spec_coarse``.

    Sums of i.i.d. SaS cells have exactly the law of one wider cell, so the
    result is a valid measure realisation for the coarse grid.
    """
    j0c, j1c = _cell_range(spec_coarse)
    start = j0c * factor - j0_fine
    stop = j1c * factor - j0_fine
    if start < 0 or stop > len(dm_fine):
        raise ConfigError("fine increments do not cover the coarse cell range")
    return dm_fine[start:stop].reshape(-1, factor).sum(axis=1)


def _atom(x: np.ndarray, d: float, normalization: str) -> np.ndarray:
    if normalization == "none":
        return x**d
    lx = np.log(x)
    if d == 0.0:
        return lx / np.pi
    return np.expm1(d * lx) / (np.pi * d)


def _expm1_over_d(x: np.ndarray, d: float) -> np.ndarray:
    """``(x**d - 1) / d``, equal to ``log(x)`` at ``d = 0``."""
    with np.errstate(divide="ignore"):
        lx = np.log(x)
    if d == 0.0:
        return lx
    return np.expm1(d * lx) / d


_NEAR_CELLS = 32.0


def _cell_atom(c: np.ndarray, d: float, normalization: str, delta: float) -> np.ndarray:
    """Average of the atom over ``[c - delta/2, c + delta/2]`` for midpoints ``c``.

    Cells within ``_NEAR_CELLS`` widths of the singular point use the exact
    antiderivative; farther cells use the midpoint value plus three even
    Taylor corrections, which avoids cancellation and is exact to rounding.
    """
    out = np.empty_like(c)
    near = c < _NEAR_CELLS * delta
    cn = c[near]
    lo = cn - 0.5 * delta
    hi = cn + 0.5 * delta
    if normalization == "none":
        out[near] = (hi ** (d + 1.0) - lo ** (d + 1.0)) / ((d + 1.0) * delta)
    else:
        lo_term = np.where(lo > 0.0, lo * _expm1_over_d(np.maximum(lo, 1e-300), d), 0.0)
        out[near] = (hi * _expm1_over_d(hi, d) - lo_term - delta) / ((d + 1.0) * np.pi * delta)
    cf = c[~near]
    r2 = (delta / cf) ** 2
    series = cf**d * r2 * (d - 1.0) * (
        1.0 / 24.0 + r2 * (d - 2.0) * (d - 3.0) * (1.0 / 1920.0
        + r2 * (d - 4.0) * (d - 5.0) / 322560.0)
    )
    if normalization == "none":
        out[~near] = cf**d + d * series
    else:
        out[~near] = (_expm1_over_d(cf, d) + series) / np.pi
    return out


def _kernel_values(c: np.ndarray, d: float, spec: "ModelSpec", delta: float) -> np.ndarray:
    if spec.rule == "midpoint" or d <= -1.0:
        return _atom(c, d, spec.normalization)
    return _cell_atom(c, d, spec.normalization, delta)


def _chebyshev_nodes(lo: float, hi: float, count: int) -> np.ndarray:
    k = np.arange(count)
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * np.cos((2 * k + 1) * np.pi / (2 * count))


def _barycentric_matrix(nodes: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Rows of Lagrange basis values at ``x`` for first-kind Chebyshev nodes."""
    count = len(nodes)
    k = np.arange(count)
    w = (-1.0) ** k * np.sin((2 * k + 1) * np.pi / (2 * count))
    diff = x[:, None] - nodes[None, :]
    exact = diff == 0.0
    diff[exact] = 1.0
    terms = w / diff
    mat = terms / terms.sum(axis=1, keepdims=True)
    hit = exact.any(axis=1)
    if np.any(hit):
        mat[hit] = exact[hit].astype(float)
    return mat


def _node_count(half_width: float, log_span: float) -> int:
    if half_width == 0.0:
        return 1
    z = half_width * log_span
    count, bound = 1, 2.0 * z
    while bound > 1e-15 and count < 48:
        count += 1
        bound *= z / (2.0 * count)
    return max(count, 4)


def _atom_derivatives(x: np.ndarray, d: float, normalization: str, count: int) -> list:
    """``A, A', ..., A^(count-1)`` at ``x``."""
    out = [_atom(x, d, normalization)]
    coef = 1.0 / np.pi if normalization == "unit" else d
    for j in range(1, count):
        out.append(coef * x ** (d - j))
        coef *= d - j
    return out


def _full_sum(spec: ModelSpec, j0: int, dm: np.ndarray, idx_abs: np.ndarray):
    """Per-exponent evaluator of the plain Riemann sum (one long FFT per call)."""
    m = spec.refinement
    delta = 1.0 / (spec.n * m)
    J = len(dm)
    T = m * idx_abs
    N = len(T)
    # q = T_i - j spans T[0] - (j0 + J - 1) .. T[-1] - j0; t - s = (q - 1/2) delta
    q = T[0] - (j0 + J - 1) + np.arange(J + m * (N - 1))
    dist = np.abs(q - 0.5) * delta
    anchor = np.abs(np.arange(j0, j0 + J) + 0.5) * delta
    out_pos = m * np.arange(N) + J - 1
    nfft = sp_fft.next_fast_len(len(q) + J - 1, real=True)
    w_hat = sp_fft.rfft(dm, nfft)

    def evaluate(d):
        g = _kernel_values(dist, d, spec, delta)
        conv = sp_fft.irfft(sp_fft.rfft(g, nfft) * w_hat, nfft)
        return conv[out_pos] - _kernel_values(anchor, d, spec, delta) @ dm

    return evaluate


def _split_sum(spec: ModelSpec, j0: int, dm: np.ndarray, idx_abs: np.ndarray):
    """Per-exponent evaluator with the far field on blocks of ``m`` cells.

    Cells within ``near_field`` blocks of a grid time enter one by one. A
    farther block enters through the moments ``S_q = sum_r xi_r^q dM_r``,
    ``q = 0..3``, of its increments about the block centre, weighted by the
    Taylor coefficients of the cell kernel there; the remainder is of
    relative order ``near_field**(d - 4)``.
    """
    m, n, W = spec.refinement, spec.n, spec.near_field
    delta = 1.0 / (n * m)
    J = len(dm)
    # grid times plus t = 0 for the anchor term
    I = np.append(idx_abs, 0)
    b0 = min(j0 // m, int(I.min()) - W)
    b1 = max(-(-(j0 + J) // m), int(I.max()) + W)
    nb = b1 - b0
    dmp = np.zeros(nb * m)
    dmp[j0 - b0 * m: j0 - b0 * m + J] = dm
    xi = (np.arange(m) - 0.5 * (m - 1)) * delta
    cells = dmp.reshape(nb, m)
    moments = [cells @ xi**q for q in range(4)]

    # near field: window of 2W blocks starting W blocks before each time
    windows = np.lib.stride_tricks.sliding_window_view(dmp, 2 * W * m)[::m][I - W - b0]
    near_dist = np.abs(m * W - np.arange(2 * W * m) - 0.5) * delta
    # far field: offsets k = i - b; blocks -W < k <= W belong to the near field
    k = np.arange(int(I.min()) - (b1 - 1), int(I.max()) - b0 + 1)
    far = (k <= -W) | (k > W)
    c = np.abs(k[far] - 0.5) / n
    side = np.where(k[far] > 0, -1.0, 1.0)  # sign of s - t
    nfft = sp_fft.next_fast_len(len(k) + nb - 1, real=True)
    moments_hat = [sp_fft.rfft(S, nfft) for S in moments]
    out_pos = I - b0 - k[0]
    taylor = (1.0, 1.0, 0.5, 1.0 / 6.0)

    def evaluate(d):
        near = windows @ _kernel_values(near_dist, d, spec, delta)
        D = _atom_derivatives(c, d, spec.normalization, 6)
        if spec.rule == "cell" and d > -1.0:
            # cell averages: F = A + A'' delta^2 / 24
            D = [D[j] + D[j + 2] * delta**2 / 24.0 for j in range(4)]
        total = 0.0
        for q in range(4):
            kq = np.zeros(len(k))
            kq[far] = taylor[q] * D[q] * side**q
            total = total + sp_fft.rfft(kq, nfft) * moments_hat[q]
        y = near + sp_fft.irfft(total, nfft)[out_pos]
        return y[:-1] - y[-1]

    return evaluate


def path_from_increments(spec: ModelSpec, j0: int, dm: np.ndarray) -> np.ndarray:
    """Evaluate the Riemann sum on the grid of ``spec`` for given increments."""
    m = spec.refinement
    delta = 1.0 / (spec.n * m)
    J = len(dm)
    idx_abs = np.arange(spec.i_start, spec.i_end + 1)
    N = len(idx_abs)

    d_grid = spec.hurst(idx_abs / spec.n) - 1.0 / spec.alpha
    if spec.normalization == "none" and np.all(d_grid == 0.0):
        # the raw kernel |t-s|^0 - |s|^0 vanishes identically
        return np.zeros(N)
    d_lo, d_hi = float(d_grid.min()), float(d_grid.max())
    far_q = max(abs(m * idx_abs[0] - (j0 + J - 1) - 0.5), abs(m * idx_abs[-1] - j0 - 0.5))
    log_span = max(abs(math.log(0.5 * delta)), abs(math.log(far_q * delta)))
    count = 1 if spec.hurst.is_constant else _node_count(0.5 * (d_hi - d_lo), log_span)
    nodes = np.array([d_lo]) if count == 1 else _chebyshev_nodes(d_lo, d_hi, count)

    if spec.near_field is None:
        evaluate = _full_sum(spec, j0, dm, idx_abs)
    else:
        evaluate = _split_sum(spec, j0, dm, idx_abs)
    values = np.array([evaluate(float(d)) for d in nodes])
    if count == 1:
        x = values[0]
    else:
        x = np.einsum("ij,ji->i", _barycentric_matrix(nodes, d_grid), values)
    x = np.array(x)
    x[idx_abs == 0] = 0.0
    return x


def _simulate(spec: ModelSpec, rng: np.random.Generator | None) -> SamplePath:
    if rng is None:
        rng = make_rng(spec.seed)
    j0, dm = measure_increments(spec, rng)
    values = path_from_increments(spec, j0, dm)
    return SamplePath(spec.n, spec.domain[0], values, spec.alpha, spec.seed, spec)


def simulate_lmsm(spec: ModelSpec, rng: np.random.Generator | None = None) -> SamplePath:
    """Linear multifractional stable motion, ``0 < alpha < 2``."""
    if spec.alpha == 2.0:
        raise ConfigError("alpha = 2 is the Gaussian case; use simulate_mbm")
    return _simulate(spec, rng)


def simulate_mbm(spec: ModelSpec, rng: np.random.Generator | None = None) -> SamplePath:
    """Multifractional Brownian motion; cells carry ``N(0, 2 delta)``."""
    if spec.alpha != 2.0:
        raise ConfigError(f"simulate_mbm needs alpha = 2, got {spec.alpha}")
    return _simulate(spec, rng)


def simulate(spec: ModelSpec, rng: np.random.Generator | None = None) -> SamplePath:
    return simulate_mbm(spec, rng) if spec.alpha == 2.0 else simulate_lmsm(spec, rng)


def simulate_fbm_exact(H: float, n: int, count: int, seed: int,
                       normalization: str = "unit", replicates: int | None = None):
    """Exact fBm at ``k/n``, ``k = 0..count``, by Cholesky factorisation.

    The covariance ``c (|s|^2H + |t|^2H - |t-s|^2H)`` uses ``c = M**2`` with
    ``M`` the alpha = 2 kernel norm of the single-increment filter, so the
    law matches :func:`simulate_mbm` with constant ``H`` and the same
    normalization. With ``replicates`` set, returns a list of paths sharing
    one factorisation.
    """
    from .filters import FilterSeq
    from .oracle import KernelSpec, m_t0

    if not (0.0 < H < 1.0):
        raise DomainError(f"H must lie in (0, 1), got {H}")
    if count < 1:
        raise ConfigError("count must be positive")
    if count > FBM_EXACT_MAX_POINTS:
        raise CapacityError(
            f"dense factorisation supports at most {FBM_EXACT_MAX_POINTS} points, got {count}"
        )
    incr = FilterSeq(0, (-1.0, 1.0))
    c = m_t0(KernelSpec(2.0, H, incr, normalized=(normalization == "unit"))) ** 2
    t = np.arange(1, count + 1) / n
    cov = c * (t[:, None] ** (2 * H) + t[None, :] ** (2 * H)
               - np.abs(t[:, None] - t[None, :]) ** (2 * H))
    chol = np.linalg.cholesky(cov)
    rng = make_rng(seed)
    reps = 1 if replicates is None else replicates
    z = rng.standard_normal((count, reps))
    x = np.vstack([np.zeros((1, reps)), chol @ z])
    paths = [SamplePath(n, 0.0, x[:, r], 2.0, seed) for r in range(reps)]
    return paths[0] if replicates is None else paths


# ---------------------------------------------------------------------------
# Columnar text format
# ---------------------------------------------------------------------------


def _format_path(path: SamplePath) -> str:
    buf = io.StringIO()
    seed = "none" if path.seed is None else str(int(path.seed))
    buf.write(
        f"# n={int(path.n)} t_start={float(path.t_start)!r} alpha={float(path.alpha)!r} seed={seed}\n"
    )
    for v in path.values:
        buf.write(f"{float(v)!r}\n")
    return buf.getvalue()


def write_path(path: SamplePath, target) -> str:
    """Write ``path`` as one header line and one value per line.

    Returns the SHA-256 checksum of the written bytes.
    """
    text = _format_path(path)
    data = text.encode("ascii")
    if hasattr(target, "write"):
        target.write(text)
    else:
        Path(target).write_bytes(data)
    return hashlib.sha256(data).hexdigest()


def path_checksum(path: SamplePath) -> str:
    return hashlib.sha256(_format_path(path).encode("ascii")).hexdigest()


def read_path(source) -> SamplePath:
    text = source.read() if hasattr(source, "read") else Path(source).read_text()
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise ConfigError("path file must start with a '# n=... t_start=... alpha=... seed=...' header")
    header = {}
    for tok in lines[0][1:].split():
        if "=" not in tok:
            raise ConfigError(f"malformed header token {tok!r}")
        key, val = tok.split("=", 1)
        header[key] = val
    for key in ("n", "t_start", "alpha", "seed"):
        if key not in header:
            raise ConfigError(f"path header is missing {key!r}")
    try:
        values = np.array([float(s) for s in lines[1:] if s.strip()])
        n = int(header["n"])
        seed = None if header["seed"] == "none" else int(header["seed"])
        return SamplePath(n, float(header["t_start"]), values, float(header["alpha"]), seed)
    except ValueError as exc:
        raise ConfigError(f"malformed path file: {exc}") from exc

