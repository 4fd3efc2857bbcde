"""Acceptance criteria 1-10, each at its stated tolerance.

Every test records one PASS/FAIL line (see conftest). The Monte Carlo
criteria 7-9 run the experiment harness with fixed seeds.
"""

import math
import os
from dataclasses import replace

import numpy as np
import pytest
from scipy.special import gamma as G

from mfstable.config import ExperimentConfig
from mfstable.errors import EmptyNeighborhoodError, MfstableError
from mfstable.estim import EstimatorConfig, alpha_from_v, estimate_alpha, estimate_H, neighborhood
from mfstable.experiment import run_experiment, summarize
from mfstable.filters import binomial_filter, verify_moments
from mfstable.oracle import (
    KernelSpec,
    m_t0,
    m_t0_beta_closed,
    m_t0_beta_quadrature,
    sigma_kn,
    stable_moment_integral,
)
from mfstable.sim import HURST_PRESETS, HurstFunction, ModelSpec, replicate_seed, simulate
from mfstable.specfun import ExponentPair, c_beta, h, phi

WORKERS = os.cpu_count() or 1
PAIRS = [(-0.4, -0.2), (-0.45, -0.1), (-0.3, -0.25)]
# estimator settings shared by the Monte Carlo criteria
MC_EST = EstimatorConfig(t0=0.5, gamma=0.7, beta=-0.3, filter=binomial_filter(2))


def test_criterion_01_filter_identities(report):
    worst_zero, ok_last = 0.0, True
    for L in range(1, 7):
        f = binomial_filter(L)
        k = np.arange(f.K + 1, dtype=float)
        mom = [float(np.sum(k**q * np.array(f.coefficients))) for q in range(L + 2)]
        worst_zero = max(worst_zero, max(abs(m) for m in mom[:-1]))
        ok_last &= abs(mom[-1]) > 1e-10
        assert verify_moments(f).ok
    ok = worst_zero <= 1e-10 and ok_last
    report(1, ok, f"max |sum k^q a_k| (q <= L, L = 1..6) = {worst_zero:.1e}; top moment nonzero")
    assert ok


def test_criterion_02_special_functions(report):
    err_c = abs(c_beta(-0.5) - math.sqrt(2.0))
    err_phi = 0.0
    for b1, b2 in PAIRS:
        pair = ExponentPair.from_betas(b1, b2)
        for alpha in (0.3, 1.0, 1.7, 2.0):
            err_phi = max(err_phi, abs(phi(pair, float(h(pair, alpha))) - alpha))
    ok = err_c <= 1e-12 and err_phi <= 1e-9
    report(2, ok, f"|C_-1/2 - sqrt2| = {err_c:.1e}; max |phi(h(a)) - a| = {err_phi:.1e}")
    assert ok


def test_criterion_03_oracle_concordance(report):
    rel_m, rel_i = 0.0, 0.0
    for alpha in (0.5, 1.0, 1.5, 2.0):
        for beta in (-0.1, -0.25, -0.4):
            q = m_t0_beta_quadrature(alpha, beta, 1.0)
            c = m_t0_beta_closed(alpha, beta, 1.0)
            rel_m = max(rel_m, abs(q - c) / c)
            exact = 2.0 / alpha * G(-beta / alpha)
            rel_i = max(rel_i, abs(stable_moment_integral(alpha, beta) - exact) / exact)
    ok = rel_m < 1e-7 and rel_i <= 1e-8
    report(3, ok, f"max rel(quad, closed) = {rel_m:.1e}; max rel(integral, Gamma form) = {rel_i:.1e}")
    assert ok


def test_criterion_04_noise_free_alpha(report):
    worst = 0.0
    b1, b2 = MC_EST.beta1, MC_EST.beta2
    for alpha in (0.5, 1.0, 1.5, 2.0):
        for M in (0.5, 1.0, 3.0):
            v1 = m_t0_beta_closed(alpha, b1, M)
            v2 = m_t0_beta_closed(alpha, b2, M)
            worst = max(worst, abs(alpha_from_v(v1, v2, b1, b2) - alpha))
    ok = worst <= 1e-6
    report(4, ok, f"max |alpha_hat - alpha| from exact V = {worst:.1e}")
    assert ok


def test_criterion_05_exact_invariances(report):
    worst_H, worst_a = 0.0, 0.0
    for r in range(20):
        alpha = 2.0 if r % 2 == 0 else 1.5
        spec = ModelSpec(alpha, HURST_PRESETS["logistic"](), 2**12, seed=replicate_seed(505, r))
        p = simulate(spec)
        H0, a0 = estimate_H(p, MC_EST), estimate_alpha(p, MC_EST)
        for q in (p.scaled(3.7), p.shifted(1.0), p.shifted(-4.2)):
            worst_H = max(worst_H, abs(estimate_H(q, MC_EST) - H0))
            worst_a = max(worst_a, abs(estimate_alpha(q, MC_EST) - a0))
    ok = worst_H <= 1e-12 and worst_a <= 1e-12
    report(5, ok, f"20 paths, x3.7 and shifts +1, -4.2: max dH = {worst_H:.1e}, "
                  f"max dalpha = {worst_a:.1e} (tol 1e-12)")
    assert ok


def test_criterion_06_neighborhood_law(report):
    rng = np.random.default_rng(606)
    bad, tried = 0, 0
    while tried < 500:
        n = int(rng.integers(16, 2**16))
        gamma = float(rng.uniform(0.05, 0.95))
        t0 = float(rng.uniform(0.05, 0.95))
        K = int(rng.integers(1, 8))
        try:
            count = neighborhood(n, gamma, t0, K).count
        except EmptyNeighborhoodError:
            continue
        tried += 1
        base = math.floor(2 * n ** (1 - gamma) - K)
        bad += count not in (base, base + 1)
    ok = bad == 0
    report(6, ok, f"{bad} of 500 configurations outside {{floor(2n^(1-g)-K), +1}}")
    assert ok


def _mc(alpha, hurst, n_values, replicates, seed):
    model = ModelSpec(alpha, hurst, n_values[0], seed=seed)
    cfg = ExperimentConfig(model=model, estimator=MC_EST, n_values=list(n_values),
                           replicates=replicates, seed=seed, workers=WORKERS, timing=False)
    return run_experiment(cfg)


def _ok(recs):
    return [r for r in recs if not r.failed]


@pytest.mark.slow
def test_criterion_07_mbm_consistency(report):
    recs = _ok(_mc(2.0, HurstFunction.constant(0.5), [2**12], 100, 707))
    H = np.array([r.H_hat for r in recs])
    A = np.array([r.alpha_hat for r in recs])
    frac = float(np.mean(np.abs(H - 0.5) <= 0.05))
    mean_a = float(A.mean())
    recs_l = _ok(_mc(2.0, HURST_PRESETS["logistic"](), [2**12], 100, 717))
    HL = np.array([r.H_hat for r in recs_l])
    frac_l = float(np.mean(np.abs(HL - 0.6) <= 0.08))
    ok = (len(recs) == 100 and frac >= 0.90 and abs(mean_a - 2.0) <= 0.3
          and len(recs_l) == 100 and frac_l >= 0.85)
    report(7, ok, f"H=0.5: {frac:.0%} within 0.05 (need 90%), mean alpha_hat {mean_a:.3f} "
                  f"(need 2 +- 0.3), sd H_hat {H.std():.3f}; logistic H(t0)=0.6: "
                  f"{frac_l:.0%} within 0.08 (need 85%), sd H_hat {HL.std():.3f}")
    assert ok


@pytest.mark.slow
def test_criterion_08_lmsm_consistency(report):
    recs = _ok(_mc(1.5, HurstFunction.constant(0.7), [2**12], 100, 808))
    H = np.array([r.H_hat for r in recs])
    A = np.array([r.alpha_hat for r in recs])
    med_h = float(np.median(np.abs(H - 0.7)))
    med_a = float(np.median(A))
    ok = len(recs) == 100 and med_h <= 0.08 and 1.1 <= med_a <= 1.9
    report(8, ok, f"median |H_hat - 0.7| = {med_h:.3f} (need <= 0.08), "
                  f"median alpha_hat = {med_a:.3f} (need [1.1, 1.9])")
    assert ok


@pytest.mark.slow
def test_criterion_09_rate_trend(report):
    ns = [2**j for j in range(9, 14)]
    recs = _mc(2.0, HurstFunction.constant(0.5), ns, 50, 909)
    s = summarize(recs)
    rmse = [row["rmse_H"] for row in s["per_n"]]
    mono = all(b <= a for a, b in zip(rmse, rmse[1:]))
    ok = mono and s["slope_rmse_H"] < 0
    report(9, ok, "RMSE(H_hat) at n=2^9..2^13: " + ", ".join(f"{x:.3f}" for x in rmse)
           + f"; monotone {mono}; slope {s['slope_rmse_H']:.3f}; theoretical d_n slope "
             f"{s['slope_d_n']:.3f}")
    assert ok


def test_criterion_10_sigma_diagnostic(report):
    H = HURST_PRESETS["logistic"]()
    t0, gamma = 0.5, MC_EST.gamma
    f = MC_EST.filter
    spec = KernelSpec(2.0, float(H(t0)), f, H_function=H, normalized=True)
    M = m_t0(spec)
    gaps = []
    for j in range(8, 13):
        n = 2**j
        nb = neighborhood(n, gamma, t0, f.K)
        gaps.append(max(abs(sigma_kn(int(k), n, t0, spec, gamma) - M) for k in nb.indices))
    ok = all(b < a for a, b in zip(gaps, gaps[1:]))
    report(10, ok, "max_k |sigma_kn - M| at n=2^8..2^12: " + ", ".join(f"{g:.4f}" for g in gaps))
    assert ok
