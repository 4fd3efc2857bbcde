import math

import numpy as np
import pytest

from mfstable.errors import ConfigError, DegenerateDataError, DomainError, EmptyNeighborhoodError
from mfstable.estim import (
    EstimatorConfig,
    Neighborhood,
    alpha_from_v,
    estimate,
    estimate_alpha,
    estimate_H,
    h_from_v,
    neighborhood,
    rate_dn,
    rate_dn_gaussian,
    rate_dn_stable,
    v_stat,
    v_stat_detail,
    w_stat,
)
from mfstable.filters import binomial_filter
from mfstable.oracle import m_t0_beta_closed
from mfstable.sim import HurstFunction, ModelSpec, SamplePath, replicate_seed, simulate

INCR = binomial_filter(0)


def test_neighborhood_fixture():
    nb = neighborhood(100, 0.5, 0.5, 2)
    assert nb.count == 19
    assert nb.indices[0] == 40 and nb.indices[-1] == 58


def test_neighborhood_matches_enumeration():
    rng = np.random.default_rng(0)
    for _ in range(200):
        n = int(rng.integers(20, 3000))
        gamma = float(rng.uniform(0.05, 0.8))
        t0 = float(rng.uniform(0.2, 0.8))
        K = int(rng.integers(1, 5))
        try:
            nb = neighborhood(n, gamma, t0, K)
        except EmptyNeighborhoodError:
            continue
        r = n ** -gamma
        brute = [k for k in range(-n, 2 * n)
                 if all(abs((k + p) / n - t0) <= r for p in range(K + 1))]
        # brute force in floats may differ only at exact ties
        assert set(brute) ^ set(nb.indices.tolist()) <= {brute[0], brute[-1],
                                                         nb.indices[0], nb.indices[-1]}


def test_empty_neighborhood_is_config_error():
    with pytest.raises(EmptyNeighborhoodError) as exc:
        neighborhood(16, 0.99, 0.5, 3)
    assert isinstance(exc.value, ConfigError)
    assert "larger n" in str(exc.value)


def _nb(n, idx):
    idx = np.asarray(idx)
    return Neighborhood(n, idx, len(idx))


def test_v_stat_unit_variation():
    p = SamplePath(10, 0.0, [0.0, 1.0])
    for beta in (-0.1, -0.3, -0.49):
        assert v_stat(p, INCR, _nb(10, [0]), beta) == 1.0


def test_v_stat_two_variations():
    p = SamplePath(10, 0.0, [0.0, 1.0, 5.0])
    assert v_stat(p, INCR, _nb(10, [0, 1]), -0.5) == pytest.approx(0.75, abs=1e-15)


def test_v_stat_degenerate_and_guard():
    p = SamplePath(10, 0.0, np.full(12, 2.5))
    with pytest.raises(DegenerateDataError):
        v_stat(p, INCR, _nb(10, range(8)), -0.3)
    q = SamplePath(10, 0.0, [0.0, 0.0, 1.0])
    v, hits = v_stat_detail(q, INCR, _nb(10, [0, 1]), -0.25, zero_guard=1e-8)
    assert hits == 1
    assert v == pytest.approx(0.5 * (1e-8**-0.25 + 1.0))
    with pytest.raises(DegenerateDataError):
        v_stat_detail(q, INCR, _nb(10, [0, 1]), -0.25, zero_guard=0.0)
    with pytest.raises(DomainError):
        v_stat(q, INCR, _nb(10, [1]), -0.6)


def test_w_stat():
    assert w_stat(3.0, 100, -0.3, 0.0) == 3.0
    assert w_stat(2.0, 4, -0.5, 0.5) == pytest.approx(math.sqrt(2.0), abs=1e-15)
    with pytest.raises(DomainError):
        w_stat(0.0, 4, -0.5, 0.5)


def test_level_maps():
    assert h_from_v(1.7, 1.7, -0.3) == 0.0
    assert h_from_v(2 ** (-0.3 * 0.62), 1.0, -0.3) == pytest.approx(0.62, abs=1e-14)


@pytest.mark.parametrize("L", [0, 1, 2, 3])
def test_polynomial_path_has_degree_as_exponent(L):
    # Delta of t^(L+1) is constant and scales as n^-(L+1): H_hat = L + 1
    n = 512
    t = np.arange(n + 1) / n
    cfg = EstimatorConfig(gamma=0.4, filter=binomial_filter(L))
    H = estimate_H(SamplePath(n, 0.0, t ** (L + 1)), cfg)
    assert H == pytest.approx(L + 1, abs=1e-8)


def test_odd_n_rejected():
    p = SamplePath(101, 0.0, np.random.default_rng(0).standard_normal(102))
    with pytest.raises(ConfigError, match="odd"):
        estimate_H(p, EstimatorConfig(gamma=0.4))
    with pytest.raises(ConfigError, match="odd"):
        estimate(p, EstimatorConfig(gamma=0.4))


def test_alpha_from_v_zero_branch():
    assert alpha_from_v(1.0, 1.0, -0.4, -0.2) == 0.0


@pytest.mark.parametrize("alpha", [0.5, 1.5, 2.0])
@pytest.mark.parametrize("M", [0.5, 1.0, 3.0])
def test_alpha_fixed_point(alpha, M):
    v1 = m_t0_beta_closed(alpha, -0.4, M)
    v2 = m_t0_beta_closed(alpha, -0.2, M)
    assert alpha_from_v(v1, v2, -0.4, -0.2) == pytest.approx(alpha, abs=1e-6)


def test_config_validation():
    with pytest.raises(ConfigError):
        EstimatorConfig(gamma=1.0)
    with pytest.raises(ConfigError):
        EstimatorConfig(beta=-0.5)
    with pytest.raises(ConfigError):
        EstimatorConfig(beta1=-0.2, beta2=-0.4)
    with pytest.raises(ConfigError):
        EstimatorConfig(gamma=0.6).check_gamma(0.7)


@pytest.fixture(scope="module")
def paths():
    out = []
    for r in range(4):
        spec = ModelSpec(1.6, HurstFunction.logistic(0.5, 0.7, 0.5, 8.0), 1024,
                         seed=replicate_seed(3, r))
        out.append(simulate(spec))
    return out


def test_binary_scaling_invariance_is_exact(paths):
    # powers of two scale every sample without rounding
    cfg = EstimatorConfig(gamma=0.75)
    for p in paths:
        H, a = estimate_H(p, cfg), estimate_alpha(p, cfg)
        for c in (4.0, 2.0**-7):
            q = p.scaled(c)
            assert abs(estimate_H(q, cfg) - H) < 1e-12
            assert abs(estimate_alpha(q, cfg) - a) < 1e-12


def test_scale_and_shift_invariance_up_to_sample_rounding(paths):
    # 3.7 x and x + c round each sample; the alpha map amplifies that by 1/h'(alpha)
    cfg = EstimatorConfig(gamma=0.75)
    for p in paths:
        H, a = estimate_H(p, cfg), estimate_alpha(p, cfg)
        for q in (p.scaled(3.7), p.scaled(0.01), p.shifted(-4.2)):
            assert abs(estimate_H(q, cfg) - H) < 1e-10
            assert abs(estimate_alpha(q, cfg) - a) < 1e-9


def test_estimate_agrees_with_parts(paths):
    cfg = EstimatorConfig(gamma=0.75)
    p = paths[0]
    res = estimate(p, cfg, H_true=0.6, alpha_true=1.6)
    assert res.H_hat == estimate_H(p, cfg)
    assert res.alpha_hat == estimate_alpha(p, cfg)
    assert res.counts[1024] == neighborhood(1024, 0.75, 0.5, 3).count
    assert res.counts[512] == neighborhood(512, 0.75, 0.5, 3).count
    assert res.d_n_reported == rate_dn(1024, 1.6, 0.6, 0.75, 2)
    d = res.to_dict()
    assert set(d) == {"H_hat", "alpha_hat", "V_values", "counts", "d_n_reported", "guard_hits"}


def test_normalised_statistic_tracks_its_limit():
    # mean of W over replicates at constant H against the closed form
    n, beta = 4096, -0.3
    cfg = EstimatorConfig(gamma=0.3, beta=beta)
    nb = neighborhood(n, cfg.gamma, cfg.t0, cfg.filter.K)
    ws = []
    for r in range(8):
        p = simulate(ModelSpec(2.0, HurstFunction.constant(0.5), n, seed=replicate_seed(1, r)))
        ws.append(w_stat(v_stat(p, cfg.filter, nb, beta), n, beta, 0.5))
    # M for the order-2 filter at H = 1/2 under the unit normalisation
    from mfstable.oracle import KernelSpec, m_t0
    M = m_t0(KernelSpec(2.0, 0.5, cfg.filter, normalized=True))
    assert np.mean(ws) == pytest.approx(m_t0_beta_closed(2.0, beta, M), rel=0.02)


# --- rates -------------------------------------------------------------------

def test_gaussian_rate_branches():
    n = 4096
    assert rate_dn_gaussian(n, 0.5, 0.6) == pytest.approx(n**-0.1)
    assert rate_dn_gaussian(n, 0.5, 0.8) == pytest.approx(n**-0.1)
    H = 0.35
    g = (1 + 2 * H) / 3
    assert n ** (H - g) == pytest.approx(n ** ((g - 1) / 2))
    assert rate_dn_gaussian(n, H, g) == pytest.approx(n ** ((g - 1) / 2))
    with pytest.raises(DomainError):
        rate_dn_gaussian(n, 0.6, 0.6)


def test_stable_rate_branches():
    n = 4096
    assert rate_dn_stable(n, 1.0, 0.5, 0.6, 2) == pytest.approx(n**-0.025)
    assert rate_dn_stable(n, 1.0, 0.5, 0.9, 2) == pytest.approx(n**-0.05)
    # equality case H = L + 1 - 2/alpha
    alpha, L = 1.6, 1
    H = L + 1 - 2 / alpha
    g = 0.95
    assert g >= (L + 1) * alpha / (2 + alpha)
    assert rate_dn_stable(n, alpha, H, g, L) == pytest.approx(
        n ** ((g - 1) / 2) * math.sqrt(math.log(n)))
    g2 = 0.8
    assert g2 < (L + 1) * alpha / (2 + alpha)
    assert rate_dn_stable(n, alpha, H, g2, L) == pytest.approx(n ** (alpha * (H - g2) / 4))
    # H above the critical value
    alpha, L, H = 1.5, 1, 0.7
    assert H > L + 1 - 2 / alpha
    g = 0.9
    assert g >= (L + 1) / (L + 2 - H)
    assert rate_dn_stable(n, alpha, H, g, L) == pytest.approx(
        n ** (alpha * (1 - g) * (H - (L + 1)) / 4))
    g = 0.75
    assert rate_dn_stable(n, alpha, H, g, L) == pytest.approx(n ** (alpha * (H - g) / 4))


def test_stable_rate_domain():
    with pytest.raises(DomainError):
        rate_dn_stable(100, 2.0, 0.5, 0.7, 2)
    with pytest.raises(DomainError):
        rate_dn_stable(100, 1.0, 0.5, 0.7, 0)
    with pytest.raises(DomainError):
        rate_dn_stable(100, 1.0, 0.8, 0.7, 2)


def test_rates_decrease_with_n():
    for a in (0.8, 1.5, 2.0):
        r = [rate_dn(2**j, a, 0.5, 0.7, 2) for j in range(9, 14)]
        assert all(x > y for x, y in zip(r, r[1:]))
