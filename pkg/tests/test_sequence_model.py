from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.integrate import simpson

from invseq import (
    ModelSpec,
    Observation,
    TruthSpec,
    analytic_norm_sq,
    default_truncation,
    kappa,
    sandwich_constant,
    simulate,
    sobolev_norm_sq,
    synthesize_function,
    volterra_forward_check,
)
from invseq.errors import ConfigError, OutOfRangeError

VOLTERRA = ModelSpec.volterra()
FLAT = ModelSpec.exact_power(0.0)


def test_kappa_flat_model():
    assert kappa(FLAT, 7) == 1.0
    assert kappa(FLAT, 1) == 1.0


def test_kappa_volterra_first():
    assert math.isclose(kappa(VOLTERRA, 1), 2.0 / math.pi, rel_tol=1e-15)


def test_kappa_inverse_power():
    assert kappa(ModelSpec.exact_power(1.0), 4) == 0.25


def test_kappa_explicit_table_and_range():
    m = ModelSpec.explicit([1.0, 0.4, 0.35], p=0.5, C=2.0)
    assert kappa(m, 2) == 0.4
    with pytest.raises(OutOfRangeError):
        kappa(m, 4)
    with pytest.raises(OutOfRangeError):
        m.kappa_vector(10)


def test_explicit_table_validation():
    with pytest.raises(ConfigError):
        ModelSpec.explicit([1.0, -0.5], p=0.0, C=2.0)
    # kappa_2 = 10 breaks C^-1 i^-p <= kappa_i <= C i^-p at C = 1
    with pytest.raises(ConfigError):
        ModelSpec.explicit([1.0, 10.0], p=0.0, C=1.0)


def test_volterra_sandwich_order_one():
    """1/((i-1/2)pi) stays within a constant of 1/i, the declared order."""
    c = sandwich_constant(VOLTERRA, 100_000)
    assert 1.0 <= c <= math.pi


def test_model_round_trip():
    for m in (VOLTERRA, ModelSpec.exact_power(1.5),
              ModelSpec.explicit([0.9, 0.5, 0.3], p=0.5, C=3.0)):
        assert ModelSpec.from_dict(m.to_dict()) == m


def test_truth_coefficients():
    mu = TruthSpec.paper_example().coefficients(5)
    want = [i ** -1.5 * math.sin(i) for i in range(1, 6)]
    np.testing.assert_allclose(mu, want, rtol=1e-15)

    mu = TruthSpec.power_law(1.0, c=2.0).coefficients(4)
    np.testing.assert_allclose(mu, [2.0 * i ** -1.5 for i in range(1, 5)], rtol=1e-15)

    mu = TruthSpec.analytic_decay(0.5, c=1.0).coefficients(3)
    np.testing.assert_allclose(mu, [math.exp(-0.5 * i) for i in range(1, 4)], rtol=1e-15)

    assert not TruthSpec.zero().coefficients(6).any()

    mu = TruthSpec.explicit([1.0, -2.0]).coefficients(5)
    np.testing.assert_array_equal(mu, [1.0, -2.0, 0.0, 0.0, 0.0])


def test_truth_coefficients_finite():
    for truth in (TruthSpec.paper_example(), TruthSpec.power_law(0.25),
                  TruthSpec.analytic_decay(2.0)):
        assert np.all(np.isfinite(truth.coefficients(1000)))


def test_simulate_zero_truth_is_pure_noise():
    n, N, seed = 25.0, 64, 3
    obs = simulate(TruthSpec.zero(), VOLTERRA, n, N, seed)
    z = np.random.default_rng(seed).standard_normal(N)
    np.testing.assert_array_equal(obs.y, z / math.sqrt(n))


def test_simulate_deterministic():
    a = simulate(TruthSpec.paper_example(), VOLTERRA, 1e3, 50, 11)
    b = simulate(TruthSpec.paper_example(), VOLTERRA, 1e3, 50, 11)
    c = simulate(TruthSpec.paper_example(), VOLTERRA, 1e3, 50, 12)
    np.testing.assert_array_equal(a.y, b.y)
    assert not np.array_equal(a.y, c.y)


def test_simulate_replicate_mean_first_coordinate():
    """Mean of y_1 over many replicates recovers kappa_1 * mu_01."""
    n, N, reps = 1e3, 10_000, 10_000
    target = (2.0 / math.pi) * math.sin(1.0)
    vals = np.empty(reps)
    for r in range(reps):
        vals[r] = simulate(TruthSpec.paper_example(), VOLTERRA, n, N, 5000 + r).y[0]
    se = 1.0 / math.sqrt(n * reps)
    assert abs(vals.mean() - target) <= 3.0 * se


def test_simulate_noise_scale():
    n, N = 1e12, 10_000
    obs = simulate(TruthSpec.paper_example(), VOLTERRA, n, N, 21)
    mu = TruthSpec.paper_example().coefficients(N)
    resid = (obs.y - VOLTERRA.kappa_vector(N) * mu) * math.sqrt(n)
    assert abs(np.std(resid) - 1.0) < 0.05


def test_simulate_zero_truth_lln():
    n, N = 4.0, 2500
    obs = simulate(TruthSpec.zero(), FLAT, n, N, 0)
    assert abs(obs.y.mean()) <= 4.0 / math.sqrt(N * n)


def test_simulate_validation():
    with pytest.raises(ConfigError):
        simulate(TruthSpec.zero(), FLAT, 0.0, 5, 0)
    with pytest.raises(ConfigError):
        simulate(TruthSpec.zero(), FLAT, 10.0, 0, 0)


def test_sobolev_norm_values():
    assert sobolev_norm_sq(np.array([1.0, 0.0, 0.0]), 3.7) == 1.0
    assert math.isclose(sobolev_norm_sq(np.array([1.0, 0.5]), 1.0), 2.0, rel_tol=1e-15)


def test_sobolev_norm_against_direct_sum():
    mu = TruthSpec.power_law(1.0).coefficients(10_000)
    got = sobolev_norm_sq(mu, 0.9)
    want = math.fsum(i ** 1.8 * mu[i - 1] ** 2 for i in range(1, 10_001))
    assert math.isclose(got, want, rel_tol=1e-12)


def test_analytic_norm_values():
    assert math.isclose(analytic_norm_sq(np.array([1.0, 0.0]), 1.0),
                        math.e ** 2, rel_tol=1e-14)
    assert analytic_norm_sq(np.zeros(8), 0.3) == 0.0


def test_analytic_norm_geometric_series():
    # coefficients e^{-0.5 i} against the gamma = 0.4 weight leave e^{-0.2 i}
    mu = TruthSpec.analytic_decay(0.5, c=1.0).coefficients(100)
    q = math.exp(-0.2)
    want = q * (1.0 - q ** 100) / (1.0 - q)
    assert math.isclose(analytic_norm_sq(mu, 0.4), want, rel_tol=1e-12)


def test_synthesize_trivial():
    t = np.linspace(0.0, 1.0, 7)
    assert not synthesize_function(np.zeros(4), t).any()
    f0 = synthesize_function(np.array([1.0]), np.array([0.0]))
    assert math.isclose(f0[0], math.sqrt(2.0), rel_tol=1e-15)


def test_synthesize_small_against_plain_loop():
    mu = TruthSpec.paper_example().coefficients(50)
    t = np.linspace(0.0, 1.0, 16)
    got = synthesize_function(mu, t)
    for k, tk in enumerate(t):
        want = math.fsum(mu[i - 1] * math.sqrt(2.0) * math.cos((i - 0.5) * math.pi * tk)
                         for i in range(1, 51))
        assert math.isclose(got[k], want, rel_tol=0.0, abs_tol=1e-12)


def test_synthesize_large_against_matrix_oracle():
    mu = TruthSpec.paper_example().coefficients(10_000)
    t = np.linspace(0.0, 1.0, 512)
    got = synthesize_function(mu, t)
    i = np.arange(1, 10_001, dtype=float)
    basis = math.sqrt(2.0) * np.cos(np.outer((i - 0.5) * math.pi, t))
    want = basis.T @ mu
    np.testing.assert_allclose(got, want, rtol=0.0, atol=1e-10)


def test_parseval():
    """Coefficient energy equals the integrated squared synthesis."""
    mu = TruthSpec.paper_example().coefficients(64)
    t = np.linspace(0.0, 1.0, 2 ** 14 + 1)  # >= 16 N points
    f = synthesize_function(mu, t)
    lhs = float(np.sum(mu ** 2))
    rhs = float(simpson(f ** 2, x=t))
    assert math.isclose(lhs, rhs, rel_tol=1e-6)


def test_volterra_forward_trivial():
    assert volterra_forward_check(np.zeros(5), 0.3) == 0.0
    # e_1(1) = sqrt(2) cos(pi/2) = 0
    assert abs(volterra_forward_check(np.array([1.0]), 1.0)) < 1e-15
    got = volterra_forward_check(np.array([1.0]), 0.0)
    assert math.isclose(got, (2.0 / math.pi) * math.sqrt(2.0), rel_tol=1e-14)


def test_default_truncation():
    assert default_truncation(1000.0, 1.0) == 10
    assert default_truncation(1e6, 0.0) == 100_000  # capped
    assert default_truncation(1e8, 1.0) == 465
    with pytest.raises(ConfigError):
        default_truncation(0.0, 1.0)


def test_observation_json_round_trip():
    obs = simulate(TruthSpec.paper_example(), VOLTERRA, 1e3, 20, 9)
    back = Observation.from_json(obs.to_json())
    assert back.n == obs.n and back.N == obs.N and back.seed == obs.seed
    assert back.model == obs.model
    np.testing.assert_array_equal(back.y, obs.y)
