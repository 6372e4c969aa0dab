"""Percentile convention, relative gains, CDF round trip."""

import numpy as np
import pytest

from relaysim.errors import UndefinedGainError
from relaysim.metrics import (ThroughputDistribution, cdf_points, gain,
                              percentile, percentile_stderr, quantiles)


def dist(samples, label="d"):
    return ThroughputDistribution.from_samples(samples, label)


def test_percentile_interpolation_rule():
    # rank 0.05 * 99 = 4.95 between the 5th and 6th order statistics
    assert percentile(dist(np.arange(1, 101)), 0.05) == pytest.approx(5.95)


def test_percentile_constant_distribution():
    for q in (0.05, 0.5, 0.95):
        assert percentile(dist(np.full(40, 3.25)), q) == 3.25


def test_percentile_midpoint_of_two():
    assert percentile(dist([1.0, 3.0]), 0.5) == 2.0


def test_percentile_rejects_tiny_or_bad_input():
    with pytest.raises(ValueError):
        percentile(dist([1.0]), 0.5)
    with pytest.raises(ValueError):
        percentile(dist([1.0, 2.0]), 0.0)
    with pytest.raises(ValueError):
        percentile(dist([1.0, 2.0]), 1.0)


def test_percentile_monotone_in_q():
    rng = np.random.default_rng(0)
    d = dist(rng.exponential(size=500))
    qs = np.linspace(0.01, 0.99, 60)
    vals = [percentile(d, q) for q in qs]
    assert np.all(np.diff(vals) >= 0)


def test_percentile_scale_equivariance():
    rng = np.random.default_rng(1)
    x = rng.uniform(0.1, 5.0, size=300)
    for q in (0.05, 0.5, 0.9):
        assert percentile(dist(3.0 * x), q) == pytest.approx(
            3.0 * percentile(dist(x), q), rel=1e-12)


def test_gain_identity_is_zero():
    d = dist(np.arange(1.0, 50.0))
    assert gain(d, d, 0.05) == 0.0


def test_gain_example_264_percent():
    ref = dist(np.full(100, 1.0e6))
    cand = dist(np.full(100, 3.64e6))
    assert gain(ref, cand, 0.05) == pytest.approx(264.0)


def test_gain_samplewise_doubling_is_100_percent():
    rng = np.random.default_rng(2)
    x = rng.uniform(0.5, 4.0, size=200)
    for q in (0.05, 0.3, 0.5, 0.9):
        assert gain(dist(x), dist(2.0 * x), q) == pytest.approx(100.0)


def test_gain_invariant_to_common_rescaling():
    rng = np.random.default_rng(3)
    a = rng.uniform(0.5, 2.0, 150)
    b = rng.uniform(0.5, 3.0, 150)
    g1 = gain(dist(a), dist(b), 0.05)
    g2 = gain(dist(7.0 * a), dist(7.0 * b), 0.05)
    assert g2 == pytest.approx(g1, rel=1e-12)


def test_gain_undefined_when_reference_percentile_zero():
    ref = dist(np.concatenate([np.zeros(20), np.ones(80)]))
    cand = dist(np.ones(100))
    with pytest.raises(UndefinedGainError):
        gain(ref, cand, 0.05)


def test_cdf_round_trip():
    rng = np.random.default_rng(4)
    d = dist(np.sort(rng.uniform(1.0, 9.0, size=120)))
    values, fracs = cdf_points(d)
    assert np.all(np.diff(values) >= 0)
    for q in (0.05, 0.25, 0.5, 0.95):
        v = percentile(d, q)
        back = np.interp(v, values, fracs)
        assert back == pytest.approx(q, abs=1.0 / (d.n - 1))


def test_quantiles_matches_numpy_linear():
    rng = np.random.default_rng(5)
    x = rng.normal(size=777)
    qs = (0.05, 0.5, 0.77)
    np.testing.assert_allclose(quantiles(x, qs),
                               np.quantile(x, qs, method="linear"),
                               rtol=1e-13)


def test_percentile_stderr_diagnostic():
    rng = np.random.default_rng(6)
    drops = [rng.exponential(size=100) for _ in range(10)]
    se = percentile_stderr(drops, 0.5)
    assert np.isfinite(se) and se > 0.0
