"""Tests for the limiting birth/growth process and its closed-form moments."""

import math
from fractions import Fraction

import numpy as np
import pytest

from regraph import words
from regraph.errors import InvalidInputError, ResourceLimitError
from regraph.limitproc import (
    chebyshev_fluctuation_series,
    counts_by_length,
    expected_alpha,
    limit_covariance,
    limit_model,
    nu_rate,
    ou_covariance,
    sample_yule,
    simulate_limit,
    trace_covariance,
    yule_pmf,
)
from regraph.words import count_reduced_words


def test_yule_pmf_known_values():
    # starting from 1 atom after time ln 2: P(still 1) = e^{-tau} * 1 = 1/2,
    # P(k) = e^{-tau}(1 - e^{-tau})^{k-1} is geometric
    tau = math.log(2)
    assert yule_pmf(1, 1, tau) == pytest.approx(0.5)
    assert yule_pmf(1, 2, tau) == pytest.approx(0.25)
    assert yule_pmf(1, 3, tau) == pytest.approx(0.125)
    assert yule_pmf(2, 1, tau) == 0.0


def test_yule_pmf_sums_to_one():
    total = sum(yule_pmf(2, k, 0.7) for k in range(2, 400))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_sample_yule_matches_pmf():
    rng = np.random.default_rng(0)
    tau = 0.5
    samples = sample_yule(1, tau, 200000, rng)
    for k in range(1, 5):
        p_hat = np.mean(samples == k)
        p = yule_pmf(1, k, tau)
        se = math.sqrt(p * (1 - p) / samples.size)
        assert abs(p_hat - p) < 4 * se + 1e-12


def test_expected_alpha_values():
    tau = math.log(2)
    # alpha_{jk} = P(one length-j atom at time s has length k at time t)
    assert expected_alpha(1, 1, 0.0, tau) == pytest.approx(0.5)
    assert expected_alpha(1, 3, 0.0, tau) == pytest.approx(0.125)
    assert expected_alpha(2, 1, 0.0, tau) == 0.0
    assert expected_alpha(1, 1, 0.0, 0.0) == pytest.approx(1.0)
    with pytest.raises(InvalidInputError):
        expected_alpha(1, 1, 1.0, 0.0)


def test_limit_covariance_values():
    tau = math.log(2)
    # Cov(N_j(s), N_k(t)) = (a(d,j)/2j) alpha_{jk}(t-s); d=2, j=1: a=4, mean 2
    assert limit_covariance(2, 1, 2, 0.0, tau) == pytest.approx(2 * 0.25)
    assert limit_covariance(2, 1, 1, 0.0, tau) == pytest.approx(1.0)
    assert limit_covariance(2, 2, 1, 0.0, tau) == 0.0
    # equal times: Cov(N_k, N_k) = Var = mean (Poisson)
    for d in (2, 3):
        for k in (1, 2, 3):
            assert limit_covariance(d, k, k, 1.0, 1.0) == pytest.approx(
                count_reduced_words(d, k) / (2 * k)
            )


def test_ou_covariance():
    tau = math.log(2)
    assert ou_covariance(2, 2, 0.0, tau) == pytest.approx(0.25)
    assert ou_covariance(2, 2, 1.0, 1.0) == pytest.approx(1.0)
    assert ou_covariance(1, 2, 0.0, tau) == 0.0


def test_nu_rate_values():
    # net immigration rate of new length-k atoms when d increases by one
    assert nu_rate(1, 1) == Fraction(1)
    assert nu_rate(1, 2) == Fraction(4)
    for d in (1, 2, 3):
        for k in (1, 2, 3, 4):
            assert nu_rate(d, k) > 0


def test_trace_covariance_exact_values():
    # Var of the Chebyshev trace statistic at finite d; tends to k/2
    assert trace_covariance(2, 2, 0.0) == pytest.approx(14 / 9)
    assert trace_covariance(4, 2, 0.0) == pytest.approx(60 / 49)
    assert trace_covariance(8, 2, 0.0) == pytest.approx(248 / 225)
    v2, v4, v8 = (trace_covariance(d, 2, 0.0) for d in (2, 4, 8))
    assert v2 > v4 > v8 > 1.0  # monotone toward the limit k/2 = 1


def test_limit_model_structure():
    model = limit_model(2, 4)
    # stationary means are 1/h per class and sum to a(d,k)/2k per length
    for k in range(1, 5):
        mask = model.lengths == k
        assert np.sum(model.stationary_means[mask]) == pytest.approx(
            count_reduced_words(2, k) / (2 * k)
        )
    # growth transitions map length-k classes to length-(k+1) classes
    for c, cls in enumerate(model.classes):
        for pos in range(cls.length):
            nxt = model.transitions[c, pos]
            if nxt >= 0:
                assert model.classes[nxt].length == cls.length + 1


def test_simulate_limit_stationary_means():
    rng = np.random.default_rng(1)
    counts, model = simulate_limit(
        2, 3, 1.0, [0.0, 0.5, 1.0], True, rng, replicas=40000
    )
    by_len = counts_by_length(counts, model)
    for ti in range(3):
        for k in (1, 2, 3):
            mean = count_reduced_words(2, k) / (2 * k)
            se = math.sqrt(mean / counts.shape[0])
            assert abs(by_len[:, ti, k - 1].mean() - mean) < 4 * se


def test_simulate_limit_lagged_covariance():
    rng = np.random.default_rng(2)
    tau = math.log(2)
    counts, model = simulate_limit(2, 2, tau, [0.0, tau], True, rng, replicas=60000)
    by_len = counts_by_length(counts, model)
    x = by_len[:, 0, 0] - by_len[:, 0, 0].mean()
    y = by_len[:, 1, 1] - by_len[:, 1, 1].mean()
    cov_hat = np.mean(x * y)
    se = np.std(x * y, ddof=1) / math.sqrt(x.size)
    assert abs(cov_hat - limit_covariance(2, 1, 2, 0.0, tau)) < 4 * se


def test_chebyshev_fluctuation_series_centering():
    rng = np.random.default_rng(3)
    counts, model = simulate_limit(2, 4, 0.5, [0.0, 0.5], True, rng, replicas=30000)
    by_len = counts_by_length(counts, model)
    series = chebyshev_fluctuation_series(by_len, 2, 2)
    assert series.shape == by_len.shape[:2]
    assert abs(series.mean()) < 4 * series.std() / math.sqrt(series.size)


def test_simulate_limit_validates_and_budgets():
    rng = np.random.default_rng(4)
    with pytest.raises(InvalidInputError):
        simulate_limit(2, 0, 1.0, [0.0], True, rng, replicas=10)
    with pytest.raises(InvalidInputError):
        simulate_limit(2, 2, 1.0, [2.0], True, rng, replicas=10)
    with pytest.raises(ResourceLimitError):
        simulate_limit(2, 3, 1.0, [0.0, 1.0], True, rng, replicas=10**6, budget=10)
