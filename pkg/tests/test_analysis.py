import math

import numpy as np
import pytest

from isingperm import (
    DtOutOfRangeError,
    InvalidInputError,
    advantage_classify,
    advantage_domain_ratio,
    complex_overlap_count,
    convergence_dt_max,
    gaussian_norm_statistic,
    generate_terms,
    ProtocolConfig,
    q_ratio,
    resource_table,
    total_error_bound,
)


def test_total_bound_components_real():
    a = np.eye(3) * 0.1
    dt = 0.5 * convergence_dt_max(a)
    budget = total_error_bound(a, dt, eps_ht=0.01)
    n, h = 3, 0.3
    ht = 0.01 * (2.0 / dt) ** n / math.factorial(n)
    fd = (n * dt**2 / 24.0) * h ** (n + 2) / math.factorial(n)
    assert budget.ht_bound == pytest.approx(ht, rel=1e-12)
    assert budget.fd_bound == pytest.approx(fd, rel=1e-12)
    assert budget.total_bound == pytest.approx(ht + fd, rel=1e-12)
    eps_red = (0.01 + n / 6.0) / math.sqrt(2.0 * math.pi * n)
    assert budget.eps_reduced == pytest.approx(eps_red, rel=1e-12)
    simplified = eps_red * (2.0 * math.e / (n * dt)) ** n
    assert budget.simplified_bound == pytest.approx(simplified, rel=1e-12)


def test_simplified_dominates_exact_in_window():
    rng = np.random.default_rng(61)
    for _ in range(50):
        n = int(rng.integers(2, 7))
        a = rng.standard_normal((n, n))
        if rng.integers(2):
            a = a + 1j * rng.standard_normal((n, n))
        dt = rng.uniform(0.05, 1.0) * convergence_dt_max(a)
        budget = total_error_bound(a, dt, eps_ht=rng.uniform(0.0, 1.0))
        assert budget.simplified_bound >= budget.total_bound * (1.0 - 1e-9)


def test_complex_eps_reduced():
    a = np.eye(2) * (0.1 + 0.1j)
    budget = total_error_bound(a, 0.5, eps_ht=0.2)
    expected = (0.2 + 4.0 * 2 / 3.0) / math.sqrt(4.0 * math.pi)
    assert budget.eps_reduced == pytest.approx(expected, rel=1e-12)


def test_total_bound_rejects_bad_dt():
    a = np.eye(3)
    with pytest.raises(DtOutOfRangeError):
        total_error_bound(a, 10.0, eps_ht=0.1)
    with pytest.raises(DtOutOfRangeError):
        total_error_bound(a, -1.0, eps_ht=0.1)


def test_advantage_cases():
    # identity: ||H|| = N, ||A||_2 = 1, threshold N/e < N -> no advantage
    label, _ = advantage_classify(np.eye(8))
    assert label == "no_advantage"
    # scaled-down identity keeps the ratio but ||A||_2 <= 1 -> still no
    label, _ = advantage_classify(np.eye(8) / 64.0)
    assert label == "no_advantage"
    # single nonzero row: ||A||_2 = sqrt(N) ||H|| / N, ratio sqrt(N) > e at N=16
    n = 16
    a = np.zeros((n, n))
    a[0] = 1.0
    label, details = advantage_classify(a)
    assert details["ising_norm"] <= details["threshold"]
    assert label in ("case2", "case3")
    # scaled single row: ||A||_2 = 1 and ||H|| = sqrt(N) <= N/e at N = 16
    b = np.zeros((n, n))
    b[0] = 0.25
    label, _ = advantage_classify(b)
    assert label == "case1"


def test_q_ratio_thresholds():
    assert q_ratio(7) == 0.0
    assert q_ratio(8) > 0.0
    assert q_ratio(27) < 0.5
    assert q_ratio(28) > 0.5
    assert 0.0 <= q_ratio(1000) < 1.0


def test_advantage_domain_ratio_rows():
    rows = advantage_domain_ratio(2, 10)
    assert [n for n, _ in rows] == list(range(2, 11))
    assert all(q == q_ratio(n) for n, q in rows)
    with pytest.raises(InvalidInputError):
        advantage_domain_ratio(1, 5)
    with pytest.raises(InvalidInputError):
        advantage_domain_ratio(5, 4)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_complex_overlap_count_matches_generator(n):
    rng = np.random.default_rng(800 + n)
    a = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) * 0.01
    cfg = ProtocolConfig(dt=0.5 * convergence_dt_max(a))
    assert complex_overlap_count(n) == len(generate_terms(a, cfg))


def test_resource_table_columns():
    rep = resource_table(4)
    assert rep.qubits == 9
    assert rep.overlaps == 2
    assert rep.cnots_formula == 4 * 16 + 8
    assert rep.depth_formula == 9 * 16 + 1
    assert rep.cnots_measured == 4 * 16
    assert rep.discrepancy_note
    rep_c = resource_table(4, is_complex=True)
    assert rep_c.overlaps == complex_overlap_count(4)
    assert "N^3" in rep_c.total_samples_order


def test_gaussian_norm_statistic():
    stats = gaussian_norm_statistic(10, trials=5000, seed=3)
    assert stats.predicted == pytest.approx(math.sqrt(2.0 / math.pi) * 100)
    assert stats.relative_deviation < 0.02
    assert stats.min_k == 2  # smallest k with 5^{k-1} > 2e sqrt(2/pi) ~ 4.34
    assert math.isinf(gaussian_norm_statistic(2, trials=100, seed=0).min_k)
    with pytest.raises(InvalidInputError):
        gaussian_norm_statistic(5, trials=10, seed=0)
