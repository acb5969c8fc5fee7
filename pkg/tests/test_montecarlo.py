"""Tests for seeded return simulation and the Basel I/II experiments."""
import math

import numpy as np
import pytest
from scipy import stats

import montecarlo
import statfn
from montecarlo import DegenerateStandardizationError, FatTailParams, Histogram, SimConfig
from statfn import DomainError


class FixedDraw:
    """Generator stand-in returning one preset standard normal draw."""

    def __init__(self, z):
        self.z = z

    def standard_normal(self):
        return self.z


# --- configuration -----------------------------------------------------------

@pytest.mark.parametrize("kwargs", [
    dict(m=0, n=60, seed=1),
    dict(m=10, n=1, seed=1),
    dict(m=10, n=60, seed=-1),
    dict(m=10, n=60, seed=1, threads=0),
    dict(m=10, n=60, seed=1, sigma=0.0),
    dict(m=10, n=60, seed=True),
    dict(m=10.0, n=60, seed=1),
])
def test_sim_config_rejects_bad_values(kwargs):
    with pytest.raises(DomainError):
        SimConfig(**kwargs)


def test_fat_tail_params_validation():
    with pytest.raises(DomainError):
        FatTailParams(epsilon=-0.1)
    with pytest.raises(DomainError):
        FatTailParams(jump=0.0)
    with pytest.raises(DomainError):
        FatTailParams(epsilon=2.0, jump=1.0)


def test_describe_names_the_distribution():
    assert SimConfig(m=5, n=10, seed=1).describe() == {'m': 5, 'n': 10, 'distribution': 'normal', 'sigma': 1.0}
    fat = SimConfig(m=5, n=10, seed=1, distribution=FatTailParams()).describe()
    assert fat['distribution'] == 'fat'
    assert fat['epsilon'] == 0.01 and fat['jump'] == 10.0


# --- random streams ----------------------------------------------------------

def test_simulation_is_reproducible():
    sim = SimConfig(m=20, n=50, seed=42)
    assert np.array_equal(montecarlo.simulate_returns(sim), montecarlo.simulate_returns(sim))


def test_rows_do_not_depend_on_security_count():
    small = montecarlo.simulate_returns(SimConfig(m=3, n=40, seed=7))
    large = montecarlo.simulate_returns(SimConfig(m=50, n=40, seed=7))
    assert np.array_equal(small, large[:3])


def test_thread_count_never_changes_results():
    single = montecarlo.simulate_returns(SimConfig(m=64, n=100, seed=3, distribution=FatTailParams()))
    pooled = montecarlo.simulate_returns(SimConfig(m=64, n=100, seed=3, distribution=FatTailParams(), threads=4))
    assert np.array_equal(single, pooled)


def test_seeds_and_streams_are_independent():
    base = montecarlo.simulate_returns(SimConfig(m=2, n=100, seed=1))
    other_seed = montecarlo.simulate_returns(SimConfig(m=2, n=100, seed=2))
    other_stream = montecarlo.simulate_returns(SimConfig(m=2, n=100, seed=1, stream=1))
    assert not np.array_equal(base, other_seed)
    assert not np.array_equal(base, other_stream)
    assert not np.array_equal(base[0], base[1])


def test_sigma_scales_returns():
    unit = montecarlo.simulate_returns(SimConfig(m=4, n=30, seed=9))
    scaled = montecarlo.simulate_returns(SimConfig(m=4, n=30, seed=9, sigma=0.5))
    assert np.allclose(scaled, 0.5 * unit)


# --- fat-tail law ------------------------------------------------------------

def test_fat_tail_returns_never_fall_inside_the_band():
    returns = montecarlo.simulate_returns(SimConfig(m=20, n=5000, seed=2, distribution=FatTailParams()))
    assert np.all(np.abs(returns) >= 0.01)
    assert np.any(np.abs(returns) == 10.0)


def test_apply_fat_tail_replaces_the_band():
    params = FatTailParams(epsilon=0.01, jump=10.0)
    out = montecarlo.apply_fat_tail([0.005, -0.005, 0.0, 0.5, -2.0, 0.01], params)
    assert out.tolist() == [10.0, -10.0, 10.0, 0.5, -2.0, 0.01]


def test_draw_fat_tail_uses_one_normal_draw():
    params = FatTailParams()
    assert montecarlo.draw_fat_tail(params, FixedDraw(-0.003)) == -10.0
    assert montecarlo.draw_fat_tail(params, FixedDraw(1.25)) == 1.25


def test_population_moments_match_known_values():
    moments = montecarlo.fat_tail_population_moments(FatTailParams(0.01, 10.0))
    assert moments.mean == 0.0
    assert moments.std == pytest.approx(1.3409, abs=5e-4)
    assert moments.kurtosis == pytest.approx(25.6, abs=0.1)


def test_population_moments_without_jumps_are_normal():
    moments = montecarlo.fat_tail_population_moments(FatTailParams(0.0, 10.0))
    assert moments.std == pytest.approx(1.0)
    assert moments.kurtosis == pytest.approx(3.0)


def test_population_moments_match_numerical_integration():
    params = FatTailParams(epsilon=0.5, jump=3.0)
    p = stats.norm.cdf(0.5) - stats.norm.cdf(-0.5)
    outside2 = 1.0 - stats.norm.expect(lambda z: z ** 2, lb=-0.5, ub=0.5)
    outside4 = 3.0 - stats.norm.expect(lambda z: z ** 4, lb=-0.5, ub=0.5)
    variance = outside2 + p * 9.0
    moments = montecarlo.fat_tail_population_moments(params)
    assert moments.std == pytest.approx(math.sqrt(variance), rel=1e-8)
    assert moments.kurtosis == pytest.approx((outside4 + p * 81.0) / variance ** 2, rel=1e-8)


@pytest.mark.slow
def test_fat_moments_experiment_reproduces_the_simulated_moments():
    result = montecarlo.fat_moments_experiment(FatTailParams(0.01, 10.0), draws=1_000_000, seed=11)
    simulated, population = result['simulated'], result['population']
    assert 1.33 <= simulated['std'] <= 1.35
    assert 24.0 <= simulated['kurtosis'] <= 27.0
    assert abs(simulated['std'] - population['std']) < 3 * 0.0033
    assert result['params'] == {'draws': 1_000_000, 'epsilon': 0.01, 'jump': 10.0}


# --- statistics --------------------------------------------------------------

def test_sample_std_uses_n_minus_one():
    assert montecarlo.sample_std([1.0, 2.0, 3.0, 4.0]) == pytest.approx(np.std([1, 2, 3, 4], ddof=1))
    with pytest.raises(DomainError):
        montecarlo.sample_std([1.0])
    with pytest.raises(DomainError):
        montecarlo.sample_stds(np.zeros((3, 1)))


def test_constant_series_have_exactly_zero_std():
    flat = np.full(30, 0.1)
    assert montecarlo.sample_std(flat) == 0.0
    matrix = np.vstack([flat, np.random.default_rng(3).standard_normal(30)])
    stds = montecarlo.sample_stds(matrix)
    assert stds[0] == 0.0 and stds[1] > 0.0
    assert montecarlo.rolling_std_max(matrix, 10)[0] == 0.0


@pytest.mark.parametrize("beta", [0.8, 0.9, 1.0])
def test_fraction_of_normal_stds_below_beta_follows_chi_square(beta):
    m, n = 20000, 10
    stds = montecarlo.sample_stds(montecarlo.simulate_returns(SimConfig(m=m, n=n, seed=5)))
    p = statfn.chi2_cdf(n - 1, (n - 1) * beta * beta)
    assert p == pytest.approx(statfn.sample_std_cdf(statfn.StdDevLaw(n), beta))
    assert abs(np.mean(stds <= beta) - p) <= 3.0 * math.sqrt(p * (1.0 - p) / m)


def test_moment_summary_matches_scipy():
    values = np.random.default_rng(5).standard_t(5, size=5000)
    summary = montecarlo.moment_summary(values)
    assert summary.mean == pytest.approx(values.mean())
    assert summary.std == pytest.approx(values.std(ddof=1))
    assert summary.kurtosis == pytest.approx(stats.kurtosis(values, fisher=False))


def test_moment_summary_of_constant_values_has_no_kurtosis():
    summary = montecarlo.moment_summary([2.0, 2.0, 2.0])
    assert summary.std == 0.0
    assert math.isnan(summary.kurtosis)
    assert math.isnan(montecarlo.moment_summary(np.full(50, 0.1)).kurtosis)


def test_make_histogram_uses_the_fixed_grid():
    hist = montecarlo.make_histogram([0.0, 0.03, 0.04, -0.01], bin_width=0.025)
    assert hist.bin_edges == pytest.approx((-0.025, 0.0, 0.025, 0.05))
    assert hist.counts == (1, 1, 2)
    assert hist.total == 4


def test_make_histogram_validation():
    with pytest.raises(DomainError):
        montecarlo.make_histogram([], 0.025)
    with pytest.raises(DomainError):
        montecarlo.make_histogram([1.0, math.nan], 0.025)
    with pytest.raises(DomainError):
        montecarlo.make_histogram([1.0], 0.0)


def test_histogram_invariants():
    with pytest.raises(DomainError):
        Histogram(bin_edges=(0.0, 1.0), counts=(1, 2), total=3)
    with pytest.raises(DomainError):
        Histogram(bin_edges=(0.0, 1.0, 1.0), counts=(1, 2), total=3)
    with pytest.raises(DomainError):
        Histogram(bin_edges=(0.0, 1.0, 2.0), counts=(1, 2), total=4)
    rows = Histogram(bin_edges=(0.0, 1.0, 2.0), counts=(1, 2), total=3).rows()
    assert rows[1] == {'bin_left': 1.0, 'bin_right': 2.0, 'count': 2}


def test_rolling_std_max_matches_brute_force():
    matrix = np.random.default_rng(8).standard_normal((3, 40))
    expected = [max(np.std(row[i:i + 10], ddof=1) for i in range(31)) for row in matrix]
    assert montecarlo.rolling_std_max(matrix, 10) == pytest.approx(expected, rel=1e-10)


def test_basel2_risk_adds_whole_and_worst_yearly_std():
    returns = np.random.default_rng(9).standard_normal(30)
    worst = max(np.std(returns[i:i + 12], ddof=1) for i in range(19))
    assert montecarlo.basel2_risk(returns, 12) == pytest.approx(np.std(returns, ddof=1) + worst, rel=1e-10)
    with pytest.raises(DomainError):
        montecarlo.basel2_risk(returns[:5], 12)


def test_basel2_risk_of_a_calm_second_year():
    returns = np.concatenate([np.tile([1.0, -1.0], 126), np.zeros(252)])
    expected = math.sqrt(252 / 503) + math.sqrt(252 / 251)
    assert montecarlo.basel2_risk(returns, 252) == pytest.approx(expected, rel=1e-10)


def test_basel2_risk_over_a_single_window_doubles_the_std():
    returns = np.random.default_rng(11).standard_normal(24)
    assert montecarlo.basel2_risk(returns, 24) == pytest.approx(2.0 * montecarlo.sample_std(returns), rel=1e-10)


def test_basel2_risk_is_at_least_the_whole_period_std():
    rng = np.random.default_rng(12)
    for _ in range(20):
        returns = rng.standard_normal(60) * rng.uniform(0.1, 3.0)
        assert montecarlo.basel2_risk(returns, 12) >= montecarlo.sample_std(returns)
    assert montecarlo.basel2_risk(np.full(30, 0.1), 10) == 0.0


def test_basel2_standardized_centers_on_one():
    matrix = np.random.default_rng(10).standard_normal((50, 60))
    values = montecarlo.basel2_standardized(matrix, 20)
    assert values.mean() == pytest.approx(1.0)


def test_basel2_standardized_rejects_all_zero_risk():
    with pytest.raises(DegenerateStandardizationError):
        montecarlo.basel2_standardized(np.zeros((4, 30)), 10)
    with pytest.raises(DegenerateStandardizationError):
        montecarlo.basel2_standardized(np.full((4, 30), 0.1), 10)


# --- experiments -------------------------------------------------------------

def test_basel1_experiment_normal_ratios_center_on_k_n():
    report = montecarlo.basel1_experiment(SimConfig(m=2000, n=60, seed=4))
    assert report.name == 'stddev-hist'
    assert report.histogram.total == 2000
    assert report.summary.mean == pytest.approx(statfn.k_n(60), abs=0.01)
    assert report.count_below(report.minimum) >= 1


def test_basel1_experiment_report_document():
    report = montecarlo.basel1_experiment(SimConfig(m=10, n=60, seed=4, distribution=FatTailParams()))
    document = report.to_dict()
    assert document['experiment'] == 'stddev-hist'
    assert document['seed'] == 4
    assert document['params']['distribution'] == 'fat'
    assert document['total'] == 10
    assert sum(row['count'] for row in document['histogram']) == 10
    assert document['histogram'] == report.histogram_rows()


def test_single_security_experiment_has_no_spread():
    report = montecarlo.basel1_experiment(SimConfig(m=1, n=60, seed=4))
    assert report.summary.std == 0.0
    assert math.isnan(report.summary.kurtosis)


def test_basel2_experiment_needs_a_full_window():
    with pytest.raises(DomainError):
        montecarlo.basel2_experiment(SimConfig(m=10, n=100, seed=1), yearly_window=252)


def test_basel2_experiment_is_standardized():
    report = montecarlo.basel2_experiment(SimConfig(m=100, n=300, seed=1), yearly_window=100)
    assert report.name == 'basel2-hist'
    assert report.params['yearly_window'] == 100
    assert report.summary.mean == pytest.approx(1.0)


def test_single_security_basel2_value_is_exactly_one():
    report = montecarlo.basel2_experiment(SimConfig(m=1, n=300, seed=6), yearly_window=100)
    assert report.values.tolist() == [1.0]


def test_experiments_do_not_depend_on_sigma():
    for run in (montecarlo.basel1_experiment, lambda sim: montecarlo.basel2_experiment(sim, yearly_window=100)):
        unit = run(SimConfig(m=50, n=300, seed=3)).values
        scaled = run(SimConfig(m=50, n=300, seed=3, sigma=2.0)).values
        assert scaled == pytest.approx(unit, rel=1e-12)


@pytest.mark.slow
def test_fat_tails_make_some_securities_look_safe():
    basel1_hits, basel2_hits = 0, 0
    for seed in range(1, 11):
        sim = SimConfig(m=1000, n=1260, seed=seed, distribution=FatTailParams())
        basel1_hits += montecarlo.basel1_experiment(sim).minimum <= 0.85
        basel2_hits += montecarlo.basel2_experiment(sim).count_below(0.85) >= 1
    assert basel1_hits >= 8
    assert basel2_hits >= 8


@pytest.mark.slow
def test_tail_count_lies_in_the_poisson_band():
    expected = statfn.expected_tail_count(1000, 60, 0.8)
    lo, hi = stats.poisson.ppf(0.005, expected), stats.poisson.ppf(0.995, expected)
    inside = 0
    for seed in range(10):
        result = montecarlo.tail_count_experiment(1000, 60, 0.8, seed=seed)
        assert result['expected'] == expected
        inside += lo <= result['count'] <= hi
    assert inside >= 9
