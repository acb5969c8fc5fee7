"""Seeded simulation of security returns and of Basel I / Basel II risk measurements.

Every security draws from its own counter-based substream keyed by
(seed, stream, security index), so results never depend on how many
securities are simulated or on how the work is scheduled across threads.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
import pandas as pd
from scipy import stats

import config
from statfn import DomainError, require_int, expected_tail_count, normal_cdf, normal_pdf

logger = logging.getLogger(__name__)

MASK32 = (1 << 32) - 1
MASK64 = (1 << 64) - 1


class DegenerateStandardizationError(DomainError):
    """Raised when standardized values would divide by zero."""
    pass


@dataclass(frozen=True)
class FatTailParams:
    """Normal draws with the band (-epsilon, epsilon) replaced by a jump of +-jump."""

    epsilon: float = config.FAT_TAIL_EPSILON
    jump: float = config.FAT_TAIL_JUMP

    def __post_init__(self):
        if not (self.epsilon >= 0.0):
            raise DomainError(f"epsilon must be >= 0, got {self.epsilon!r}")
        if not (self.jump > 0.0):
            raise DomainError(f"jump must be positive, got {self.jump!r}")
        if self.jump < self.epsilon:
            raise DomainError(f"jump ({self.jump}) must be >= epsilon ({self.epsilon})")


@dataclass(frozen=True)
class SimConfig:
    """m securities with n returns each. distribution=None means normal returns.

    threads only changes scheduling, never results.
    """

    m: int
    n: int
    seed: int
    distribution: Optional[FatTailParams] = None
    sigma: float = 1.0
    stream: int = 0
    threads: int = 1

    def __post_init__(self):
        require_int('m', self.m, 1)
        require_int('n', self.n, 2)
        require_int('seed', self.seed, 0)
        require_int('stream', self.stream, 0)
        require_int('threads', self.threads, 1)
        if self.m - 1 > MASK32 or self.stream > MASK32:
            raise DomainError("m and stream must fit in 32 bits")
        if not (self.sigma > 0.0):
            raise DomainError(f"sigma must be positive, got {self.sigma!r}")

    @property
    def distribution_name(self):
        return 'normal' if self.distribution is None else 'fat'

    def describe(self):
        params = {'m': self.m, 'n': self.n, 'distribution': self.distribution_name, 'sigma': self.sigma}
        if self.distribution is not None:
            params.update(epsilon=self.distribution.epsilon, jump=self.distribution.jump)
        if self.stream:
            params['stream'] = self.stream
        return params


@dataclass(frozen=True)
class Histogram:
    bin_edges: tuple
    counts: tuple
    total: int

    def __post_init__(self):
        if len(self.bin_edges) != len(self.counts) + 1:
            raise DomainError("a histogram needs exactly one more edge than counts")
        if any(b <= a for a, b in zip(self.bin_edges, self.bin_edges[1:])):
            raise DomainError("histogram edges must be strictly increasing")
        if any(c < 0 for c in self.counts) or sum(self.counts) != self.total:
            raise DomainError("histogram counts must be nonnegative and sum to total")

    def rows(self):
        return [
            {'bin_left': left, 'bin_right': right, 'count': count}
            for left, right, count in zip(self.bin_edges, self.bin_edges[1:], self.counts)
        ]


@dataclass(frozen=True)
class MomentSummary:
    """mean, sample std (n-1 denominator) and unexcess kurtosis (normal = 3)."""

    mean: float
    std: float
    kurtosis: float


@dataclass
class ExperimentReport:
    name: str
    seed: int
    params: dict
    values: np.ndarray = field(repr=False)
    histogram: Histogram
    summary: MomentSummary

    @property
    def minimum(self):
        return float(np.min(self.values))

    def count_below(self, threshold):
        return int(np.count_nonzero(self.values <= threshold))

    def histogram_rows(self):
        return self.histogram.rows()

    def to_dict(self):
        return {
            'experiment': self.name,
            'seed': self.seed,
            'params': self.params,
            'summary': asdict(self.summary),
            'minimum': self.minimum,
            'total': self.histogram.total,
            'histogram': self.histogram_rows(),
        }


# --- random streams ----------------------------------------------------------

def substream(seed, stream, index):
    """Philox generator keyed by (seed, stream, index)."""
    key = (seed & MASK64) | ((((stream & MASK32) << 32) | (index & MASK32)) << 64)
    return np.random.Generator(np.random.Philox(key=key))


def apply_fat_tail(z, params):
    """Replace draws with |z| < epsilon by a jump of the same sign; an exact 0 maps to +jump."""
    z = np.asarray(z, dtype=float)
    jumps = np.where(z >= 0.0, params.jump, -params.jump)
    return np.where(np.abs(z) < params.epsilon, jumps, z)


def draw_fat_tail(params, rng):
    """One fat-tailed return from a generator exposing standard_normal()."""
    return float(apply_fat_tail(rng.standard_normal(), params))


def fat_tail_population_moments(params):
    """Exact mean, std and kurtosis of the jump-replacement law.

    With p = P(|Z| < eps) and the truncated normal moments
    E[Z^2; |Z| < eps] = p - 2 eps phi(eps) and
    E[Z^4; |Z| < eps] = 3 E[Z^2; |Z| < eps] - 2 eps^3 phi(eps).
    """
    eps, h = params.epsilon, params.jump
    p = 2.0 * normal_cdf(eps) - 1.0
    phi = normal_pdf(eps)
    band2 = p - 2.0 * eps * phi
    band4 = 3.0 * band2 - 2.0 * eps ** 3 * phi
    variance = 1.0 - band2 + p * h * h
    fourth = 3.0 - band4 + p * h ** 4
    return MomentSummary(mean=0.0, std=math.sqrt(variance), kurtosis=fourth / variance ** 2)


def simulate_returns(sim):
    """m x n return matrix; row i comes from substream (seed, stream, i)."""

    def row(index):
        z = substream(sim.seed, sim.stream, index).standard_normal(sim.n)
        if sim.distribution is not None:
            z = apply_fat_tail(z, sim.distribution)
        return sim.sigma * z

    if sim.threads > 1:
        with ThreadPoolExecutor(max_workers=sim.threads) as executor:
            rows = list(executor.map(row, range(sim.m)))
    else:
        rows = [row(i) for i in range(sim.m)]
    return np.vstack(rows)


# --- statistics --------------------------------------------------------------

def sample_std(returns):
    values = np.asarray(returns, dtype=float)
    if values.ndim != 1 or values.size < 2:
        raise DomainError(f"sample_std needs a vector of length >= 2, got shape {values.shape}")
    if np.ptp(values) == 0.0:
        return 0.0
    return float(np.std(values, ddof=1))


def sample_stds(matrix):
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[1] < 2:
        raise DomainError(f"sample_stds needs rows of length >= 2, got shape {matrix.shape}")
    stds = np.std(matrix, axis=1, ddof=1)
    # constant rows are exactly zero, not rounding noise
    stds[np.ptp(matrix, axis=1) == 0.0] = 0.0
    return stds


def moment_summary(values):
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        raise DomainError("moment_summary needs at least two values")
    std = sample_std(values)
    kurtosis = float(stats.kurtosis(values, fisher=False, bias=True)) if std > 0.0 else math.nan
    return MomentSummary(mean=float(np.mean(values)), std=std, kurtosis=kurtosis)


def make_histogram(values, bin_width=config.HISTOGRAM_BIN_WIDTH):
    """Fixed-width bins on the grid k * bin_width covering every value."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise DomainError("cannot build a histogram of no values")
    if not np.all(np.isfinite(values)):
        raise DomainError("histogram values must be finite")
    if not (bin_width > 0.0):
        raise DomainError(f"bin_width must be positive, got {bin_width!r}")

    lo = math.floor(values.min() / bin_width)
    if lo * bin_width > values.min():
        lo -= 1
    hi = math.floor(values.max() / bin_width) + 1
    if hi * bin_width <= values.max():
        hi += 1
    edges = np.arange(lo, hi + 1) * bin_width
    counts, _ = np.histogram(values, bins=edges)
    return Histogram(
        bin_edges=tuple(float(e) for e in edges),
        counts=tuple(int(c) for c in counts),
        total=int(values.size),
    )


def rolling_std_max(matrix, window):
    """Per row, the largest sample std over all contiguous windows (step 1)."""
    rolling = pd.DataFrame(np.asarray(matrix, dtype=float).T).rolling(window)
    stds = rolling.std(ddof=1).where(rolling.max() - rolling.min() > 0.0, 0.0)
    return stds.iloc[window - 1:].max(axis=0).to_numpy()


def basel2_risk(returns, yearly_window=config.TRADING_DAYS_PER_YEAR):
    """Whole-period sample std plus the highest rolling yearly sample std."""
    values = np.asarray(returns, dtype=float)
    require_int('yearly_window', yearly_window, 2)
    if values.ndim != 1 or values.size < yearly_window:
        raise DomainError(f"series of length {values.size} is shorter than the window {yearly_window}")
    return sample_std(values) + float(rolling_std_max(values[np.newaxis, :], yearly_window)[0])


def basel2_standardized(matrix, yearly_window=config.TRADING_DAYS_PER_YEAR):
    """Basel II sums of every row divided by their cross-sectional mean."""
    matrix = np.asarray(matrix, dtype=float)
    require_int('yearly_window', yearly_window, 2)
    if matrix.ndim != 2 or matrix.shape[1] < yearly_window:
        raise DomainError(f"need rows of length >= {yearly_window}, got shape {matrix.shape}")
    risks = sample_stds(matrix) + rolling_std_max(matrix, yearly_window)
    scale = float(np.mean(risks))
    if not (scale > 0.0):
        raise DegenerateStandardizationError(
            "every security has zero Basel II risk; standardized values are undefined")
    return risks / scale


# --- experiments -------------------------------------------------------------

def basel1_experiment(sim, bin_width=config.HISTOGRAM_BIN_WIDTH):
    """Sample stds standardized by the true std of the return law (Basel I risk)."""
    true_std = sim.sigma
    if sim.distribution is not None:
        true_std *= fat_tail_population_moments(sim.distribution).std
    logger.info("Basel I experiment: %s, seed %d", sim.describe(), sim.seed)
    ratios = sample_stds(simulate_returns(sim)) / true_std
    return ExperimentReport(
        name='stddev-hist',
        seed=sim.seed,
        params=sim.describe(),
        values=ratios,
        histogram=make_histogram(ratios, bin_width),
        summary=moment_summary(ratios) if sim.m > 1 else MomentSummary(float(ratios[0]), 0.0, math.nan),
    )


def basel2_experiment(sim, yearly_window=config.TRADING_DAYS_PER_YEAR,
                      bin_width=config.HISTOGRAM_BIN_WIDTH):
    """Basel II sums standardized by their cross-sectional mean."""
    if sim.n < yearly_window:
        raise DomainError(f"n ({sim.n}) must be >= yearly_window ({yearly_window})")
    logger.info("Basel II experiment: %s, window %d, seed %d", sim.describe(), yearly_window, sim.seed)
    values = basel2_standardized(simulate_returns(sim), yearly_window)
    params = dict(sim.describe(), yearly_window=yearly_window)
    return ExperimentReport(
        name='basel2-hist',
        seed=sim.seed,
        params=params,
        values=values,
        histogram=make_histogram(values, bin_width),
        summary=moment_summary(values) if sim.m > 1 else MomentSummary(float(values[0]), 0.0, math.nan),
    )


def fat_moments_experiment(params, draws=config.FAT_TAIL_DRAWS, seed=0, threads=1):
    """Simulated moments of the fat-tail law next to the exact ones."""
    sim = SimConfig(m=1, n=draws, seed=seed, distribution=params, threads=threads)
    simulated = moment_summary(simulate_returns(sim)[0])
    population = fat_tail_population_moments(params)
    return {
        'experiment': 'fat-moments',
        'seed': seed,
        'params': {'draws': draws, 'epsilon': params.epsilon, 'jump': params.jump},
        'simulated': asdict(simulated),
        'population': asdict(population),
    }


def tail_count_experiment(m=config.SECURITIES, n=config.MONTHLY_PERIODS,
                          beta=config.TAIL_COUNT_BETA, seed=0, threads=1):
    """How many of m normal securities show a sample std below beta * sigma."""
    sim = SimConfig(m=m, n=n, seed=seed, threads=threads)
    ratios = sample_stds(simulate_returns(sim))
    return {
        'experiment': 'tail-count',
        'seed': seed,
        'params': {'m': m, 'n': n, 'beta': beta},
        'count': int(np.count_nonzero(ratios < beta)),
        'expected': expected_tail_count(m, n, beta),
    }
