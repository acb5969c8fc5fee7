"""How banks respond to a capital rule computed from measured volatility.

Banks are modeled as pure exposure maximizers with linear positions and no
short sales: the whole capital budget goes into the security with the lowest
required capital per unit of exposure. This is our formalization of the
"maximum position they possibly can" argument, not a model taken from data.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

import config
from montecarlo import SimConfig, rolling_std_max, basel2_risk, sample_std, sample_stds, simulate_returns
from statfn import DomainError, require_int

logger = logging.getLogger(__name__)

KINDS = config.CAPITAL_RULES


class InsufficientHistoryError(DomainError):
    pass


class DegenerateAllocationError(DomainError):
    pass


@dataclass(frozen=True)
class CapitalRule:
    """basel1: c * sample std; basel2: c * (whole std + max rolling yearly std);
    market_value_100: one unit of capital per unit of exposure."""

    kind: str = 'basel1'
    c: float = config.BASEL_MULTIPLIER
    yearly_window: int = config.TRADING_DAYS_PER_YEAR

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"rule must be one of {', '.join(KINDS)}, got {self.kind!r}")
        if not (self.c > 0.0):
            raise DomainError(f"c must be positive, got {self.c!r}")
        require_int('yearly_window', self.yearly_window, 2)

    @property
    def min_history(self):
        if self.kind == 'basel2':
            return self.yearly_window
        return 2 if self.kind == 'basel1' else 0


@dataclass
class BankAllocation:
    rule: CapitalRule
    budget: float
    weights: np.ndarray
    capitals: np.ndarray = field(repr=False)
    chosen: int

    def __post_init__(self):
        if np.any(self.weights < 0.0):
            raise DomainError("allocation weights must be nonnegative")
        if self.required_total > self.budget + 1e-9:
            raise DomainError(f"allocation needs {self.required_total} capital, budget is {self.budget}")

    @property
    def required_total(self):
        return float(np.dot(self.weights, self.capitals))

    @property
    def exposure(self):
        return float(self.weights.sum())


@dataclass(frozen=True)
class ConcentrationReport:
    banks: int
    modal_security: int
    overlap: float
    herfindahl: float


@dataclass
class ResponseReport:
    params: dict
    chosen: list
    exposures: list
    excess_ratios: list
    concentration: ConcentrationReport

    @property
    def mean_excess_ratio(self):
        return float(np.mean(self.excess_ratios))

    def to_dict(self):
        return {
            'experiment': 'response',
            'params': self.params,
            'chosen': self.chosen,
            'exposures': self.exposures,
            'excess_ratios': self.excess_ratios,
            'mean_excess_ratio': self.mean_excess_ratio,
            'overlap': self.concentration.overlap,
            'herfindahl': self.concentration.herfindahl,
            'modal_security': self.concentration.modal_security,
        }


def required_capital(rule, history):
    """Capital per unit of exposure the rule demands for one security."""
    values = np.asarray(history, dtype=float)
    if rule.kind == 'market_value_100':
        return 1.0
    if values.ndim != 1 or values.size < rule.min_history:
        raise InsufficientHistoryError(
            f"{rule.kind} needs at least {rule.min_history} returns, got {values.size}")
    if rule.kind == 'basel1':
        return rule.c * sample_std(values)
    return rule.c * basel2_risk(values, rule.yearly_window)


def rule_capitals(rule, matrix):
    """required_capital for every row of a return matrix at once."""
    matrix = np.asarray(matrix, dtype=float)
    if rule.kind == 'market_value_100':
        return np.ones(matrix.shape[0])
    if matrix.shape[1] < rule.min_history:
        raise InsufficientHistoryError(
            f"{rule.kind} needs at least {rule.min_history} returns, got {matrix.shape[1]}")
    stds = sample_stds(matrix)
    if rule.kind == 'basel1':
        return rule.c * stds
    return rule.c * (stds + rolling_std_max(matrix, rule.yearly_window))


def allocate_capitals(rule, budget, capitals):
    """Whole budget into the cheapest security per unit of exposure (ties: lowest id)."""
    if not (budget > 0.0):
        raise DomainError(f"budget must be positive, got {budget!r}")
    capitals = np.asarray(capitals, dtype=float)
    positive = capitals > 0.0
    if not positive.any():
        raise DegenerateAllocationError("every security has zero required capital")
    if not positive.all():
        logger.warning("Rejected %d securities with zero required capital", int((~positive).sum()))
    chosen = int(np.argmin(np.where(positive, capitals, np.inf)))
    weights = np.zeros(capitals.size)
    weights[chosen] = budget / capitals[chosen]
    return BankAllocation(rule=rule, budget=float(budget), weights=weights, capitals=capitals, chosen=chosen)


def allocate(rule, budget, histories):
    capitals = np.array([required_capital(rule, h) for h in histories], dtype=float)
    return allocate_capitals(rule, budget, capitals)


def true_capital(rule, true_sigmas):
    """Capital per unit a correct measurement of sigma would require under the same rule form."""
    sigmas = np.asarray(true_sigmas, dtype=float)
    if rule.kind == 'basel1':
        return rule.c * sigmas
    if rule.kind == 'basel2':
        return 2.0 * rule.c * sigmas
    # market value charges every security alike; the yardstick is the least risky one
    return sigmas / sigmas.min()


def excess_risk_ratio(allocation, true_sigmas):
    """Capital the position truly calls for divided by the capital actually held.

    For one basel1 position this is sigma / s of the chosen security.
    """
    sigmas = np.asarray(true_sigmas, dtype=float)
    if sigmas.shape != allocation.weights.shape:
        raise DomainError(f"need {allocation.weights.size} true sigmas, got {sigmas.size}")
    if np.any(sigmas <= 0.0):
        raise DomainError("true sigmas must be positive")
    return float(np.dot(allocation.weights, true_capital(allocation.rule, sigmas)) / allocation.budget)


def concentration_report(allocations):
    """Overlap: share of banks holding the most popular security (ties: lowest id).
    Herfindahl: sum of squared shares of aggregate exposure."""
    allocations = list(allocations)
    if len(allocations) < 2:
        raise DomainError("concentration needs at least two banks")
    sizes = {a.weights.size for a in allocations}
    if len(sizes) != 1:
        raise DomainError("all banks must allocate over the same securities")

    chosen = np.array([a.chosen for a in allocations])
    counts = np.bincount(chosen, minlength=sizes.pop())
    modal = int(np.argmax(counts))
    aggregate = np.sum([a.weights for a in allocations], axis=0)
    shares = aggregate / aggregate.sum()
    return ConcentrationReport(
        banks=len(allocations),
        modal_security=modal,
        overlap=float(counts[modal] / len(allocations)),
        herfindahl=float(np.sum(shares ** 2)),
    )


def bank_experiment(m=config.SECURITIES, n=config.MONTHLY_PERIODS, banks=config.BANKS,
                    budget=config.BANK_BUDGET, rule=CapitalRule(), seed=0, shared=True,
                    true_sigma=1.0, threads=1):
    """Every bank allocates on simulated histories of m identical securities.

    shared=True: all banks see the same histories (the same public data).
    shared=False: bank b sees its own independent resample (stream b).
    """
    require_int('banks', banks, 2)
    sigmas = np.full(m, float(true_sigma))

    def capitals_for(stream):
        sim = SimConfig(m=m, n=n, seed=seed, sigma=true_sigma, stream=stream, threads=threads)
        return rule_capitals(rule, simulate_returns(sim))

    shared_capitals = capitals_for(0) if shared else None
    allocations = []
    for bank in range(banks):
        capitals = shared_capitals if shared else capitals_for(bank)
        allocations.append(allocate_capitals(rule, budget, capitals))

    concentration = concentration_report(allocations)
    logger.info("Response experiment seed %d: overlap %.3f, herfindahl %.3f",
                seed, concentration.overlap, concentration.herfindahl)
    return ResponseReport(
        params={'m': m, 'n': n, 'banks': banks, 'budget': budget, 'rule': rule.kind, 'c': rule.c,
                'yearly_window': rule.yearly_window, 'seed': seed, 'shared': shared, 'true_sigma': true_sigma},
        chosen=[a.chosen for a in allocations],
        exposures=[a.exposure for a in allocations],
        excess_ratios=[excess_risk_ratio(a, sigmas) for a in allocations],
        concentration=concentration,
    )
