"""Closed-form statistics of the sample standard deviation under normal returns.

Special functions (log-gamma, chi-square law, normal quantile), the sample
standard deviation's distribution, the conditional tail expectation of the
sample standard deviation and the Basel multiplier arithmetic.

All ratios are dimensionless (per unit of true sigma); callers multiply by sigma.
"""

import math
import numbers
import sys
from dataclasses import dataclass

from scipy import optimize, special

# Incomplete gamma: relative accuracy of series / continued fraction terms
GAMMA_EPS = 1.0e-15
GAMMA_MAX_ITERATIONS = 100_000
# Smallest positive double the continued fraction may divide by
FPMIN = sys.float_info.min / sys.float_info.epsilon

SIDES = ('lower', 'upper')


class DomainError(ValueError):
    """Raised when an argument lies outside an operation's domain."""
    pass


def require_int(name, value, minimum):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise DomainError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise DomainError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def require_open_probability(name, p):
    if not (0.0 < p < 1.0):
        raise DomainError(f"{name} must lie in (0, 1), got {p!r}")
    return float(p)


@dataclass(frozen=True)
class TailSpec:
    """A conditional-tail query: n observations, tail mass alpha, which side.

    alpha is always the mass of the conditioning region, for both sides.
    """

    n: int
    alpha: float
    side: str = 'lower'

    def __post_init__(self):
        require_int('n', self.n, 2)
        if not (0.0 < self.alpha <= 1.0):
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha!r}")
        if self.side not in SIDES:
            raise DomainError(f"side must be one of {', '.join(SIDES)}, got {self.side!r}")


@dataclass(frozen=True)
class StdDevLaw:
    """Law of the sample standard deviation of n normal returns with true sigma."""

    n: int
    sigma: float = 1.0

    def __post_init__(self):
        require_int('n', self.n, 2)
        if not (self.sigma > 0.0) or math.isinf(self.sigma):
            raise DomainError(f"sigma must be positive and finite, got {self.sigma!r}")


# --- special functions -------------------------------------------------------

def log_gamma(x):
    """ln Gamma(x) for x > 0."""
    if not (x > 0.0):
        raise DomainError(f"log_gamma is defined for x > 0, got {x!r}")
    return float(special.gammaln(x))


def _gamma_series(a, x):
    """Lower regularized incomplete gamma P(a, x) by its power series (x < a + 1)."""
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(GAMMA_MAX_ITERATIONS):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * GAMMA_EPS:
            return total * math.exp(-x + a * math.log(x) - log_gamma(a))
    raise ArithmeticError(f"incomplete gamma series did not converge (a={a}, x={x})")


def _gamma_continued_fraction(a, x):
    """Upper regularized incomplete gamma Q(a, x) by modified Lentz (x >= a + 1)."""
    b = x + 1.0 - a
    c = 1.0 / FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, GAMMA_MAX_ITERATIONS + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < FPMIN:
            d = FPMIN
        c = b + an / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < GAMMA_EPS:
            return math.exp(-x + a * math.log(x) - log_gamma(a)) * h
    raise ArithmeticError(f"incomplete gamma continued fraction did not converge (a={a}, x={x})")


def regularized_gamma(a, x):
    """Return (P(a, x), Q(a, x)), the lower and upper regularized incomplete gamma.

    The smaller of the two is always computed directly so neither loses
    precision to cancellation.
    """
    if not (a > 0.0):
        raise DomainError(f"a must be positive, got {a!r}")
    if x <= 0.0:
        return 0.0, 1.0
    if math.isinf(x):
        return 1.0, 0.0
    if x < a + 1.0:
        p = min(1.0, _gamma_series(a, x))
        return p, 1.0 - p
    q = min(1.0, _gamma_continued_fraction(a, x))
    return 1.0 - q, q


def chi2_cdf(k, x):
    """P(chi2_k <= x)."""
    k = require_int('k', k, 1)
    return regularized_gamma(k / 2.0, x / 2.0)[0]


def chi2_sf(k, x):
    """P(chi2_k > x), computed without the 1 - cdf cancellation."""
    k = require_int('k', k, 1)
    return regularized_gamma(k / 2.0, x / 2.0)[1]


def chi2_pdf(k, x):
    k = require_int('k', k, 1)
    if x < 0.0:
        return 0.0
    half = k / 2.0
    if x == 0.0:
        if k == 1:
            return math.inf
        return 0.5 if k == 2 else 0.0
    return math.exp((half - 1.0) * math.log(x) - x / 2.0 - half * math.log(2.0) - log_gamma(half))


def normal_cdf(x):
    return float(special.ndtr(x))


def normal_pdf(x):
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def normal_quantile(p):
    """Inverse standard normal CDF."""
    p = require_open_probability('p', p)
    return float(special.ndtri(p))


def chi2_quantile(k, p):
    """x such that P(chi2_k <= x) = p.

    Wilson-Hilferty gives the starting point, the bracket is widened until it
    straddles p, then Brent's method closes it to machine precision.
    """
    k = require_int('k', k, 1)
    p = require_open_probability('p', p)

    z = normal_quantile(p)
    ratio = 2.0 / (9.0 * k)
    guess = k * (1.0 - ratio + z * math.sqrt(ratio)) ** 3
    if not (guess > 0.0):
        guess = k * 1e-3

    lo = hi = guess
    while chi2_cdf(k, lo) > p:
        lo /= 2.0
        if lo < FPMIN:
            return 0.0
    while chi2_cdf(k, hi) < p:
        hi *= 2.0
    if lo == hi:
        return lo

    return float(optimize.brentq(lambda x: chi2_cdf(k, x) - p, lo, hi,
                                 xtol=FPMIN, rtol=4 * sys.float_info.epsilon, maxiter=500))


# --- the sample standard deviation -------------------------------------------

def k_n(n):
    """Bias constant K_n = E[s_n] / sigma = Gamma(n/2) / (Gamma((n-1)/2) sqrt((n-1)/2))."""
    n = require_int('n', n, 2)
    half = (n - 1) / 2.0
    return math.exp(log_gamma(n / 2.0) - log_gamma(half) - 0.5 * math.log(half))


def expected_sample_std(law):
    return k_n(law.n) * law.sigma


def sample_std_cdf(law, x):
    """P(s_n <= x); (n-1) s_n^2 / sigma^2 is chi-square with n-1 degrees of freedom."""
    if x <= 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    dof = law.n - 1
    return chi2_cdf(dof, dof * x * x / (law.sigma * law.sigma))


def sample_std_pdf(law, x):
    """Density of s_n."""
    if x < 0.0:
        raise DomainError(f"sample_std_pdf is defined for x >= 0, got {x!r}")
    half = (law.n - 1) / 2.0
    log_const = (math.log(2.0) + half * math.log(half) - log_gamma(half)
                 - (law.n - 1) * math.log(law.sigma))
    if x == 0.0:
        return math.exp(log_const) if law.n == 2 else 0.0
    return math.exp(log_const + (law.n - 2) * math.log(x)
                    - (law.n - 1) * x * x / (2.0 * law.sigma * law.sigma))


def sample_std_quantile(law, p):
    """s_{n,p}: the number with P(s_n <= s_{n,p}) = p."""
    dof = law.n - 1
    return law.sigma * math.sqrt(chi2_quantile(dof, p) / dof)


def cond_tail_expectation(spec):
    """E[s_n | s_n in the alpha tail] / sigma.

    lower: K_n P(chi2_n <= chi2_{n-1,alpha}) / alpha
    upper: K_n P(chi2_n >= chi2_{n-1,1-alpha}) / alpha
    """
    kn = k_n(spec.n)
    if spec.alpha == 1.0:
        return kn
    if spec.side == 'lower':
        q = chi2_quantile(spec.n - 1, spec.alpha)
        return kn * chi2_cdf(spec.n, q) / spec.alpha
    q = chi2_quantile(spec.n - 1, 1.0 - spec.alpha)
    return kn * chi2_sf(spec.n, q) / spec.alpha


def tail_expectation_by_next_law(spec):
    """Same quantity through the intermediate identity of the proof.

    K_n (sigma / alpha) P(s_{n+1} <= sqrt((n-1)/n) s_{n,alpha}), sigma = 1.
    """
    law = StdDevLaw(spec.n)
    next_law = StdDevLaw(spec.n + 1)
    shrink = math.sqrt((spec.n - 1) / spec.n)
    kn = k_n(spec.n)
    if spec.alpha == 1.0:
        return kn
    if spec.side == 'lower':
        s_alpha = sample_std_quantile(law, spec.alpha)
        return kn * sample_std_cdf(next_law, shrink * s_alpha) / spec.alpha
    s_alpha = sample_std_quantile(law, 1.0 - spec.alpha)
    return kn * (1.0 - sample_std_cdf(next_law, shrink * s_alpha)) / spec.alpha


def tail_curve(n_values, alphas, side='lower'):
    """cond_tail_expectation over a grid of n, one column per alpha."""
    rows = []
    for n in n_values:
        row = {'n': int(n)}
        for alpha in alphas:
            row[f"alpha={alpha:g}"] = cond_tail_expectation(TailSpec(int(n), alpha, side))
        rows.append(row)
    return rows


# --- capital rule arithmetic -------------------------------------------------

def expected_tail_count(m, n, beta):
    """Expected number of m securities whose sample std falls below beta * sigma."""
    m = require_int('m', m, 1)
    n = require_int('n', n, 2)
    if not (beta > 0.0):
        raise DomainError(f"beta must be positive, got {beta!r}")
    return m * sample_std_cdf(StdDevLaw(n), beta)


def basel_multiplier(horizon_days, confidence, supervisory_factor):
    """Multiple of the daily std held as capital: sqrt(horizon) * z_confidence * factor."""
    horizon_days = require_int('horizon_days', horizon_days, 1)
    confidence = require_open_probability('confidence', confidence)
    if not (supervisory_factor > 0.0):
        raise DomainError(f"supervisory_factor must be positive, got {supervisory_factor!r}")
    return math.sqrt(horizon_days) * normal_quantile(confidence) * supervisory_factor
