"""Closed-form quantities for the two-sided Gaussian mean model.

Alternative p-values are p = 2 Phi(-|Z|) with Z ~ N(sqrt(n) mu, 1). The
functions here give their cdf, the mean and standard deviation of the
centred statistic F_m^0(gamma) - gamma * pi0_hat for the Storey and
Dalmasso estimators, individual power, and the SGoF calibration constants.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from scipy import integrate

from .distributions import norm_cdf, z_quantile
from .errors import DomainError, QuadratureFailure
from .pi0 import DEFAULT_LAMBDA, Pi0Method

QUAD_RTOL = 1e-8
# the integrals against log(1 - x) are split here; the remainder is done analytically
TAIL_SPLIT = 1e-6


@dataclass(frozen=True)
class GaussianScenario:
    mu: float
    n: int = 5
    pi0: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"n must be >= 1, got {self.n}")
        if not 0.0 <= self.pi0 <= 1.0:
            raise DomainError(f"pi0 must lie in [0, 1], got {self.pi0!r}")

    @property
    def shift(self) -> float:
        return math.sqrt(self.n) * self.mu


@dataclass(frozen=True)
class TheoryValues:
    mu_t: float
    sigma_t: float
    estimator: Pi0Method
    gamma: float
    lambda_: float | None = None


def f1_cdf(sc: GaussianScenario, x: float) -> float:
    """P(p <= x) for an alternative p-value."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x must lie in [0, 1], got {x!r}")
    if sc.mu == 0.0:
        return x
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    c = z_quantile(x / 2.0)
    d = sc.shift
    return norm_cdf(-c + d) + norm_cdf(-c - d)


def f1_density(sc: GaussianScenario, x: float) -> float:
    """Density of an alternative p-value, exp(-d^2/2) cosh(c d) with c = z_{x/2}."""
    d = sc.shift
    if x >= 1.0:
        return math.exp(-0.5 * d * d)
    c = z_quantile(x / 2.0)
    return 0.5 * (math.exp(c * d - 0.5 * d * d) + math.exp(-c * d - 0.5 * d * d))


def mixture_cdf(sc: GaussianScenario, x: float) -> float:
    return sc.pi0 * x + (1.0 - sc.pi0) * f1_cdf(sc, x)


def individual_power(sc: GaussianScenario, gamma: float) -> float:
    return f1_cdf(sc, gamma)


def _quad(fn, a: float, b: float) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(fn, a, b, epsabs=0.0, epsrel=QUAD_RTOL, limit=500)
    if not math.isfinite(val) or err > max(QUAD_RTOL * abs(val), 1e-14):
        raise QuadratureFailure(f"quadrature on [{a}, {b}] reached error {err:.3g} for value {val:.6g}")
    return val


def _log_tail_integral(h: float, power: int) -> float:
    # integral of log(1-x)**power over [1-h, 1]
    lh = math.log(h)
    if power == 1:
        return h * lh - h
    return h * (lh * lh - 2.0 * lh + 2.0)


def f1_log_integral(sc: GaussianScenario, power: int) -> float:
    """Integral of log(1 - x)**power dF1(x) over [0, 1]."""
    if power not in (1, 2):
        raise DomainError(f"power must be 1 or 2, got {power!r}")
    if sc.mu == 0.0:
        return -1.0 if power == 1 else 2.0
    cut = 1.0 - TAIL_SPLIT
    body = _quad(lambda x: math.log1p(-x) ** power * f1_density(sc, x), 0.0, cut)
    # density is flat near x = 1; use its midpoint value over the tail
    tail = f1_density(sc, 1.0 - 0.5 * TAIL_SPLIT) * _log_tail_integral(TAIL_SPLIT, power)
    return body + tail


def mixture_log_integral(sc: GaussianScenario, power: int) -> float:
    """Integral of log(1 - x)**power dF(x) for the null/alternative mixture."""
    uniform = -1.0 if power == 1 else 2.0
    if sc.pi0 == 1.0:
        return uniform
    return sc.pi0 * uniform + (1.0 - sc.pi0) * f1_log_integral(sc, power)


def _check_unit_open(v: float, name: str) -> None:
    if not 0.0 < v < 1.0:
        raise DomainError(f"{name} must lie in (0, 1), got {v!r}")


def mu_sigma_storey(sc: GaussianScenario, gamma: float,
                    lambda_: float = DEFAULT_LAMBDA) -> TheoryValues:
    _check_unit_open(gamma, "gamma")
    _check_unit_open(lambda_, "lambda")
    f1_lam = f1_cdf(sc, lambda_)
    mu_t = -gamma * (1.0 - sc.pi0) * (1.0 - f1_lam) / (1.0 - lambda_)
    f_lam = sc.pi0 * lambda_ + (1.0 - sc.pi0) * f1_lam
    ind = 1.0 if lambda_ < gamma else 0.0
    second = (gamma * sc.pi0
              + gamma ** 2 / (1.0 - lambda_) ** 2 * (1.0 - f_lam)
              - 2.0 * gamma / (1.0 - lambda_) * ind * (gamma - lambda_) * sc.pi0)
    return TheoryValues(mu_t, math.sqrt(second - mu_t ** 2), Pi0Method.STOREY, gamma, lambda_)


def storey_true_variance(sc: GaussianScenario, gamma: float, lambda_: float = DEFAULT_LAMBDA) -> float:
    return mu_sigma_storey(sc, gamma, lambda_).sigma_t ** 2


def mu_sigma_dalmasso(sc: GaussianScenario, gamma: float) -> TheoryValues:
    _check_unit_open(gamma, "gamma")
    l1 = mixture_log_integral(sc, 1)
    l2 = mixture_log_integral(sc, 2)
    mu_t = gamma * sc.pi0 + gamma * l1
    if sc.pi0 == 1.0:
        mu_t = 0.0
    # integral of log(1-x) over [0, gamma] is -(1-gamma) log(1-gamma) - gamma
    second = (gamma * sc.pi0
              + gamma ** 2 * l2
              - 2.0 * gamma * sc.pi0 * ((1.0 - gamma) * math.log1p(-gamma) + gamma))
    return TheoryValues(mu_t, math.sqrt(second - mu_t ** 2), Pi0Method.DALMASSO, gamma)


def dalmasso_true_variance(sc: GaussianScenario, gamma: float) -> float:
    return mu_sigma_dalmasso(sc, gamma).sigma_t ** 2


def remark2_constants(gamma: float, pi0: float) -> tuple[float, float]:
    """Variance-miscalibration and bias constants (c1, c2) of SGoF relative to NSE control.

    c1 = sqrt(gamma (1 - gamma) / (gamma pi0 (1 - gamma pi0)))
    c2 = gamma (1 - pi0) / sqrt(gamma pi0 (1 - gamma pi0))
    """
    _check_unit_open(gamma, "gamma")
    if not 0.0 < pi0 <= 1.0:
        raise DomainError(f"pi0 must lie in (0, 1], got {pi0!r}")
    v = gamma * pi0 * (1.0 - gamma * pi0)
    if v <= 0.0:
        raise DomainError("gamma * pi0 must be < 1")
    return math.sqrt(gamma * (1.0 - gamma) / v), gamma * (1.0 - pi0) / math.sqrt(v)
