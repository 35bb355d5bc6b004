"""Decision rules controlling the number of gamma-significant effects.

Every rule computes a continuous lower bound

    raw = m F_m(gamma) - m gamma pi0 - deduction

and rejects the ``n_reject = min(max(0, floor(raw)), m F_m(gamma))`` nulls
with the smallest p-values.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from . import pi0 as pi0_mod
from .distributions import binomial_quantile, z_quantile
from .errors import DomainError, GammaExceedsLambda, MismatchedInput, NegativeVariance
from .pi0 import DEFAULT_LAMBDA, Pi0Estimate, Pi0Method
from .pvalues import PValueSet

__all__ = [
    "Method",
    "NseDecision",
    "z_quantile",
    "oracle_normal",
    "oracle_binomial",
    "sgof",
    "sgof_conservative",
    "plugin_naive",
    "updated_storey",
    "updated_dalmasso",
    "expected_storey",
    "expected_dalmasso",
    "rejection_set",
    "storey_variance",
    "storey_variance_simplified",
    "dalmasso_variance",
    "decide",
]


class Method(str, enum.Enum):
    ORACLE_NORMAL = "oracle_normal"
    ORACLE_BINOMIAL = "oracle_binomial"
    SGOF = "sgof"
    SGOF_CONSERVATIVE = "sgof_conservative"
    PLUGIN_STOREY = "plugin_storey"
    PLUGIN_DALMASSO = "plugin_dalmasso"
    UPDATED_STOREY = "updated_storey"
    UPDATED_DALMASSO = "updated_dalmasso"
    EXPECTED_STOREY = "expected_storey"
    EXPECTED_DALMASSO = "expected_dalmasso"

    @property
    def needs_true_pi0(self) -> bool:
        return self in (Method.ORACLE_NORMAL, Method.ORACLE_BINOMIAL)

    @classmethod
    def parse(cls, name: str) -> "Method":
        key = name.strip().lower().replace("-", "_")
        try:
            return cls(key)
        except ValueError:
            raise DomainError(f"unknown method {name!r}") from None


@dataclass(frozen=True)
class NseDecision:
    method: Method
    n_reject: int
    raw_bound: float
    threshold_pvalue: float | None
    gamma: float
    alpha: float
    variance_used: float
    pi0_used: float
    m: int
    n_significant: int


def _check_levels(gamma: float, alpha: float) -> None:
    if not 0.0 < gamma < 1.0:
        raise DomainError(f"gamma must lie in (0, 1), got {gamma!r}")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")


def _check_pi0(pi0: float) -> None:
    if not 0.0 <= pi0 <= 1.0:
        raise DomainError(f"pi0 must lie in [0, 1], got {pi0!r}")


def _finish(ps: PValueSet, method: Method, gamma: float, alpha: float, pi0: float,
            variance: float, raw: float, count: int) -> NseDecision:
    if raw <= 0.0 or math.isnan(raw):
        n = 0
    else:
        n = min(int(math.floor(raw)), count)
    threshold = ps.kth_smallest(n) if n >= 1 else None
    return NseDecision(method, n, raw, threshold, gamma, alpha, variance, pi0, ps.m, count)


def _normal_rule(ps: PValueSet, method: Method, gamma: float, alpha: float,
                 pi0: float, variance: float) -> NseDecision:
    count = ps.count_leq(gamma)
    raw = count - ps.m * gamma * pi0 - z_quantile(alpha) * math.sqrt(ps.m * variance)
    return _finish(ps, method, gamma, alpha, pi0, variance, raw, count)


def oracle_normal(ps: PValueSet, gamma: float, alpha: float, pi0: float) -> NseDecision:
    """The rule with known pi0 and binomial variance gamma pi0 (1 - gamma pi0)."""
    _check_levels(gamma, alpha)
    _check_pi0(pi0)
    q = gamma * pi0
    return _normal_rule(ps, Method.ORACLE_NORMAL, gamma, alpha, pi0, q * (1.0 - q))


def oracle_binomial(ps: PValueSet, gamma: float, alpha: float, pi0: float) -> NseDecision:
    """Finite-m version: subtracts the (1 - alpha)-quantile of Binomial(m, gamma pi0)."""
    _check_levels(gamma, alpha)
    _check_pi0(pi0)
    q = gamma * pi0
    count = ps.count_leq(gamma)
    raw = float(count - binomial_quantile(ps.m, q, alpha))
    return _finish(ps, Method.ORACLE_BINOMIAL, gamma, alpha, pi0, q * (1.0 - q), raw, count)


def sgof(ps: PValueSet, gamma: float, alpha: float) -> NseDecision:
    """Asymptotic SGoF: the oracle rule evaluated at pi0 = 1."""
    _check_levels(gamma, alpha)
    return _normal_rule(ps, Method.SGOF, gamma, alpha, 1.0, gamma * (1.0 - gamma))


def sgof_conservative(ps: PValueSet, gamma: float, alpha: float) -> NseDecision:
    """SGoF with the variance term F_m(gamma) (1 - F_m(gamma))."""
    _check_levels(gamma, alpha)
    f = ps.ecdf_at(gamma)
    return _normal_rule(ps, Method.SGOF_CONSERVATIVE, gamma, alpha, 1.0, f * (1.0 - f))


def plugin_naive(ps: PValueSet, gamma: float, alpha: float, pi0_hat: Pi0Estimate) -> NseDecision:
    """Oracle rule with pi0 replaced by an estimate, variance left unchanged."""
    _check_levels(gamma, alpha)
    method = Method.PLUGIN_DALMASSO if pi0_hat.method is Pi0Method.DALMASSO else Method.PLUGIN_STOREY
    p = pi0_hat.value
    q = gamma * p
    return _normal_rule(ps, method, gamma, alpha, p, q * (1.0 - q))


def storey_variance(gamma: float, lambda_: float, pi0_hat: float) -> float:
    """Plug-in variance for the Storey-based rule (squared-mean term dropped)."""
    ind = 1.0 if lambda_ < gamma else 0.0
    # factored by gamma * pi0_hat so that ind = 0 matches the simplified form exactly
    return gamma * pi0_hat * (1.0 + gamma / (1.0 - lambda_)
                              - 2.0 / (1.0 - lambda_) * ind * (gamma - lambda_))


def storey_variance_simplified(gamma: float, lambda_: float, pi0_hat: float) -> float:
    """Closed form of ``storey_variance`` valid when gamma <= lambda."""
    return gamma * pi0_hat * (1.0 + gamma / (1.0 - lambda_))


def dalmasso_variance(gamma: float, pi0_hat: float, log2_moment: float) -> float:
    """Plug-in variance for the Dalmasso-based rule."""
    return (gamma * pi0_hat
            + gamma * gamma * log2_moment
            - 2.0 * gamma * pi0_hat * ((1.0 - gamma) * math.log1p(-gamma) + gamma))


def _require_nonnegative(v: float, what: str) -> None:
    if v < 0.0 or math.isnan(v):
        raise NegativeVariance(f"{what} variance estimate is negative ({v!r})")


def updated_storey(ps: PValueSet, gamma: float, alpha: float,
                   lambda_: float = DEFAULT_LAMBDA) -> NseDecision:
    _check_levels(gamma, alpha)
    est = pi0_mod.storey(ps, lambda_)
    var = storey_variance(gamma, lambda_, est.value)
    return _normal_rule(ps, Method.UPDATED_STOREY, gamma, alpha, est.value, var)


def updated_dalmasso(ps: PValueSet, gamma: float, alpha: float) -> NseDecision:
    _check_levels(gamma, alpha)
    est = pi0_mod.dalmasso(ps)
    var = dalmasso_variance(gamma, est.value, ps.log_moment(2))
    _require_nonnegative(var, "Dalmasso")
    return _normal_rule(ps, Method.UPDATED_DALMASSO, gamma, alpha, est.value, var)


def expected_storey(ps: PValueSet, gamma: float, alpha: float,
                    lambda_: float = DEFAULT_LAMBDA) -> NseDecision:
    """Storey-based bound on the expected (not actual) number of effects.

    Uses the full variance of F_m(gamma) - gamma * pi0_hat with mu_T taken
    as 0. Requires gamma <= lambda.
    """
    _check_levels(gamma, alpha)
    if gamma > lambda_:
        raise GammaExceedsLambda(f"expected_storey requires gamma <= lambda ({gamma} > {lambda_})")
    est = pi0_mod.storey(ps, lambda_)
    f_g = ps.ecdf_at(gamma)
    f_l = ps.ecdf_at(lambda_)
    var = (f_g
           + gamma ** 2 / (1.0 - lambda_) ** 2 * (1.0 - f_l)
           - (f_g - gamma * est.value) ** 2)
    _require_nonnegative(var, "expected-number Storey")
    return _normal_rule(ps, Method.EXPECTED_STOREY, gamma, alpha, est.value, var)


def expected_dalmasso(ps: PValueSet, gamma: float, alpha: float) -> NseDecision:
    """Dalmasso analogue of ``expected_storey``.

    The integral of log(1 - x) over [0, gamma] is taken against the
    empirical distribution of the observed p-values.
    """
    _check_levels(gamma, alpha)
    est = pi0_mod.dalmasso(ps)
    f_g = ps.ecdf_at(gamma)
    var = (f_g
           + gamma ** 2 * ps.log_moment(2)
           + 2.0 * gamma * ps.log_sum_leq(gamma) / ps.m
           - (f_g - gamma * est.value) ** 2)
    _require_nonnegative(var, "expected-number Dalmasso")
    return _normal_rule(ps, Method.EXPECTED_DALMASSO, gamma, alpha, est.value, var)


def decide(ps: PValueSet, method: Method | str, gamma: float, alpha: float, *,
           pi0: float | None = None, lambda_: float = DEFAULT_LAMBDA) -> NseDecision:
    """Dispatch on ``method``. Oracle methods need the true ``pi0``."""
    method = Method.parse(method) if isinstance(method, str) else method
    if method is Method.ORACLE_NORMAL or method is Method.ORACLE_BINOMIAL:
        if pi0 is None:
            raise DomainError(f"{method.value} needs the true pi0")
        rule = oracle_normal if method is Method.ORACLE_NORMAL else oracle_binomial
        return rule(ps, gamma, alpha, pi0)
    if method is Method.SGOF:
        return sgof(ps, gamma, alpha)
    if method is Method.SGOF_CONSERVATIVE:
        return sgof_conservative(ps, gamma, alpha)
    if method is Method.PLUGIN_STOREY:
        return plugin_naive(ps, gamma, alpha, pi0_mod.storey(ps, lambda_))
    if method is Method.PLUGIN_DALMASSO:
        return plugin_naive(ps, gamma, alpha, pi0_mod.dalmasso(ps))
    if method is Method.UPDATED_STOREY:
        return updated_storey(ps, gamma, alpha, lambda_)
    if method is Method.UPDATED_DALMASSO:
        return updated_dalmasso(ps, gamma, alpha)
    if method is Method.EXPECTED_STOREY:
        return expected_storey(ps, gamma, alpha, lambda_)
    return expected_dalmasso(ps, gamma, alpha)


def rejection_set(ps: PValueSet, decision: NseDecision) -> list[int]:
    """Input positions of the ``n_reject`` smallest p-values (stable order)."""
    if decision.m != ps.m:
        raise MismatchedInput(f"decision was computed for m={decision.m}, p-value set has m={ps.m}")
    return ps.sorted_index[: decision.n_reject].tolist()
