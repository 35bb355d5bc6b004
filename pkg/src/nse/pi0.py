"""Estimators of the proportion of true null hypotheses."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import DomainError
from .pvalues import PValueSet

DEFAULT_LAMBDA = 0.5


class Pi0Method(str, enum.Enum):
    STOREY = "storey"
    DALMASSO = "dalmasso"
    FIXED = "fixed"


@dataclass(frozen=True)
class Pi0Estimate:
    """Estimated pi0. ``value`` is truncated at 1; ``raw`` keeps the untruncated number."""

    value: float
    method: Pi0Method
    lambda_: float | None = None
    truncated: bool = False
    raw: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise DomainError(f"pi0 must lie in [0, 1], got {self.value!r}")


def storey(ps: PValueSet, lambda_: float = DEFAULT_LAMBDA) -> Pi0Estimate:
    """Storey's estimator (1 - F_m(lambda)) / (1 - lambda)."""
    if not 0.0 < lambda_ < 1.0:
        raise DomainError(f"lambda must lie in (0, 1), got {lambda_!r}")
    n_above = ps.m - ps.count_leq(lambda_)
    raw = n_above / (ps.m * (1.0 - lambda_))
    return Pi0Estimate(min(raw, 1.0), Pi0Method.STOREY, lambda_, raw > 1.0, raw)


def dalmasso(ps: PValueSet) -> Pi0Estimate:
    """Dalmasso's estimator -mean(log(1 - p))."""
    raw = -ps.log_moment(1)
    # -0.0 when every p is 0
    raw = abs(raw) if raw == 0.0 else raw
    return Pi0Estimate(min(raw, 1.0), Pi0Method.DALMASSO, None, raw > 1.0, raw)


def fixed(value: float) -> Pi0Estimate:
    """A user supplied pi0 (the true value in simulations, or 1)."""
    return Pi0Estimate(float(value), Pi0Method.FIXED, None, False, float(value))
