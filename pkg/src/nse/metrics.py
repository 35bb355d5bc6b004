"""Plug-in estimates of FDR and power at the threshold chosen by a decision."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .decisions import NseDecision
from .errors import MismatchedInput
from .pi0 import Pi0Estimate
from .pvalues import PValueSet


@dataclass(frozen=True)
class DecisionMetrics:
    fdr_hat: float
    power_hat: float | None  # None when pi0_hat == 1 (no alternatives to detect)
    n_reject: int
    threshold: float | None
    pi0_used: float
    power_out_of_range: bool = False

    @property
    def expected_false_discoveries(self) -> float:
        return self.fdr_hat * self.n_reject


def estimate_metrics(ps: PValueSet, decision: NseDecision, pi0_hat: Pi0Estimate) -> DecisionMetrics:
    """FDR_m(x) = m pi0 x / N and pow_m(x) = (N - m pi0 x) / (m (1 - pi0)).

    x is the threshold p-value of ``decision``. With N = 0 both estimates
    are 0. Power outside [0, 1] is reported unclamped and flagged.
    """
    if decision.m != ps.m:
        raise MismatchedInput(f"decision was computed for m={decision.m}, p-value set has m={ps.m}")
    n = decision.n_reject
    p = pi0_hat.value
    if n == 0:
        return DecisionMetrics(0.0, None if p == 1.0 else 0.0, 0, None, p)
    x = decision.threshold_pvalue
    false_hat = ps.m * p * x
    fdr = false_hat / n
    if p == 1.0:
        return DecisionMetrics(fdr, None, n, x, p)
    power = (n - false_hat) / (ps.m * (1.0 - p))
    bad = not 0.0 <= power <= 1.0
    if bad:
        warnings.warn(f"estimated power {power:.4f} lies outside [0, 1]", RuntimeWarning, stacklevel=2)
    return DecisionMetrics(fdr, power, n, x, p, bad)
