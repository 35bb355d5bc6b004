"""Benjamini-Hochberg style FDR baselines."""

from __future__ import annotations

import numpy as np

from .errors import DomainError
from .pi0 import Pi0Estimate
from .pvalues import PValueSet


def _step_up(ps: PValueSet, alpha: float, m_eff: float) -> int:
    k = np.arange(1, ps.m + 1)
    ok = np.nonzero(ps.sorted_values <= k * alpha / m_eff)[0]
    return int(ok[-1] + 1) if ok.size else 0


def bh(ps: PValueSet, alpha: float) -> int:
    """Number of rejections of the Benjamini-Hochberg step-up procedure.

    Returns the largest k with p_(k) <= k * alpha / m, or 0.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    return _step_up(ps, alpha, ps.m)


def adaptive_bh(ps: PValueSet, alpha: float, pi0_hat: Pi0Estimate) -> int:
    """BH with m replaced by m * pi0_hat; pi0_hat = 0 is treated as 1/m."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    p = pi0_hat.value if pi0_hat.value > 0.0 else 1.0 / ps.m
    return _step_up(ps, alpha, ps.m * p)
