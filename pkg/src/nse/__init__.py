"""Lower confidence bounds on the number of significant effects among m p-values."""

from .baselines import adaptive_bh, bh
from .decisions import (
    Method,
    NseDecision,
    decide,
    expected_dalmasso,
    expected_storey,
    oracle_binomial,
    oracle_normal,
    plugin_naive,
    rejection_set,
    sgof,
    sgof_conservative,
    updated_dalmasso,
    updated_storey,
    z_quantile,
)
from .metrics import DecisionMetrics, estimate_metrics
from .pi0 import Pi0Estimate, Pi0Method, dalmasso, storey
from .pvalues import PValueSet, load, read_pvalues

__version__ = "0.1.0"
