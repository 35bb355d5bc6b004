import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nse import decisions as D
from nse.errors import MismatchedInput
from nse.metrics import estimate_metrics
from nse.pi0 import Pi0Estimate, Pi0Method, fixed, storey
from nse.pvalues import load


def _decision(ps, n, x):
    return D.NseDecision(D.Method.SGOF, n, n + 0.5, x, 0.05, 0.05, 0.0, 1.0, ps.m, n)


def test_hand_example():
    ps = load(np.linspace(0.001, 0.999, 100))
    res = estimate_metrics(ps, _decision(ps, 10, 0.02), fixed(0.5))
    assert res.fdr_hat == pytest.approx(100 * 0.5 * 0.02 / 10)
    assert res.power_hat == pytest.approx((10 - 1.0) / 50)
    assert res.expected_false_discoveries == pytest.approx(1.0)
    assert not res.power_out_of_range


def test_no_rejections():
    ps = load([0.2, 0.5])
    res = estimate_metrics(ps, D.sgof(ps, 0.05, 0.05), fixed(0.5))
    assert (res.fdr_hat, res.power_hat, res.threshold) == (0.0, 0.0, None)
    res = estimate_metrics(ps, D.sgof(ps, 0.05, 0.05), fixed(1.0))
    assert res.power_hat is None


def test_pi0_one_has_no_power():
    ps = load(np.linspace(0.001, 0.999, 100))
    res = estimate_metrics(ps, _decision(ps, 5, 0.01), fixed(1.0))
    assert res.power_hat is None
    assert res.fdr_hat == pytest.approx(0.2)


def test_power_out_of_range_flagged():
    ps = load(np.linspace(0.001, 0.999, 100))
    with pytest.warns(RuntimeWarning):
        res = estimate_metrics(ps, _decision(ps, 10, 0.5), fixed(0.9))
    assert res.power_out_of_range and res.power_hat < 0


def test_mismatch():
    ps = load([0.01, 0.02])
    with pytest.raises(MismatchedInput):
        estimate_metrics(load([0.01]), _decision(ps, 1, 0.01), fixed(0.5))


@settings(max_examples=200)
@given(st.integers(1, 50), st.floats(1e-4, 0.05), st.floats(0.0, 0.999))
def test_identity(n, x, p):
    ps = load(np.linspace(0.0001, 0.9999, 200))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        res = estimate_metrics(ps, _decision(ps, n, x), Pi0Estimate(p, Pi0Method.FIXED))
    # FDR * N + pow * m (1 - pi0) = N
    assert res.fdr_hat * n + res.power_hat * ps.m * (1 - p) == pytest.approx(n, rel=1e-9, abs=1e-9)
