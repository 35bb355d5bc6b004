import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from nse import decisions as D
from nse import pi0
from nse.decisions import Method
from nse.errors import DomainError, GammaExceedsLambda, MismatchedInput
from nse.pvalues import PValueSet, load

Z05 = 1.644853626951472688  # mpmath bisection


def with_counts(m, n_leq, gamma, fill=0.7):
    """m p-values, exactly n_leq of them <= gamma."""
    small = np.linspace(gamma / 10, gamma, n_leq) if n_leq else np.array([])
    rest = np.full(m - n_leq, fill)
    return load(np.concatenate([small, rest]))


def test_oracle_normal_hand_example():
    ps = with_counts(100, 20, 0.05)
    d = D.oracle_normal(ps, 0.05, 0.05, 1.0)
    assert d.raw_bound == pytest.approx(20 - 5 - Z05 * math.sqrt(100 * 0.05 * 0.95), abs=1e-12)
    assert d.raw_bound == pytest.approx(11.415124631601, abs=1e-9)
    assert d.n_reject == 11
    assert d.threshold_pvalue == ps.kth_smallest(11)


def test_oracle_normal_pi0_zero_takes_all_significant():
    ps = with_counts(100, 20, 0.05)
    d = D.oracle_normal(ps, 0.05, 0.05, 0.0)
    assert d.variance_used == 0.0
    assert d.raw_bound == 20 and d.n_reject == 20


def test_oracle_normal_at_one_is_sgof():
    ps = with_counts(300, 40, 0.05)
    a, b = D.oracle_normal(ps, 0.05, 0.01, 1.0), D.sgof(ps, 0.05, 0.01)
    assert (a.raw_bound, a.n_reject) == (b.raw_bound, b.n_reject)


def test_oracle_binomial_degenerate_q():
    ps = with_counts(50, 9, 0.05)
    assert D.oracle_binomial(ps, 0.05, 0.05, 0.0).n_reject == 9


def test_oracle_binomial_uses_exact_quantile():
    ps = with_counts(10, 10, 0.5, fill=0.9)
    # b_{10,0.05}(0.5) = 8
    assert D.oracle_binomial(ps, 0.5, 0.05, 1.0).raw_bound == 2.0


def test_sgof_uniform_nulls_reject_nothing():
    ps = load((np.arange(1000) + 0.5) / 1000)
    assert D.sgof(ps, 0.05, 0.05).n_reject == 0


def test_sgof_conservative_hand_example():
    ps = with_counts(100, 20, 0.05)
    d = D.sgof_conservative(ps, 0.05, 0.05)
    assert d.raw_bound == pytest.approx(8.420585492194, abs=1e-9)
    assert d.n_reject == 8


def test_sgof_conservative_equals_sgof_when_fraction_is_gamma():
    ps = with_counts(100, 5, 0.05)
    a, b = D.sgof_conservative(ps, 0.05, 0.05), D.sgof(ps, 0.05, 0.05)
    assert a.raw_bound == pytest.approx(b.raw_bound, abs=1e-12)


def test_sgof_conservative_never_exceeds_sgof_in_valid_region():
    for n in range(5, 51):
        ps = with_counts(100, n, 0.05)  # 0.05 <= F <= 0.5
        assert D.sgof_conservative(ps, 0.05, 0.05).n_reject <= D.sgof(ps, 0.05, 0.05).n_reject


def test_plugin_at_one_is_sgof():
    ps = with_counts(500, 60, 0.05)
    a = D.plugin_naive(ps, 0.05, 0.05, pi0.fixed(1.0))
    b = D.sgof(ps, 0.05, 0.05)
    assert (a.raw_bound, a.n_reject) == (b.raw_bound, b.n_reject)


def test_plugin_method_tag_follows_estimator():
    ps = with_counts(100, 20, 0.05)
    assert D.plugin_naive(ps, 0.05, 0.05, pi0.storey(ps)).method is Method.PLUGIN_STOREY
    assert D.plugin_naive(ps, 0.05, 0.05, pi0.dalmasso(ps)).method is Method.PLUGIN_DALMASSO


@given(st.floats(0.001, 0.5), st.floats(0.01, 1.0))
def test_storey_variance_simplification_is_bit_exact(gamma, p):
    assert D.storey_variance(gamma, 0.5, p) == D.storey_variance_simplified(gamma, 0.5, p)


def test_storey_variance_indicator_branch():
    g, lam, p = 0.6, 0.5, 0.8
    expected = g * p + g * g / (1 - lam) * p - 2 * g / (1 - lam) * (g - lam) * p
    assert D.storey_variance(g, lam, p) == pytest.approx(expected, rel=1e-14)


def test_updated_storey_uses_truncated_pi0():
    ps = load(np.concatenate([np.full(10, 0.001), np.full(90, 0.9)]))
    d = D.updated_storey(ps, 0.05, 0.05)
    assert d.pi0_used == 1.0


def test_updated_dalmasso_variance():
    ps = load([0.001, 0.01, 0.03, 0.2, 0.4, 0.6, 0.8, 0.95])
    d = D.updated_dalmasso(ps, 0.05, 0.05)
    p = pi0.dalmasso(ps).value
    g = 0.05
    var = g * p + g * g * ps.log_moment(2) - 2 * g * p * ((1 - g) * math.log(1 - g) + g)
    assert d.variance_used == pytest.approx(var, rel=1e-13)
    assert d.raw_bound == pytest.approx(3 - 8 * g * p - Z05 * math.sqrt(8 * var), rel=1e-12)


def test_expected_storey_requires_gamma_le_lambda():
    with pytest.raises(GammaExceedsLambda):
        D.expected_storey(load([0.1, 0.7]), 0.6, 0.05, 0.5)


def test_expected_variants_degenerate_and_support():
    ps = load(np.linspace(0.2, 0.99, 50))
    assert D.expected_storey(ps, 0.05, 0.05).n_reject == 0
    assert D.expected_dalmasso(ps, 0.05, 0.05).n_reject == 0


def test_expected_variance_dominates_updated_on_mixture(rng):
    p = np.concatenate([rng.uniform(size=900), rng.beta(0.1, 5, size=100)])
    ps = load(p)
    for g in (0.01, 0.05, 0.1):
        us, es = D.updated_storey(ps, g, 0.05), D.expected_storey(ps, g, 0.05)
        ud, ed = D.updated_dalmasso(ps, g, 0.05), D.expected_dalmasso(ps, g, 0.05)
        assert es.variance_used >= us.variance_used
        assert es.n_reject <= us.n_reject
        assert ed.variance_used >= ud.variance_used
        assert ed.n_reject <= ud.n_reject


def test_rejection_set():
    ps = load([0.3, 0.1, 0.2])
    d = D.oracle_normal(ps, 0.5, 0.5, 0.0)  # rejects all three
    assert D.rejection_set(ps, d) == [1, 2, 0]
    assert D.rejection_set(ps, D.sgof(ps, 0.05, 0.05)) == []


def test_rejection_set_two_smallest_and_ties():
    ps = load([0.3, 0.1, 0.2])
    d = D.NseDecision(Method.SGOF, 2, 2.5, 0.2, 0.5, 0.05, 0.0, 1.0, 3, 3)
    assert D.rejection_set(ps, d) == [1, 2]
    ties = load([0.05, 0.05, 0.9])
    d = D.NseDecision(Method.SGOF, 1, 1.5, 0.05, 0.05, 0.05, 0.0, 1.0, 3, 2)
    assert D.rejection_set(ties, d) == [0]


def test_rejection_set_mismatch():
    d = D.sgof(load([0.1, 0.2]), 0.05, 0.05)
    with pytest.raises(MismatchedInput):
        D.rejection_set(load([0.1]), d)


def test_decide_dispatch_and_errors():
    ps = with_counts(200, 30, 0.05)
    assert D.decide(ps, "updated-storey", 0.05, 0.05) == D.updated_storey(ps, 0.05, 0.05)
    with pytest.raises(DomainError):
        D.decide(ps, "oracle_normal", 0.05, 0.05)
    with pytest.raises(DomainError):
        D.decide(ps, "nonsense", 0.05, 0.05)
    with pytest.raises(DomainError):
        D.sgof(ps, 0.0, 0.05)
    with pytest.raises(DomainError):
        D.sgof(ps, 0.05, 1.0)


ALL = list(Method)


@st.composite
def pvalue_sets(draw):
    m = draw(st.integers(1, 200))
    frac_alt = draw(st.floats(0.0, 1.0))
    seed = draw(st.integers(0, 2 ** 32 - 1))
    r = np.random.default_rng(seed)
    alt = r.random(m) < frac_alt
    p = np.where(alt, r.beta(0.2, 4.0, size=m), r.uniform(size=m))
    return load(p)


def _safe_decide(ps, method, gamma, alpha, pi0_):
    try:
        return D.decide(ps, method, gamma, alpha, pi0=pi0_)
    except (GammaExceedsLambda,):
        return None
    except D.NegativeVariance:
        return None


@settings(max_examples=150, deadline=None)
@given(pvalue_sets(), st.floats(0.001, 0.49), st.floats(0.001, 0.5), st.floats(0.0, 1.0))
def test_support_condition(ps, gamma, alpha, pi0_):
    count = ps.count_leq(gamma)
    for method in ALL:
        d = _safe_decide(ps, method, gamma, alpha, pi0_)
        if d is None:
            continue
        assert 0 <= d.n_reject <= count
        if d.n_reject:
            assert d.threshold_pvalue == ps.kth_smallest(d.n_reject) <= gamma


@settings(max_examples=100, deadline=None)
@given(pvalue_sets(), st.floats(0.001, 0.49), st.floats(0.001, 0.5), st.floats(0.001, 0.5),
       st.floats(0.0, 1.0))
def test_monotone_in_alpha(ps, gamma, a1, a2, pi0_):
    lo, hi = sorted((a1, a2))
    for method in ALL:
        d_lo = _safe_decide(ps, method, gamma, lo, pi0_)
        d_hi = _safe_decide(ps, method, gamma, hi, pi0_)
        if d_lo is None or d_hi is None:
            continue
        assert d_lo.n_reject <= d_hi.n_reject


@settings(max_examples=100, deadline=None)
@given(pvalue_sets(), st.floats(0.001, 0.49), st.floats(0.001, 0.5), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_oracle_monotone_in_pi0(ps, gamma, alpha, p1, p2):
    lo, hi = sorted((p1, p2))
    assert D.oracle_normal(ps, gamma, alpha, hi).n_reject <= D.oracle_normal(ps, gamma, alpha, lo).n_reject


@settings(max_examples=100, deadline=None)
@given(pvalue_sets(), st.floats(0.001, 0.5), st.floats(0.001, 0.5), st.floats(0.0, 1.0))
def test_sgof_dominated_by_plugin(ps, gamma, alpha, p):
    est = pi0.Pi0Estimate(p, pi0.Pi0Method.STOREY, 0.5)
    assert D.sgof(ps, gamma, alpha).n_reject <= D.plugin_naive(ps, gamma, alpha, est).n_reject


@settings(max_examples=25, deadline=None)
@given(st.floats(0.005, 0.2), st.floats(0.1, 1.0), st.sampled_from([0.01, 0.05, 0.1]),
       st.integers(0, 2 ** 32 - 1))
def test_binomial_and_normal_oracles_agree_at_large_m(gamma, pi0_, alpha, seed):
    ps = load(np.random.default_rng(seed).uniform(size=100_000) ** 1.3)
    a = D.oracle_binomial(ps, gamma, alpha, pi0_).n_reject
    b = D.oracle_normal(ps, gamma, alpha, pi0_).n_reject
    assert abs(a - b) <= 1
