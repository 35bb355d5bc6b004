import numpy as np
import pytest
from hypothesis import given, strategies as st

from nse import pi0
from nse.errors import DomainError
from nse.pvalues import load
from nse.simulate import SimScenario, gen_trial


def test_storey_truncates_at_one():
    est = pi0.storey(load(np.linspace(0.55, 0.95, 10)), 0.5)
    assert est.raw == 2.0
    assert est.value == 1.0 and est.truncated


def test_storey_formula():
    ps = load([0.1, 0.2, 0.6, 0.7, 0.8, 0.9])
    est = pi0.storey(ps, 0.5)
    assert est.value == pytest.approx((4 / 6) / 0.5 if 4 / 6 / 0.5 <= 1 else 1.0)
    assert est.lambda_ == 0.5 and est.method is pi0.Pi0Method.STOREY


def test_storey_lambda_domain():
    with pytest.raises(DomainError):
        pi0.storey(load([0.1]), 1.0)


def test_dalmasso_all_zero():
    est = pi0.dalmasso(load([0.0, 0.0, 0.0]))
    assert est.value == 0.0 and not est.truncated


def test_dalmasso_truncates():
    est = pi0.dalmasso(load([0.9, 0.95, 0.99]))
    assert est.raw > 1.0 and est.value == 1.0 and est.truncated


def test_fixed():
    assert pi0.fixed(0.7).value == 0.7
    with pytest.raises(DomainError):
        pi0.fixed(1.2)


@given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=40), st.randoms())
def test_permutation_invariance(vals, rnd):
    shuffled = list(vals)
    rnd.shuffle(shuffled)
    a, b = load(vals), load(shuffled)
    assert pi0.storey(a).value == pi0.storey(b).value
    assert pi0.dalmasso(a).value == pytest.approx(pi0.dalmasso(b).value, rel=1e-12, abs=1e-15)


@given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=40))
def test_storey_depends_only_on_count_above_half(vals):
    ps = load(vals)
    n_above = ps.m - ps.count_leq(0.5)
    assert pi0.storey(ps, 0.5).raw == n_above / (ps.m * 0.5)


@pytest.mark.slow
@pytest.mark.parametrize("pi0_true, mu, storey_mean, dalmasso_mean", [
    (0.9, 1.0, 0.9110, 0.9160),
    (0.8, 1.0, 0.8226, 0.8322),
    (1.0, 0.0, 0.9873, 0.9873),
])
def test_conservative_on_average(pi0_true, mu, storey_mean, dalmasso_mean):
    # published means over 5000 trials with m = 1000; MC tolerance 0.003
    sc = SimScenario(1000, pi0_true, mu, reps=2000, methods=("sgof",))
    s = np.empty(sc.reps)
    d = np.empty(sc.reps)
    for i in range(sc.reps):
        ps = gen_trial(sc, i).ps
        s[i] = pi0.storey(ps).value
        d[i] = pi0.dalmasso(ps).value
    se_s = s.std(ddof=1) / np.sqrt(sc.reps)
    se_d = d.std(ddof=1) / np.sqrt(sc.reps)
    assert abs(s.mean() - storey_mean) < 0.003
    assert abs(d.mean() - dalmasso_mean) < 0.003
    if pi0_true < 1:
        # at pi0 = 1 truncation pulls the mean below 1
        assert s.mean() >= pi0_true - 2 * se_s
        assert d.mean() >= pi0_true - 2 * se_d
