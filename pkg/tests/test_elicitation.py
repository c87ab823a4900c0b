import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from plurank import elicitation as el
from plurank.errors import DomainError, FeasibilityError, ResourceError
from plurank.prefcore import SampledProfile, impartial_culture, random_exact

SPEC = el.AccuracySpec(0.05, 0.05)


def test_accuracy_spec_bounds():
    with pytest.raises(DomainError):
        el.AccuracySpec(0.0, 0.1)
    with pytest.raises(DomainError):
        el.AccuracySpec(0.1, 1.0)


def test_hoeffding_budget():
    assert el.sample_budget(10, 2, SPEC) == (90, 1638)
    Q, T = el.sample_budget(10, 2, SPEC, population=900)
    assert T == el.serfling_refine(1638, 900) and T < 1638


@given(st.integers(1, 10_000), st.integers(1, 10_000))
def test_serfling_never_exceeds_hoeffding(T, n):
    assert el.serfling_refine(T, n) <= T


@pytest.mark.parametrize("k,cost", [(1, 0), (2, 1), (3, 3), (4, 5), (5, 7), (10, 22)])
def test_ranking_cost(k, cost):
    assert el.ranking_cost(k) == cost


def test_k_of_lambda():
    assert el.k_of_lambda(7, 2, 10) == 5
    assert el.k_of_lambda(100, 2, 6) == 6
    with pytest.raises(FeasibilityError):
        el.k_of_lambda(2, 3, 6)


def test_plans():
    c = el.plan_chain(10, 3, SPEC)
    assert c.lam == 2 and c.N == math.comb(10, 3) * c.T and c.B == 2 * c.N
    r = el.plan_ranking(10, 3, 7, SPEC)
    assert r.k == 5 and r.N == math.ceil(math.comb(10, 3) * r.T / math.comb(5, 3))
    assert r.label == "ranking-5" and r.as_dict()["lambda"] == 7
    with pytest.raises(FeasibilityError):
        el.plan_ranking(10, 3, 3, SPEC, k=5)


@given(st.integers(3, 10), st.data())
def test_frontier_is_consistent(m, data):
    l = data.draw(st.integers(2, min(m, 4)))
    front = el.pareto_frontier(m, l, SPEC)
    keep = [f for f in front if not f.dominated]
    assert keep, "frontier cannot be empty"
    lams = [f.lam for f in front]
    assert lams == sorted(lams)
    # along the non-dominated points, more load always buys a smaller budget
    # chain and ranking-l coincide; otherwise more load buys a smaller budget
    for a, b in zip(keep, keep[1:]):
        assert (a.lam, a.B) == (b.lam, b.B) or (a.lam < b.lam and a.B > b.B)


@given(st.integers(3, 9), st.integers(1, 10**7), st.data())
def test_choose_protocol_is_feasible(m, n, data):
    l = data.draw(st.integers(2, min(m, 4)))
    try:
        plan = el.choose_protocol(n, m, l, SPEC)
    except FeasibilityError:
        return
    assert plan.N <= n
    assert el.validate_lambda(plan).ok


def test_chain_round_robin_is_balanced():
    rep = el.run_chain(impartial_culture(4), 2, 600, seed=1)
    counts = [c.sum() for c in rep.matrix.counts[2].values()]
    assert min(counts) == max(counts) == 100


def test_ranking_run_reports_budget():
    rep = el.run_ranking(impartial_culture(5), 4, 2, 50, seed=2)
    assert rep.lam == el.ranking_cost(4) and rep.budget == 50 * rep.lam
    assert rep.max_error is not None


def test_runs_are_reproducible():
    prof = random_exact(5, seed=4)
    a = el.run_chain(prof, 3, 400, seed=11)
    b = el.run_chain(prof, 3, 400, seed=11)
    assert a.max_error == b.max_error


def test_population_without_replacement():
    pool = SampledProfile(np.array([[0, 1, 2], [2, 1, 0]] * 5), np.ones(10))
    el.run_chain(pool, 2, 10, seed=0, population=pool.rankings)
    with pytest.raises(ResourceError):
        el.run_chain(pool, 2, 11, seed=0, population=pool.rankings)


def test_coverage_small():
    plan = el.plan_chain(4, 2, el.AccuracySpec(0.15, 0.1))
    assert el.coverage(impartial_culture(4), plan, 20, seed=0) >= 0.85


def test_chain_bias_demo():
    rep = el.chain_bias_demo()
    assert rep.bias == Fraction(-1, 4)
    assert rep.as_dict()["inferred"] == 0.25


def test_stopping_times_lower_bound():
    T = 5
    times = el.stopping_times(5, 2, 2, T, trials=20, seed=0)
    assert times.min() >= math.comb(5, 2) * T


def test_validate_lambda_message():
    bad = el.ElicitationPlan("chain", 6, 4, 4, 10, 10, 1, 10, 60)
    check = el.validate_lambda(bad)
    assert not check.ok and check.required == 3 and "3" in check.message
