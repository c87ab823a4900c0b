import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from plurank import measures, oracle
from plurank.errors import DegeneratePairError, DependencyError, PositivityError
from plurank.plurality import plurality_matrix
from plurank.prefcore import impartial_culture, random_exact, table1_antagonism, unanimous

profiles = st.builds(random_exact, st.integers(3, 5), st.integers(0, 10_000))


@given(profiles)
def test_level_two_measures_match_oracle(prof):
    M, t = plurality_matrix(prof), oracle.enumerate(prof)
    assert abs(measures.agreement_index(M) - oracle.agreement(t)) < 1e-9
    assert abs(measures.kt_diversity(M) - oracle.kt_diversity(t)) < 1e-9
    assert np.allclose(measures.borda_vector(M), [oracle.borda(t, a) for a in range(prof.m)], atol=1e-9)


@given(profiles)
def test_kernel_form_equals_gap_form(prof):
    M = plurality_matrix(prof)
    for a in range(prof.m):
        assert abs(measures.divisiveness(M, a) - measures.divisiveness_kernel(M, a)) < 1e-9


@given(profiles)
def test_conditional_borda_recombines(prof):
    M = plurality_matrix(prof)
    for a, b in itertools.permutations(range(prof.m), 2):
        p = M.pair(a, b)
        hi, lo = measures.conditional_borda(M, a, b)
        assert abs(p * hi + (1 - p) * lo - measures.borda(M, a)) < 1e-9


@given(profiles)
def test_conflict_bounds(prof):
    M = plurality_matrix(prof)
    for a, b in itertools.combinations(range(prof.m), 2):
        r = measures.pair_conflict(M, a, b)
        assert r.delta >= abs(r.bor_gap) - 1e-9
        assert r.scores["MaxSwap"] >= -1e-9 and r.scores["MaxNash"] >= -1e-9
        assert 0 <= r.beta <= 1 + 1e-9 and 0 <= r.alpha <= 1


@given(profiles)
def test_variance_nonnegative(prof):
    M = plurality_matrix(prof)
    assert all(measures.rank_variance(M, a) >= -1e-9 for a in range(prof.m))


def test_unanimous_profile_is_degenerate():
    M = plurality_matrix(unanimous((0, 1, 2)))
    assert measures.agreement_index(M) == 1.0
    assert measures.rank_variance(M, 1) == pytest.approx(0.0)
    with pytest.raises(PositivityError):
        measures.divisiveness(M, 0)
    r = measures.pair_conflict(M, 0, 1)
    assert r.delta_minus is None
    with pytest.raises(DegeneratePairError):
        r.gamma
    assert r.as_dict()["gamma"] is None


def test_divisiveness_needs_triples():
    M = plurality_matrix(impartial_culture(4), {2})
    with pytest.raises(DependencyError):
        measures.rank_variance(M, 0)


def test_alpha_zero_is_plain_divisiveness():
    M = plurality_matrix(random_exact(4, seed=3))
    assert measures.alpha_divisiveness(M, 2, 0.0) == pytest.approx(measures.divisiveness(M, 2))


def test_generalized_polarization_recovers_agreement():
    M = plurality_matrix(random_exact(4, seed=5))
    total = measures.generalized_polarization(M, lambda x: abs(2 * x - 1))
    assert total / 6 == pytest.approx(measures.agreement_index(M))


def test_most_conflictual_pair_antagonism():
    M = plurality_matrix(table1_antagonism())
    res = measures.most_conflictual_pair(M, "MaxSum")
    assert res.winner in res.tied and res.rule == "MaxSum"
    assert res.scores[(0, 1)] == max(res.scores.values())


@pytest.mark.parametrize("seed", range(5))
def test_rules_match_oracle(seed):
    prof = random_exact(5, seed=seed)
    M, t = plurality_matrix(prof), oracle.enumerate(prof)
    rules = measures.tournament_rules(M)
    assert rules["Copeland"].scores == {a: oracle.copeland(t, a) for a in range(5)}
    assert all(abs(rules["Minimax"].scores[a] - oracle.minimax(t, a)) < 1e-9 for a in range(5))
    assert oracle.kemeny(t) in rules["Kemeny"].tied
    assert oracle.kwise_kemeny(t, 3) in measures.kwise_kemeny(M, 3).tied
    pos = measures.positional_rules(M, 2)
    for name, key in (("Plurality", "Plurality"), ("AntiPlurality", "AntiPlurality"), ("kApproval", "kApproval")):
        assert all(abs(pos[name].scores[a] - oracle.positional(t, a, key.lower(), 2)) < 1e-9 for a in range(5))
    assert pos["STV"].winner == oracle.stv(t)
    assert all(pos["Bucklin"].scores[a] == oracle.positional(t, a, "bucklin") for a in range(5))


def test_summary_records():
    recs = measures.summary(plurality_matrix(unanimous((0, 1, 2))), 0, "x")
    d = {r.measure: r for r in recs}
    assert np.isnan(d["divisiveness"].value) and d["variance"].level == 3
    assert d["borda"].as_dict()["alt"] == "x"
