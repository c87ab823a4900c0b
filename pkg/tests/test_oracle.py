import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from plurank import oracle
from plurank.errors import DomainError, PositivityError, ResourceError
from plurank.prefcore import antagonism, impartial_culture, minority_top, random_exact, table1_antagonism, unanimous


def test_table_basics():
    t = oracle.enumerate(impartial_culture(3))
    assert len(t.probs) == 6 and t.probs.sum() == pytest.approx(1)
    assert oracle.p_S(t, (0, 1, 2), 2) == pytest.approx(1 / 3)
    assert oracle.borda(t, 0) == pytest.approx(1.0)


def test_resource_limit():
    with pytest.raises(ResourceError):
        oracle.enumerate(impartial_culture(9))


def test_empty_conditioning_event():
    t = oracle.enumerate(unanimous((0, 1, 2)))
    with pytest.raises(PositivityError):
        t.expect(np.ones(len(t.probs)), t.prefers(1, 0))


def test_table1_antagonism_values():
    t = oracle.enumerate(table1_antagonism())
    assert oracle.variance(t, 0) == pytest.approx(1.0)
    assert oracle.p_S(t, (0, 1, 2), 2) == 0.0


@given(st.integers(3, 6), st.integers(0, 1000))
def test_rank_law_sums_to_one(m, seed):
    t = oracle.enumerate(random_exact(m, seed=seed))
    for a in range(m):
        assert oracle.rank_law(t, a).sum() == pytest.approx(1)


@pytest.mark.parametrize("prof", [antagonism(7), minority_top(7, 0.05)], ids=["an", "min"])
def test_rank_law_path_matches_enumeration(prof):
    t, law = oracle.enumerate(prof), oracle.RankLaw(prof)
    for a in (0, 3):
        assert np.allclose(law.law(a), oracle.rank_law(t, a))
        assert law.variance(a) == pytest.approx(oracle.variance(t, a))
        assert law.moment(a, 3) == pytest.approx(oracle.central_moment(t, a, 3), abs=1e-12)
    assert law.agreement() == pytest.approx(oracle.agreement(t))
    assert law.divisiveness(0) == pytest.approx(oracle.divisiveness(t, 0))
    assert law.divisiveness(0, 1.0) == pytest.approx(oracle.divisiveness(t, 0, 1.0))


def test_brute_dispatch():
    prof = random_exact(4, seed=2)
    assert oracle.brute("var", prof, 1) == pytest.approx(oracle.variance(oracle.enumerate(prof), 1))
    assert oracle.brute("var", antagonism(15), 0) == pytest.approx(49.0)
    with pytest.raises(DomainError):
        oracle.brute("nope", prof)
    with pytest.raises(DomainError):
        oracle.brute("kemeny", oracle.RankLaw(antagonism(15)))


def test_pair_quantities_keys():
    q = oracle.pair_quantities(oracle.enumerate(random_exact(4, seed=1)), 0, 1)
    assert {"maxsum", "maxnash", "maxswap", "pmaxpolar", "gamma", "phi"} <= set(q)
