import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from plurank import moments, oracle
from plurank.errors import DegenerateError
from plurank.plurality import aggregate_from_profile, aggregate_vector, plurality_matrix
from plurank.prefcore import antagonism, impartial_culture, random_exact, unanimous

profiles = st.builds(random_exact, st.integers(3, 6), st.integers(0, 10_000))


@given(profiles, st.integers(2, 6))
def test_moments_match_oracle(prof, k):
    t = oracle.enumerate(prof)
    for a in range(prof.m):
        P = aggregate_vector(plurality_matrix(prof), a)
        assert abs(moments.central_moment(P, k) - oracle.central_moment(t, a, k)) < 1e-8


@given(profiles)
def test_pearson_inequality(prof):
    for a in range(prof.m):
        mv = moments.MomentVector.from_aggregate(aggregate_from_profile(prof, a))
        if mv.gamma1 is not None:
            assert mv.gamma2 >= mv.gamma1**2 - 2 - 1e-9
            assert moments.pearson_point(mv).region != "infeasible"


def test_first_moment_vanishes():
    P = aggregate_from_profile(random_exact(5, seed=1), 2)
    assert abs(moments.central_moment(P, 1)) < 1e-12


def test_uniform_rank_moments():
    # Uniform rank on 1..m has variance (m^2 - 1)/12 and zero skew
    m = 9
    mv = moments.MomentVector.from_aggregate(aggregate_from_profile(impartial_culture(m), 0))
    assert mv.M[2] == pytest.approx((m * m - 1) / 12)
    assert abs(mv.gamma1) < 1e-9
    assert mv.gamma2 == pytest.approx(-6 * (m * m + 1) / (5 * (m * m - 1)))


def test_antagonism_sits_on_the_boundary():
    mv = moments.MomentVector.from_aggregate(aggregate_from_profile(antagonism(11), 0))
    g1, g2 = moments.skew_kurtosis(mv)
    assert abs(g1) < 1e-9 and g2 == pytest.approx(-2)
    assert moments.classify(g1, g2) == "bimodal"


def test_deterministic_rank_is_degenerate():
    mv = moments.MomentVector.from_aggregate(aggregate_from_profile(unanimous((0, 1, 2)), 0))
    assert mv.gamma1 is None
    with pytest.raises(DegenerateError):
        moments.skew_kurtosis(mv)


def test_coefficients_first_order():
    assert np.allclose(moments.moment_coefficients(2.5, 1), [-2.5, 1.0])


@pytest.mark.parametrize("g1,g2,c,region", [(0, -2.5, 1, "infeasible"), (0, -1.5, 1, "bimodal"), (0, 0, 1, "unimodal"), (1, 0.2, 0.5, "bimodal")])
def test_classify(g1, g2, c, region):
    assert moments.classify(g1, g2, c) == region


def test_pearson_rows_skip_zero_variance():
    prof = unanimous((0, 1, 2))
    assert moments.pearson_rows([aggregate_from_profile(prof, a) for a in range(3)], "u") == []
    rows = moments.pearson_rows([aggregate_from_profile(impartial_culture(5), 0)], "ic", labels=["x"] * 5)
    assert rows[0]["alt"] == "x" and math.isfinite(rows[0]["skewness"])
