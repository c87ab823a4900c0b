import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plurank import measures, moments
from plurank.errors import DomainError
from plurank.hierarchy import build_witness, matching_matrix, solve_matching, splur_from_w, verify_agreement
from plurank.plurality import aggregate_from_profile, plurality_matrix
from plurank.prefcore import impartial_culture, table1_antagonism


def test_d3_direction():
    assert solve_matching(3) == (-1, 3, -3, 1, 0)


@pytest.mark.parametrize("d", range(2, 8))
def test_direction_solves_matching_system(d):
    delta = solve_matching(d)
    A = matching_matrix(d)
    assert all(sum(a * x for a, x in zip(row, delta)) == 0 for row in A)
    w = [Fraction(1, d + 2)] * (d + 2)
    w2 = [x + Fraction(1, 1000) * y for x, y in zip(w, delta)]
    assert splur_from_w(w, d + 2, d + 1) != splur_from_w(w2, d + 2, d + 1)


@settings(max_examples=10)
@given(st.integers(2, 5))
def test_witness_divergence_degree(d):
    a, b = build_witness(d).profiles()
    report = verify_agreement(a, b)
    assert report.first_divergent_degree == d + 1
    assert report.agrees_through(d) and not report.agrees_through(d + 1)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_moments_agree_below_gap(d):
    W = build_witness(d)
    a, b = W.profiles()
    Pa, Pb = aggregate_from_profile(a, 0), aggregate_from_profile(b, 0)
    # P_s reads degree s+1, so moments agree below order d and split at d
    for k in range(2, d):
        assert moments.central_moment(Pa, k) == pytest.approx(moments.central_moment(Pb, k), abs=1e-10)
    gap = moments.central_moment(Pb, d) - moments.central_moment(Pa, d)
    assert abs(gap) == pytest.approx(math.factorial(d) * abs(Pb.values[d] - Pa.values[d]), abs=1e-10)
    assert abs(gap) > 1e-6


def test_level_three_separates_table1_pair():
    report = verify_agreement(impartial_culture(3), table1_antagonism())
    assert report.max_gap_per_degree[2] == 0 and report.first_divergent_degree == 3
    Ma, Mb = plurality_matrix(impartial_culture(3)), plurality_matrix(table1_antagonism())
    assert measures.rank_variance(Ma, 0) != pytest.approx(measures.rank_variance(Mb, 0))


def test_default_scale_keeps_entries_positive():
    W = build_witness(3)
    assert W.t == Fraction(19, 300)
    assert min(W.w_prime) == Fraction(1, 100)


def test_negative_entries_rejected():
    with pytest.raises(DomainError):
        build_witness(3, Fraction(1, 2))
    with pytest.raises(DomainError):
        build_witness(3, 0)


def test_as_dict_is_exact():
    d = build_witness(3, Fraction(1, 20)).as_dict()
    assert d["w_prime_exact"] == ["3/20", "7/20", "1/20", "1/4", "1/5"]
    assert d["focal_entries"]["4"] == ["1/4", "19/80"]


def test_size_mismatch():
    with pytest.raises(DomainError):
        verify_agreement(impartial_culture(3), impartial_culture(4))
