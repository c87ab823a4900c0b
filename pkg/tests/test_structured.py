import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from plurank import structured
from plurank.errors import CollapseInapplicableError, DomainError, NotSinglePeakedError
from plurank.plurality import plurality_matrix
from plurank.prefcore import ExactProfile, GeneratorSpec, PlackettLuce, WalshSinglePeaked, generate, impartial_culture

strengths = st.lists(st.floats(0.05, 20.0), min_size=3, max_size=6)


@given(strengths)
def test_pl_lift_recovers_model(v):
    truth = structured.pl_matrix(v)
    lifted = structured.pl_lift_matrix(truth.restricted({2}), reference=len(v) - 1)
    assert max(truth.max_gap(lifted, k) for k in truth.degrees) < 1e-9


@given(strengths)
def test_pl_matrix_matches_profile(v):
    prof = generate(GeneratorSpec(PlackettLuce(tuple(v)), len(v)), 0)
    assert structured.verify_collapse(prof, structured.PL(tuple(v))) < 1e-9


@given(st.permutations(range(5)))
def test_sp_collapse_on_any_axis(axis):
    prof = generate(GeneratorSpec(WalshSinglePeaked(tuple(axis)), 5), 0)
    assert structured.verify_collapse(prof, structured.SP(tuple(axis))) < 1e-12
    assert structured.middle_never_last(prof, axis) == 0


def test_pl_plurality_ratio():
    assert structured.pl_plurality((1.0, 2.0, 3.0), (1, 2), 2) == pytest.approx(0.6)
    with pytest.raises(DomainError):
        structured.pl_plurality((1.0, -1.0), (0, 1), 0)


def test_pl_lift_boundary():
    with pytest.raises(CollapseInapplicableError):
        structured.pl_lift({1: 1.0, 2: 0.5}, reference=0)


def test_sp_rejects_middle_last_data():
    valley = ExactProfile(np.array([[0, 2, 1]]), np.ones(1))
    with pytest.raises(NotSinglePeakedError):
        structured.sp_lift((0, 1, 2), plurality_matrix(valley, {2}))
    cyc = ExactProfile(np.array([[0, 1, 2], [1, 2, 0], [2, 0, 1]]), np.full(3, 1 / 3))
    assert structured.verify_collapse(cyc, structured.SP((0, 1, 2))) > 0.3


def test_ic_is_pl_with_equal_strengths():
    assert structured.verify_collapse(impartial_culture(4), structured.PL()) < 1e-12


def test_unknown_structure():
    with pytest.raises(DomainError):
        structured.verify_collapse(impartial_culture(3), object())
