import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from plurank import ingest
from plurank.errors import DomainError, ParseError
from plurank.hierarchy import build_witness
from plurank.plurality import plurality_matrix
from plurank.prefcore import SampledProfile, antagonism, random_exact

SOC = """# FILE NAME: demo.soc
# DATA TYPE: soc
# NUMBER ALTERNATIVES: 3
# ALTERNATIVE NAME 1: Ann
# ALTERNATIVE NAME 2: Bo
# ALTERNATIVE NAME 3: Cy
3: 1,2,3
1: 3,1,2
"""


def test_read_soc():
    prof = ingest.parse_soc(SOC)
    assert prof.alternatives.labels == ("Ann", "Bo", "Cy")
    assert prof.rankings.tolist() == [[0, 1, 2], [2, 0, 1]]
    assert prof.weights.tolist() == [3.0, 1.0]
    assert plurality_matrix(prof).p((0, 2), 0) == 0.75


@pytest.mark.parametrize(
    "body,line,fragment",
    [
        ("1: 1,{2,3}", 4, "tie"),
        ("1 1,2,3", 4, "expected"),
        ("1: 1,1,2", 4, "twice"),
        ("1: 1,2,4", 4, "out of range"),
        ("1: 1,2", 4, "incomplete"),
        ("x: 1,2,3", 4, "count"),
    ],
)
def test_malformed_lines(body, line, fragment):
    text = "# DATA TYPE: soc\n# NUMBER ALTERNATIVES: 3\n2: 1,2,3\n" + body + "\n"
    with pytest.raises(ParseError) as err:
        ingest.read_election(text)
    assert err.value.line == line and fragment in str(err.value)


def test_rejects_other_data_types_and_empty_input():
    with pytest.raises(ParseError):
        ingest.read_election("# DATA TYPE: toc\n1: 1,2\n")
    with pytest.raises(ParseError):
        ingest.read_election("# DATA TYPE: soc\n")


@given(st.integers(2, 6), st.integers(1, 30), st.integers(0, 1000))
def test_soc_round_trip(m, n, seed):
    rng = np.random.default_rng(seed)
    rankings = np.array([rng.permutation(m) for _ in range(n)])
    weights = rng.integers(1, 5, n).astype(float)
    prof = SampledProfile(rankings, weights)
    back = ingest.parse_soc(ingest.write_soc(prof))
    assert np.array_equal(back.rankings, prof.rankings) and np.array_equal(back.weights, prof.weights)


@given(st.integers(3, 5), st.integers(0, 1000))
def test_matrix_round_trips(m, seed):
    M = plurality_matrix(random_exact(m, seed=seed), {2, 3})
    for fmt in ("json", "csv"):
        back = ingest.parse(ingest.export(M, fmt), "matrix", fmt)
        assert all(M.max_gap(back, k) == 0.0 for k in (2, 3))


def test_profile_json_round_trip():
    for prof in (random_exact(4, seed=0), antagonism(6)):
        back = ingest.parse(ingest.export(prof), "profile")
        assert type(back) is type(prof)
        assert ingest.profile_to_dict(back) == ingest.profile_to_dict(prof)


def test_witness_round_trip():
    W = build_witness(3, Fraction(1, 20))
    back = ingest.parse(ingest.export(W), "witness")
    assert back.w_prime == W.w_prime and back.t == W.t


def test_csv_uses_17_digits():
    text = ingest.rows_to_csv([{"x": 1 / 3}])
    assert text.splitlines()[1] == "0.33333333333333331"


def test_nan_becomes_null():
    assert json.loads(ingest.to_json({"v": float("nan")})) == {"v": None}


def test_unknown_format_and_kind():
    with pytest.raises(DomainError):
        ingest.export({"a": 1}, "xml")
    with pytest.raises(DomainError):
        ingest.parse("{}", "thing")
