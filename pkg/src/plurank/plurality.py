"""Plurality matrices: for every subset S and a in S, the probability that a tops S.

Subsets are canonical sorted index tuples. A :class:`PluralityMatrix` stores
one *degree slice* per subset size, so callers only pay for the degrees they
ask for.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DependencyError, DomainError, ResourceError
from .prefcore import (
    MAX_ENUM_M,
    AlternativeSet,
    ExactProfile,
    Profile,
    RankMarginalProfile,
    SampledProfile,
    positions,
    profile_rankings,
)

Subset = tuple

#: Refuse to materialise more matrix entries than this.
MAX_ENTRIES = 20_000_000


def canonical(S) -> tuple[int, ...]:
    S = tuple(sorted(int(x) for x in S))
    if len(set(S)) != len(S):
        raise DomainError(f"subset {S} has repeated alternatives")
    return S


def subsets_of_size(m: int, k: int) -> list[tuple[int, ...]]:
    return list(itertools.combinations(range(m), k))


def num_entries(m: int, degrees) -> int:
    return sum(k * math.comb(m, k) for k in degrees)


@dataclass(eq=False)
class PluralityMatrix:
    """Degree-sliced plurality data.

    ``slices[k][S]`` is an array aligned with the sorted tuple ``S``: entry
    ``j`` is the probability that ``S[j]`` tops ``S``. Empirical matrices also
    keep the raw (possibly weighted) ``counts`` behind each frequency.
    """

    m: int
    slices: dict = field(default_factory=dict)
    counts: dict | None = None
    provenance: str = "exact"
    alternatives: AlternativeSet | None = None

    def __post_init__(self):
        if self.alternatives is None:
            self.alternatives = AlternativeSet.of_size(self.m)

    @classmethod
    def empty(cls, m: int, alternatives: AlternativeSet | None = None) -> "PluralityMatrix":
        """Empirical matrix with no observations."""
        return cls(m, {}, {}, "empirical", alternatives)

    @property
    def is_empirical(self) -> bool:
        return self.provenance == "empirical"

    @property
    def degrees(self) -> list[int]:
        return sorted(k for k, s in self.slices.items() if s)

    def has_degree(self, k: int) -> bool:
        return k in self.slices and len(self.slices[k]) == math.comb(self.m, k)

    def require(self, *degrees: int) -> None:
        for k in degrees:
            if not self.has_degree(k):
                raise DependencyError(f"plurality matrix lacks a complete degree-{k} slice")

    def slice(self, k: int) -> dict:
        if k not in self.slices:
            raise DependencyError(f"plurality matrix lacks the degree-{k} slice")
        return self.slices[k]

    def row(self, S) -> np.ndarray:
        S = canonical(S)
        try:
            return self.slice(len(S))[S]
        except KeyError:
            raise DependencyError(f"no entry for subset {S}") from None

    def p(self, S, a: int) -> float:
        """Probability that ``a`` tops ``S``."""
        S = canonical(S)
        if a not in S:
            raise DomainError(f"alternative {a} is not in {S}")
        return float(self.row(S)[S.index(a)])

    def pair(self, a: int, b: int) -> float:
        """Pairwise proportion p_ab(a)."""
        row = self.row((a, b))
        return float(row[0] if a < b else row[1])

    def pairwise(self) -> np.ndarray:
        """``(m, m)`` array with ``P[a, b] = p_ab(a)`` and zeros on the diagonal."""
        self.require(2)
        P = np.zeros((self.m, self.m))
        for (a, b), row in self.slices[2].items():
            P[a, b], P[b, a] = row
        return P

    def count(self, S, a: int):
        if self.counts is None:
            return None
        S = canonical(S)
        return float(self.counts[len(S)][S][S.index(a)])

    def entries(self, k: int):
        """Yield ``(S, a, p, count)`` for every stored entry of degree ``k``."""
        for S, row in sorted(self.slice(k).items()):
            cnt = None if self.counts is None else self.counts[k][S]
            for j, a in enumerate(S):
                yield S, a, float(row[j]), None if cnt is None else float(cnt[j])

    def restricted(self, degrees) -> "PluralityMatrix":
        degrees = set(degrees)
        slices = {k: dict(v) for k, v in self.slices.items() if k in degrees}
        counts = None
        if self.counts is not None:
            counts = {k: dict(v) for k, v in self.counts.items() if k in degrees}
        return PluralityMatrix(self.m, slices, counts, self.provenance, self.alternatives)

    def max_gap(self, other: "PluralityMatrix", k: int) -> float:
        """Largest absolute entry difference between two matrices at degree ``k``."""
        mine, theirs = self.slice(k), other.slice(k)
        if mine.keys() != theirs.keys():
            raise DependencyError(f"degree-{k} slices cover different subsets")
        return max((float(np.max(np.abs(mine[S] - theirs[S]))) for S in mine), default=0.0)


# ---------------------------------------------------------------------------
# exact and empirical construction


def _check_subset(m: int, S, a: int) -> tuple[int, ...]:
    S = canonical(S)
    if len(S) < 2:
        raise DomainError("plurality entries need |S| >= 2")
    if S[0] < 0 or S[-1] >= m:
        raise DomainError(f"subset {S} out of range for m={m}")
    if a not in S:
        raise DomainError(f"alternative {a} is not in {S}")
    return S


def rank_marginal_focal(w: np.ndarray, s: int) -> float:
    """Probability that the focal alternative tops a size-``s`` set containing it."""
    m = len(w)
    return float(sum(w[j - 1] * math.comb(m - j, s - 1) for j in range(1, m + 1)) / math.comb(m - 1, s - 1))


def _rank_marginal_row(profile: RankMarginalProfile, S: tuple[int, ...]) -> np.ndarray:
    s = len(S)
    if profile.focal not in S:
        return np.full(s, 1.0 / s)
    top = rank_marginal_focal(profile.w, s)
    row = np.full(s, (1.0 - top) / (s - 1))
    row[S.index(profile.focal)] = top
    return row


def plurality_entry(profile: Profile, S, a: int) -> float:
    """P(a is ranked first among S) under ``profile``."""
    S = _check_subset(profile.m, S, a)
    if isinstance(profile, RankMarginalProfile):
        return float(_rank_marginal_row(profile, S)[S.index(a)])
    rankings, probs = profile_rankings(profile)
    pos = positions(rankings)[:, S]
    return float(probs @ (np.argmin(pos, axis=1) == S.index(a)))


def _table_slice(pos: np.ndarray, weights: np.ndarray, m: int, k: int) -> dict:
    subsets = subsets_of_size(m, k)
    block_arr = np.array(subsets, dtype=np.int64).reshape(-1, k)
    out = np.empty((len(subsets), k))
    chunk = max(1, int(4_000_000 // max(1, pos.shape[0] * k)))
    for start in range(0, len(subsets), chunk):
        block = block_arr[start : start + chunk]
        win = np.argmin(pos[:, block], axis=2)
        for j in range(k):
            out[start : start + len(block), j] = weights @ (win == j)
    return {S: out[i] for i, S in enumerate(subsets)}


def plurality_matrix(profile: Profile, degrees=None) -> PluralityMatrix:
    """All entries of the requested degrees (default: every degree 2..m)."""
    m = profile.m
    degrees = sorted(set(range(2, m + 1) if degrees is None else degrees))
    if any(not 2 <= k <= m for k in degrees):
        raise DomainError(f"degrees must lie in [2, {m}]")
    if isinstance(profile, ExactProfile) and m > MAX_ENUM_M:
        raise ResourceError(f"exact profiles are limited to m <= {MAX_ENUM_M}; sample instead")
    if num_entries(m, degrees) > MAX_ENTRIES:
        raise ResourceError(
            f"{num_entries(m, degrees)} entries requested; ask for fewer degrees or smaller m"
        )
    if isinstance(profile, RankMarginalProfile):
        slices = {k: {S: _rank_marginal_row(profile, S) for S in subsets_of_size(m, k)} for k in degrees}
        return PluralityMatrix(m, slices, None, "exact", profile.alternatives)
    rankings, _ = profile_rankings(profile)
    pos = positions(rankings)
    if isinstance(profile, SampledProfile):
        counts = {k: _table_slice(pos, profile.weights, m, k) for k in degrees}
        total = profile.weights.sum()
        slices = {k: {S: c / total for S, c in sl.items()} for k, sl in counts.items()}
        return PluralityMatrix(m, slices, counts, "empirical", profile.alternatives)
    slices = {k: _table_slice(pos, profile.probs, m, k) for k in degrees}
    return PluralityMatrix(m, slices, None, "exact", profile.alternatives)


def empirical_update(matrix: PluralityMatrix, S, winner: int, weight: float = 1.0) -> PluralityMatrix:
    """Record one observation "``winner`` tops ``S``" in place and return the matrix."""
    if not matrix.is_empirical:
        raise DomainError("only empirical matrices accept observations")
    S = _check_subset(matrix.m, S, winner)
    k = len(S)
    cnt = matrix.counts.setdefault(k, {}).setdefault(S, np.zeros(k))
    cnt[S.index(winner)] += weight
    matrix.slices.setdefault(k, {})[S] = cnt / cnt.sum()
    return matrix


def empirical_from_counts(m: int, counts: dict, alternatives=None) -> PluralityMatrix:
    """Empirical matrix from ``{k: {S: count array}}``; subsets without observations are dropped."""
    kept = {k: {S: np.asarray(c, float) for S, c in sl.items() if np.sum(c) > 0} for k, sl in counts.items()}
    slices = {k: {S: c / c.sum() for S, c in sl.items()} for k, sl in kept.items()}
    return PluralityMatrix(m, slices, kept, "empirical", alternatives)


def merge_empirical(*matrices: PluralityMatrix) -> PluralityMatrix:
    """Sum the counts of several empirical matrices over the same alternatives."""
    m = matrices[0].m
    counts: dict = {}
    for mat in matrices:
        if not mat.is_empirical or mat.m != m:
            raise DomainError("can only merge empirical matrices of equal size")
        for k, sl in mat.counts.items():
            dest = counts.setdefault(k, {})
            for S, c in sl.items():
                dest[S] = dest.get(S, 0) + c
    return empirical_from_counts(m, counts, matrices[0].alternatives)


# ---------------------------------------------------------------------------
# aggregate plurality and rank distribution


@dataclass(frozen=True)
class AggregatePlurality:
    """``values[s]`` is the sum of a's plurality over all size-(s+1) sets containing a."""

    a: int
    m: int
    values: tuple

    @property
    def borda(self) -> float:
        return self.values[1]

    @property
    def complete(self) -> bool:
        return len(self.values) == self.m


def aggregate_plurality(matrix: PluralityMatrix, a: int, s: int) -> float:
    if not 0 <= s <= matrix.m - 1:
        raise DomainError(f"s must lie in [0, {matrix.m - 1}]")
    if s == 0:
        return 1.0
    matrix.require(s + 1)
    total = 0.0
    for S, row in matrix.slices[s + 1].items():
        if a in S:
            total += row[S.index(a)]
    return float(total)


def aggregate_vector(matrix: PluralityMatrix, a: int, max_s: int | None = None) -> AggregatePlurality:
    """P_0(a), ..., P_max_s(a) from the matrix (default: up to m-1)."""
    max_s = matrix.m - 1 if max_s is None else max_s
    return AggregatePlurality(a, matrix.m, tuple(aggregate_plurality(matrix, a, s) for s in range(max_s + 1)))


def aggregate_from_profile(profile: Profile, a: int, max_s: int | None = None) -> AggregatePlurality:
    """Aggregate plurality computed without materialising the matrix.

    Uses the identity that the sum of a's plurality over size-(s+1) sets
    containing it equals the mean of C(#alternatives a beats, s). Intended
    for large m where the slices of degree s+1 would be too big.
    """
    m = profile.m
    max_s = m - 1 if max_s is None else min(max_s, m - 1)
    if isinstance(profile, RankMarginalProfile):
        f = profile.focal
        vals = [1.0]
        for s in range(1, max_s + 1):
            top = rank_marginal_focal(profile.w, s + 1)
            if a == f:
                vals.append(math.comb(m - 1, s) * top)
            else:
                vals.append(math.comb(m - 2, s - 1) * (1 - top) / s + math.comb(m - 2, s) / (s + 1))
        return AggregatePlurality(a, m, tuple(vals))
    rankings, probs = profile_rankings(profile)
    beaten = m - 1 - positions(rankings)[:, a]
    vals = [float(probs @ np.array([math.comb(int(x), s) for x in beaten], float)) for s in range(max_s + 1)]
    return AggregatePlurality(a, m, tuple(vals))


def rank_distribution(P: AggregatePlurality, i: int) -> float:
    """P(rank of a = i) by binomial inversion of the full aggregate vector."""
    m = P.m
    if not 1 <= i <= m:
        raise DomainError(f"rank must lie in [1, {m}]")
    if not P.complete:
        raise DependencyError("rank inversion needs P_0..P_{m-1}")
    j = m - i
    return float(sum((-1) ** (k - j) * math.comb(k, j) * P.values[k] for k in range(j, m)))


def rank_distribution_vector(P: AggregatePlurality) -> np.ndarray:
    return np.array([rank_distribution(P, i) for i in range(1, P.m + 1)])


def anti_plurality(P: AggregatePlurality) -> float:
    """Probability that a is *not* ranked last."""
    if not P.complete:
        raise DependencyError("anti-plurality needs P_0..P_{m-1}")
    return float(1 - sum((-1) ** k * v for k, v in enumerate(P.values)))
