"""Disagreement measures and aggregation rules written in plurality-matrix form.

Every function here reads only the degree slices it needs. Level-2 measures
(agreement, Borda, tournament rules) touch the pairwise slice alone; rank
variance, divisiveness and the pair-conflict family also need degree 3;
positional rules need every degree.

Ties are always broken by the lexicographic order of alternatives, pairs or
rankings, and flagged on the returned :class:`RuleResult`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DegeneratePairError, DomainError, PositivityError, ResourceError
from .plurality import (
    PluralityMatrix,
    aggregate_vector,
    plurality_matrix,
    rank_distribution_vector,
)
from .prefcore import MAX_ENUM_M, Profile, all_rankings, positions

#: Scores closer than this are treated as tied.
TIE_TOL = 1e-12


def _as_matrix(source, degrees=None) -> PluralityMatrix:
    if isinstance(source, PluralityMatrix):
        return source
    if isinstance(source, Profile):
        return plurality_matrix(source, degrees)
    raise DomainError(f"expected a profile or plurality matrix, got {type(source).__name__}")


def _triple(matrix: PluralityMatrix, a: int, b: int, c: int) -> float:
    return matrix.p((a, b, c), a)


# ---------------------------------------------------------------------------
# level 2


def agreement_index(matrix: PluralityMatrix) -> float:
    """Mean of ``|2 p_xy(x) - 1|`` over unordered pairs."""
    matrix.require(2)
    vals = [abs(2 * row[0] - 1) for row in matrix.slices[2].values()]
    return float(np.mean(vals))


def borda(matrix: PluralityMatrix, a: int) -> float:
    """Borda score, the sum of a's pairwise proportions (equals m - E[rank])."""
    matrix.require(2)
    return float(sum(matrix.pair(a, b) for b in range(matrix.m) if b != a))


def borda_vector(matrix: PluralityMatrix) -> np.ndarray:
    return matrix.pairwise().sum(axis=1)


def kt_diversity(matrix: PluralityMatrix) -> float:
    """Expected Kendall-tau distance between two independent voters."""
    return generalized_polarization(matrix, lambda p: 2 * p * (1 - p))


def generalized_polarization(matrix: PluralityMatrix, f: Callable[[float], float]) -> float:
    """``sum f(p_xy(x))`` over unordered pairs ``x < y``."""
    matrix.require(2)
    return float(sum(f(float(row[0])) for row in matrix.slices[2].values()))


# ---------------------------------------------------------------------------
# level 3, single alternative


def rank_variance(matrix: PluralityMatrix, a: int) -> float:
    """Variance of a's rank from pairwise and triple data."""
    matrix.require(*range(2, min(3, matrix.m) + 1))
    others = [b for b in range(matrix.m) if b != a]
    p = {b: matrix.pair(a, b) for b in others}
    total = sum(q * (1 - q) for q in p.values())
    for b, c in itertools.combinations(others, 2):
        total += 2 * (_triple(matrix, a, b, c) - p[b] * p[c])
    return float(total)


def conditional_borda(matrix: PluralityMatrix, a: int, b: int) -> tuple[float, float]:
    """``(Bor(a | a > b), Bor(a | b > a))``; raises when either event is empty."""
    p = matrix.pair(a, b)
    if p <= 0 or p >= 1:
        raise PositivityError(f"p_{a}{b} = {p:g}; the pair is never a locus of disagreement")
    others = [c for c in range(matrix.m) if c not in (a, b)]
    wins = 1 + sum(_triple(matrix, a, b, c) for c in others) / p
    losses = sum(matrix.pair(a, c) - _triple(matrix, a, b, c) for c in others) / (1 - p)
    return float(wins), float(losses)


def _weighted_gaps(matrix, a, alpha, drop_degenerate):
    matrix.require(*range(2, min(3, matrix.m) + 1))
    vals = []
    for b in range(matrix.m):
        if b == a:
            continue
        try:
            win, lose = conditional_borda(matrix, a, b)
        except PositivityError:
            if drop_degenerate:
                continue
            raise
        p = matrix.pair(a, b)
        vals.append((p * (1 - p)) ** alpha * abs(win - lose))
    if not vals:
        raise PositivityError(f"alternative {a} has no split pair")
    return float(np.mean(vals))


def divisiveness(matrix: PluralityMatrix, a: int, drop_degenerate: bool = False) -> float:
    """Mean over opponents b of the gap between a's conditional Borda scores.

    With ``drop_degenerate`` the average skips opponents b with p_ab in {0, 1}
    instead of raising :class:`PositivityError`.
    """
    return _weighted_gaps(matrix, a, 0.0, drop_degenerate)


def alpha_divisiveness(matrix: PluralityMatrix, a: int, alpha: float, drop_degenerate: bool = False) -> float:
    """Divisiveness with each opponent weighted by ``(p_ab (1 - p_ab))**alpha``."""
    if alpha < 0:
        raise DomainError("alpha must be non-negative")
    return _weighted_gaps(matrix, a, alpha, drop_degenerate)


def divisiveness_kernel(matrix: PluralityMatrix, a: int) -> float:
    """Divisiveness via the kernel form ``|1 + K_b / (p (1 - p))|``.

    ``K_b = sum_c (p_abc(a) - p_ab p_ac)``. Kept to cross-check the expanded form.
    """
    others = [c for c in range(matrix.m) if c != a]
    vals = []
    for b in others:
        p = matrix.pair(a, b)
        if p <= 0 or p >= 1:
            raise PositivityError(f"p_{a}{b} = {p:g}")
        K = sum(_triple(matrix, a, b, c) - p * matrix.pair(a, c) for c in others if c != b)
        vals.append(abs(1 + K / (p * (1 - p))))
    return float(np.mean(vals))


# ---------------------------------------------------------------------------
# pair conflict


@dataclass(frozen=True)
class PairConflictReport:
    """Expected rank gap between two alternatives and derived conflict scores.

    ``delta_plus`` / ``delta_minus`` are ``None`` when their conditioning event
    is empty. ``phi`` and ``gamma`` raise :class:`DegeneratePairError` when
    undefined.
    """

    pair: tuple
    p: float
    delta: float
    bor_gap: float
    delta_plus: float | None
    delta_minus: float | None
    alpha: float
    beta: float
    scores: dict = field(default_factory=dict)

    @property
    def phi(self) -> float:
        if self.delta <= 0:
            raise DegeneratePairError(f"pair {self.pair} has zero expected gap")
        return abs(self.bor_gap) / self.delta

    @property
    def gamma(self) -> float:
        lo, hi = self.delta_plus, self.delta_minus
        if not lo or not hi:
            raise DegeneratePairError(f"pair {self.pair} lacks two positive conditional gaps")
        return min(lo / hi, hi / lo)

    def as_dict(self) -> dict:
        out = {
            "pair": list(self.pair),
            "p": self.p,
            "delta": self.delta,
            "delta_plus": self.delta_plus,
            "delta_minus": self.delta_minus,
            "alpha": self.alpha,
            "beta": self.beta,
        }
        for name in ("phi", "gamma"):
            try:
                out[name] = getattr(self, name)
            except DegeneratePairError:
                out[name] = None
        out.update(self.scores)
        return out


def expected_gap(matrix: PluralityMatrix, a: int, b: int) -> float:
    """``E|r_a - r_b|`` from Borda scores and the triple entries of third parties."""
    others = [c for c in range(matrix.m) if c not in (a, b)]
    third = sum(matrix.p((a, b, c), c) for c in others)
    return float(2 * (matrix.m - 1) - borda(matrix, a) - borda(matrix, b) - 2 * third)


def pair_conflict(matrix: PluralityMatrix, a: int, b: int, power: float = 1.0) -> PairConflictReport:
    """Conflict report for the pair ``(a, b)``; ``power`` is the p-MaxPolar exponent."""
    if a == b:
        raise DomainError("a pair needs two distinct alternatives")
    matrix.require(*range(2, min(3, matrix.m) + 1))
    p = matrix.pair(a, b)
    delta = expected_gap(matrix, a, b)
    gap = borda(matrix, a) - borda(matrix, b)
    plus = (delta + gap) / (2 * p) if p > 0 else None
    minus = (delta - gap) / (2 * (1 - p)) if p < 1 else None
    scores = {
        "MaxSum": delta + (1 - 2 * p) * gap,
        "MaxNash": delta**2 - gap**2,
        "MaxSwap": delta - abs(gap),
        "pMaxPolar": min(p, 1 - p) * delta**power,
    }
    return PairConflictReport(
        pair=(a, b),
        p=p,
        delta=delta,
        bor_gap=gap,
        delta_plus=plus,
        delta_minus=minus,
        alpha=2 * min(p, 1 - p),
        beta=delta / (matrix.m - 1),
        scores=scores,
    )


CONFLICT_RULES = ("MaxSum", "MaxNash", "MaxSwap", "pMaxPolar")


# ---------------------------------------------------------------------------
# rules


@dataclass(frozen=True)
class RuleResult:
    """Outcome of a rule: the selected item, all scores, and tie information.

    ``winner`` is an alternative index, a pair, or a ranking depending on the
    rule. ``tied`` lists every item sharing the extremal score.
    """

    rule: str
    winner: object
    scores: dict
    tied: tuple = ()
    skipped: tuple = ()
    broken_tie: bool = False

    @property
    def ties(self) -> bool:
        return len(self.tied) > 1 or self.broken_tie


def _select(rule, scores: dict, maximize=True, skipped=()) -> RuleResult:
    sign = 1 if maximize else -1
    best = max(sign * s for s in scores.values())
    tied = tuple(sorted(k for k, s in scores.items() if sign * s >= best - TIE_TOL))
    return RuleResult(rule, tied[0], dict(scores), tied, tuple(skipped))


def most_conflictual_pair(matrix: PluralityMatrix, rule: str = "MaxSum", power: float = 1.0) -> RuleResult:
    """Pair maximising a conflict score; pairs whose report fails are skipped."""
    if rule not in CONFLICT_RULES:
        raise DomainError(f"rule must be one of {CONFLICT_RULES}")
    scores, skipped = {}, []
    for a, b in itertools.combinations(range(matrix.m), 2):
        try:
            scores[(a, b)] = pair_conflict(matrix, a, b, power).scores[rule]
        except DegeneratePairError:
            skipped.append((a, b))
    if not scores:
        raise DegeneratePairError("no pair admits a conflict score")
    return _select(rule, scores, True, skipped)


def copeland_scores(matrix: PluralityMatrix) -> dict:
    P = matrix.pairwise()
    out = {}
    for a in range(matrix.m):
        row = np.delete(P[a], a)
        out[a] = int(np.sum(row > 0.5 + TIE_TOL) - np.sum(row < 0.5 - TIE_TOL))
    return out


def minimax_scores(matrix: PluralityMatrix) -> dict:
    P = matrix.pairwise()
    return {a: float(np.min(np.delete(P[a], a))) for a in range(matrix.m)}


def _ranking_table(m: int) -> np.ndarray:
    if m > MAX_ENUM_M:
        raise ResourceError(f"brute force over rankings needs m <= {MAX_ENUM_M}")
    return all_rankings(m)


def _best_ranking(rule, rankings, values, maximize) -> RuleResult:
    sign = 1 if maximize else -1
    best = np.max(sign * values)
    idx = np.flatnonzero(sign * values >= best - 1e-9)
    tied = tuple(sorted(tuple(int(x) for x in rankings[i]) for i in idx))
    scores = {tuple(int(x) for x in rankings[i]): float(values[i]) for i in idx}
    return RuleResult(rule, tied[0], scores, tied)


def kemeny(matrix: PluralityMatrix) -> RuleResult:
    """Ranking maximising the total pairwise support of its ordered pairs.

    ``scores`` holds the objective for the optimal ranking(s) only.
    """
    matrix.require(2)
    rankings = _ranking_table(matrix.m)
    P = matrix.pairwise()
    values = np.zeros(len(rankings))
    for i, j in itertools.combinations(range(matrix.m), 2):
        values += P[rankings[:, i], rankings[:, j]]
    return _best_ranking("Kemeny", rankings, values, True)


def tournament_rules(matrix: PluralityMatrix) -> dict[str, RuleResult]:
    """Copeland, Minimax and Kemeny; Kemeny is omitted when m > 8."""
    out = {
        "Copeland": _select("Copeland", copeland_scores(matrix)),
        "Minimax": _select("Minimax", minimax_scores(matrix)),
    }
    if matrix.m <= MAX_ENUM_M:
        out["Kemeny"] = kemeny(matrix)
    return out


def kwise_kemeny(source, k: int) -> RuleResult:
    """Ranking minimising the total top-disagreement over all sets of size 2..k."""
    m = source.m
    if m > 7:
        raise ResourceError("k-wise Kemeny brute force needs m <= 7")
    if not 2 <= k <= m:
        raise DomainError(f"k must lie in [2, {m}]")
    matrix = _as_matrix(source, range(2, k + 1))
    matrix.require(*range(2, k + 1))
    rankings = _ranking_table(m)
    pos = positions(rankings)
    loss = np.zeros(len(rankings))
    for size in range(2, k + 1):
        for S, row in matrix.slices[size].items():
            top = np.argmin(pos[:, list(S)], axis=1)
            loss += 1 - row[top]
    return _best_ranking(f"{k}-wise Kemeny", rankings, loss, False)


POSITIONAL_RULES = ("Plurality", "AntiPlurality", "kApproval", "Bucklin", "STV")


def rank_distributions(matrix: PluralityMatrix) -> np.ndarray:
    """``(m, m)`` array: row a is the law of a's rank, from aggregate plurality."""
    matrix.require(*range(2, matrix.m + 1))
    return np.array([rank_distribution_vector(aggregate_vector(matrix, a)) for a in range(matrix.m)])


def _bucklin(law: np.ndarray) -> RuleResult:
    cum = np.cumsum(law, axis=1)
    depth = np.argmax(cum >= 0.5 - TIE_TOL, axis=1) + 1
    d = int(depth.min())
    cands = [a for a in range(len(law)) if depth[a] == d]
    mass = {a: float(cum[a, d - 1]) for a in cands}
    top = max(mass.values())
    tied = tuple(a for a in cands if mass[a] >= top - TIE_TOL)
    return RuleResult("Bucklin", tied[0], {a: int(depth[a]) for a in range(len(law))}, tied)


def stv(matrix: PluralityMatrix) -> RuleResult:
    """Repeatedly drop the alternative least often on top of the remaining set.

    Ties for elimination go against the larger index. ``scores[a]`` is the
    round in which ``a`` left (the winner gets ``m``).
    """
    alive = list(range(matrix.m))
    out, ties = {}, False
    for rnd in range(1, matrix.m):
        row = matrix.row(alive)
        low = row.min()
        losers = [x for x, p in zip(alive, row) if p <= low + TIE_TOL]
        ties = ties or len(losers) > 1
        out[losers[-1]] = rnd
        alive.remove(losers[-1])
    out[alive[0]] = matrix.m
    return RuleResult("STV", alive[0], out, (alive[0],), broken_tie=ties)


def positional_rules(source, k: int = 2) -> dict[str, RuleResult]:
    """Plurality, AntiPlurality, k-Approval, Bucklin and STV from the full matrix."""
    matrix = _as_matrix(source)
    m = matrix.m
    if not 1 <= k <= m:
        raise DomainError(f"k must lie in [1, {m}]")
    law = rank_distributions(matrix)
    return {
        "Plurality": _select("Plurality", {a: float(law[a, 0]) for a in range(m)}),
        "AntiPlurality": _select("AntiPlurality", {a: float(1 - law[a, -1]) for a in range(m)}),
        "kApproval": _select(f"{k}-Approval", {a: float(law[a, :k].sum()) for a in range(m)}),
        "Bucklin": _bucklin(law),
        "STV": stv(matrix),
    }


# ---------------------------------------------------------------------------
# reporting

LEVELS = {
    "agreement": 2,
    "borda": 2,
    "kt_diversity": 2,
    "variance": 3,
    "divisiveness": 3,
    "alpha_divisiveness": 3,
}


@dataclass(frozen=True)
class MeasureRecord:
    measure: str
    value: float
    level: int
    alt: object = None
    pair: tuple | None = None
    ties: bool = False

    def as_dict(self) -> dict:
        out = {"measure": self.measure}
        if self.pair is not None:
            out["pair"] = list(self.pair)
        elif self.alt is not None:
            out["alt"] = self.alt
        out.update(value=self.value, level=self.level, ties=self.ties)
        return out


def summary(matrix: PluralityMatrix, a: int, label=None) -> list[MeasureRecord]:
    """Agreement, Borda, variance and divisiveness records for one alternative."""
    label = a if label is None else label
    recs = [
        MeasureRecord("agreement", agreement_index(matrix), 2),
        MeasureRecord("borda", borda(matrix, a), 2, label),
        MeasureRecord("variance", rank_variance(matrix, a), 3, label),
    ]
    try:
        recs.append(MeasureRecord("divisiveness", divisiveness(matrix, a), 3, label))
    except PositivityError:
        recs.append(MeasureRecord("divisiveness", math.nan, 3, label))
    return recs
