"""Brute-force ground truth by enumerating rankings.

Everything here is evaluated literally from rank variables, with no use of the
plurality-matrix shortcuts in :mod:`plurank.plurality` or
:mod:`plurank.measures`. The tests compare the two code paths.

Rank-marginal profiles are either expanded into an explicit table (m <= 8)
or handled through :class:`RankLaw`, which uses the family's product
structure (focal rank law times a uniform fill of the other positions).
"""

from __future__ import annotations

import builtins
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PositivityError, ResourceError
from .prefcore import (
    MAX_ENUM_M,
    ExactProfile,
    Profile,
    RankMarginalProfile,
    SampledProfile,
    all_rankings,
)


@dataclass(frozen=True, eq=False)
class EnumerationTable:
    """Rankings with probabilities and cached 1-based rank vectors.

    ``ranks[i, a]`` is the rank of ``a`` in ``rankings[i]``. ``beaten[i, a]``
    is the number of alternatives ``a`` beats there.
    """

    m: int
    rankings: np.ndarray
    probs: np.ndarray
    ranks: np.ndarray

    @property
    def beaten(self) -> np.ndarray:
        return self.m - self.ranks

    def expect(self, values: np.ndarray, mask: np.ndarray | None = None) -> float:
        """Expectation of a per-ranking value, optionally conditioned on ``mask``."""
        if mask is None:
            return float(self.probs @ values)
        mass = float(self.probs @ mask)
        if mass <= 0:
            raise PositivityError("conditioning event has probability zero")
        return float(self.probs @ (values * mask)) / mass

    def prob(self, mask: np.ndarray) -> float:
        return float(self.probs @ mask)

    def prefers(self, a: int, b: int) -> np.ndarray:
        return self.ranks[:, a] < self.ranks[:, b]


def _table(m: int, rankings: np.ndarray, probs: np.ndarray) -> EnumerationTable:
    rankings = np.asarray(rankings, dtype=np.int64)
    ranks = np.empty_like(rankings)
    rows = np.arange(rankings.shape[0])[:, None]
    ranks[rows, rankings] = np.arange(1, m + 1)
    return EnumerationTable(m, rankings, np.asarray(probs, float), ranks)


def enumerate(profile: Profile) -> EnumerationTable:  # noqa: A001 - mirrors the operation name
    """Exact distribution over rankings for ``profile`` (m <= 8)."""
    m = profile.m
    if m > MAX_ENUM_M:
        raise ResourceError(f"enumeration over {m}! rankings is too large (limit m <= {MAX_ENUM_M})")
    if isinstance(profile, RankMarginalProfile):
        rankings = all_rankings(m)
        focal_rank = np.argmax(rankings == profile.focal, axis=1)
        probs = profile.w[focal_rank] / math.factorial(m - 1)
        keep = probs > 0
        return _table(m, rankings[keep], probs[keep])
    if isinstance(profile, SampledProfile):
        return _table(m, profile.rankings, profile.weights / profile.weights.sum())
    if isinstance(profile, ExactProfile):
        return _table(m, profile.rankings, profile.probs)
    raise DomainError(f"cannot enumerate {type(profile).__name__}")


# ---------------------------------------------------------------------------
# definitional measures on a table


def p_S(table: EnumerationTable, S, a: int) -> float:
    S = list(S)
    if a not in S:
        raise DomainError(f"{a} not in {S}")
    top = np.array(S)[np.argmin(table.ranks[:, S], axis=1)]
    return table.prob(top == a)


def aggregate(table: EnumerationTable, a: int, s: int) -> float:
    """Sum of a's plurality over size-(s+1) sets, by summing subsets one by one."""
    others = [x for x in range(table.m) if x != a]
    return sum(p_S(table, (a,) + T, a) for T in itertools.combinations(others, s))


def rank_law(table: EnumerationTable, a: int) -> np.ndarray:
    return np.array([table.prob(table.ranks[:, a] == i) for i in range(1, table.m + 1)])


def borda(table: EnumerationTable, a: int) -> float:
    return table.m - table.expect(table.ranks[:, a])


def conditional_borda(table: EnumerationTable, a: int, mask: np.ndarray) -> float:
    return table.m - table.expect(table.ranks[:, a], mask)


def central_moment(table: EnumerationTable, a: int, k: int) -> float:
    r = table.ranks[:, a].astype(float)
    return table.expect((r - table.expect(r)) ** k)


def variance(table: EnumerationTable, a: int) -> float:
    return central_moment(table, a, 2)


def _require_split(table: EnumerationTable, a: int, b: int) -> float:
    p = table.prob(table.prefers(a, b))
    if p <= 0 or p >= 1:
        raise PositivityError(f"pair ({a}, {b}) is unanimous")
    return p


def divisiveness(table: EnumerationTable, a: int, alpha: float = 0.0) -> float:
    """Average over b of weight * |Bor(a | a > b) - Bor(a | b > a)|."""
    total = 0.0
    for b in range(table.m):
        if b == a:
            continue
        p = _require_split(table, a, b)
        win = table.prefers(a, b)
        gap = abs(conditional_borda(table, a, win) - conditional_borda(table, a, ~win))
        total += (p * (1 - p)) ** alpha * gap
    return total / (table.m - 1)


def agreement(table: EnumerationTable) -> float:
    vals = [abs(2 * table.prob(table.prefers(a, b)) - 1) for a, b in itertools.combinations(range(table.m), 2)]
    return float(np.mean(vals))


def kt_diversity(table: EnumerationTable) -> float:
    """Expected Kendall-tau distance between two independent voters."""
    out = 0.0
    for a, b in itertools.combinations(range(table.m), 2):
        p = table.prob(table.prefers(a, b))
        out += 2 * p * (1 - p)
    return out


def pair_quantities(table: EnumerationTable, a: int, b: int, power: float = 1.0) -> dict:
    """Expected rank gaps, ratios and conflict scores for the pair ``(a, b)``."""
    gap = np.abs(table.ranks[:, a] - table.ranks[:, b]).astype(float)
    win = table.prefers(a, b)
    p = table.prob(win)
    delta = table.expect(gap)
    bor_a, bor_b = borda(table, a), borda(table, b)
    diff = bor_a - bor_b
    out = {
        "p": p,
        "delta": delta,
        "alpha": 2 * min(p, 1 - p),
        "beta": delta / (table.m - 1),
        "maxsum": delta + (1 - 2 * p) * diff,
        "maxnash": delta**2 - diff**2,
        "maxswap": delta - abs(diff),
        "pmaxpolar": min(p, 1 - p) * delta**power,
    }
    if 0 < p < 1:
        out["delta_plus"] = table.expect(gap, win)
        out["delta_minus"] = table.expect(gap, ~win)
        if out["delta_plus"] > 0 and out["delta_minus"] > 0:
            ratio = out["delta_plus"] / out["delta_minus"]
            out["gamma"] = min(ratio, 1 / ratio)
    if delta > 0:
        out["phi"] = abs(diff) / delta
    return out


# ---------------------------------------------------------------------------
# rules


def _kendall(table: EnumerationTable, order: tuple) -> float:
    """Expected number of pairs a voter orders differently from ``order``."""
    pos = np.empty(table.m, dtype=np.int64)
    pos[list(order)] = np.arange(table.m)
    mine = pos[:, None] < pos[None, :]
    voters = table.ranks[:, :, None] < table.ranks[:, None, :]
    disagree = (voters != mine[None]).sum(axis=(1, 2)) // 2
    return table.expect(disagree.astype(float))


def kemeny(table: EnumerationTable) -> tuple:
    """Ranking minimising expected Kendall-tau distance (lexicographic tie-break)."""
    if table.m > MAX_ENUM_M:
        raise ResourceError("Kemeny brute force needs m <= 8")
    best, best_val = None, math.inf
    for order in itertools.permutations(range(table.m)):
        val = _kendall(table, order)
        if val < best_val - 1e-12:
            best, best_val = order, val
    return best


def kwise_kemeny(table: EnumerationTable, k: int) -> tuple:
    """Ranking minimising expected top-disagreements over all sets of size 2..k."""
    m = table.m
    subsets = [S for size in range(2, k + 1) for S in itertools.combinations(range(m), size)]
    tops = {S: np.array(S)[np.argmin(table.ranks[:, list(S)], axis=1)] for S in subsets}
    best, best_val = None, math.inf
    for order in itertools.permutations(range(m)):
        pos = {x: i for i, x in builtins.enumerate(order)}
        val = sum(table.prob(tops[S] != min(S, key=pos.__getitem__)) for S in subsets)
        if val < best_val - 1e-12:
            best, best_val = order, val
    return best


def copeland(table: EnumerationTable, a: int) -> int:
    score = 0
    for b in range(table.m):
        if b != a:
            p = table.prob(table.prefers(a, b))
            score += (p > 0.5) - (p < 0.5)
    return score


def minimax(table: EnumerationTable, a: int) -> float:
    return min(table.prob(table.prefers(a, b)) for b in range(table.m) if b != a)


def positional(table: EnumerationTable, a: int, rule: str, k: int = 1):
    law = rank_law(table, a)
    if rule == "plurality":
        return law[0]
    if rule == "antiplurality":
        return 1 - law[-1]
    if rule == "kapproval":
        return law[:k].sum()
    if rule == "bucklin":
        cum = np.cumsum(law)
        return int(np.argmax(cum >= 0.5 - 1e-12)) + 1
    raise DomainError(f"unknown positional rule {rule}")


def stv(table: EnumerationTable) -> int:
    alive = list(range(table.m))
    while len(alive) > 1:
        shares = [p_S(table, alive, x) for x in alive]
        low = min(shares)
        loser = max(x for x, s in zip(alive, shares) if s <= low + 1e-12)
        alive.remove(loser)
    return alive[0]


# ---------------------------------------------------------------------------
# analytic rank-marginal path


@dataclass(frozen=True)
class RankLaw:
    """Rank-law measures for a rank-marginal profile at any m.

    Given the focal rank ``j``, a fixed other alternative sits uniformly on the
    remaining ``m - 1`` positions, so it ranks below the focal one with
    probability ``(m - j)/(m - 1)``.
    """

    profile: RankMarginalProfile

    @property
    def m(self) -> int:
        return self.profile.m

    def law(self, a: int) -> np.ndarray:
        m, w = self.m, self.profile.w
        if a == self.profile.focal:
            return np.array(w, float)
        return (1 - np.asarray(w, float)) / (m - 1)

    def moment(self, a: int, k: int) -> float:
        r = np.arange(1, self.m + 1)
        law = self.law(a)
        mu = law @ r
        return float(law @ (r - mu) ** k)

    def variance(self, a: int) -> float:
        return self.moment(a, 2)

    def borda(self, a: int) -> float:
        return float(self.m - self.law(a) @ np.arange(1, self.m + 1))

    def focal_pair(self) -> float:
        """Probability that the focal alternative beats a fixed other one."""
        m = self.m
        j = np.arange(1, m + 1)
        return float(self.profile.w @ ((m - j) / (m - 1)))

    def agreement(self) -> float:
        m = self.m
        p = self.focal_pair()
        return (m - 1) * abs(2 * p - 1) / math.comb(m, 2)

    def divisiveness(self, a: int, alpha: float = 0.0) -> float:
        """Divisiveness of the focal alternative (the only non-trivial case needed)."""
        if a != self.profile.focal:
            raise DomainError("the rank-law path covers the focal alternative only")
        m, w = self.m, self.profile.w
        j = np.arange(1, m + 1)
        up = w * (m - j) / (m - 1)
        down = w * (j - 1) / (m - 1)
        p = up.sum()
        if p <= 0 or p >= 1:
            raise PositivityError("focal alternative is never split against its opponents")
        gap = abs(up @ j / p - down @ j / (1 - p))
        return float((p * (1 - p)) ** alpha * gap)


# ---------------------------------------------------------------------------
# dispatcher

_TABLE_MEASURES = {
    "p_S": lambda t, S, a: p_S(t, S, a),
    "P_s": lambda t, a, s: aggregate(t, a, s),
    "rank": lambda t, a, i: float(rank_law(t, a)[i - 1]),
    "borda": borda,
    "var": variance,
    "moment": central_moment,
    "div": lambda t, a: divisiveness(t, a, 0.0),
    "alpha_div": divisiveness,
    "agreement": agreement,
    "kt_diversity": kt_diversity,
    "pair": pair_quantities,
    "copeland": copeland,
    "minimax": minimax,
    "kemeny": kemeny,
    "kwise_kemeny": kwise_kemeny,
    "positional": positional,
    "stv": stv,
}

_LAW_MEASURES = {
    "borda": RankLaw.borda,
    "var": RankLaw.variance,
    "moment": RankLaw.moment,
    "div": lambda law, a: law.divisiveness(a, 0.0),
    "alpha_div": RankLaw.divisiveness,
    "agreement": RankLaw.agreement,
    "rank": lambda law, a, i: float(law.law(a)[i - 1]),
}

MEASURE_IDS = tuple(sorted(_TABLE_MEASURES))


def brute(measure_id: str, source, *args):
    """Evaluate ``measure_id`` definitionally.

    ``source`` is an :class:`EnumerationTable`, a :class:`RankLaw`, or any
    profile (rank-marginal profiles with m > 8 use the rank-law path).
    """
    if isinstance(source, RankMarginalProfile) and source.m > MAX_ENUM_M:
        source = RankLaw(source)
    elif isinstance(source, Profile):
        source = enumerate(source)
    table = _LAW_MEASURES if isinstance(source, RankLaw) else _TABLE_MEASURES
    if measure_id not in table:
        raise DomainError(f"unknown or unsupported oracle measure {measure_id!r}")
    return table[measure_id](source, *args)
