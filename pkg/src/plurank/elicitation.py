"""Planning and simulating the elicitation of plurality data.

Two query types are modelled. A *chain* over S asks one voter |S|-1 winner-
stays pairwise comparisons in a random order and records the survivor; a
*ranking* over S asks the voter to sort S, which reveals the top of every
subset of S at a cost of ``ceil(log2 |S|!)`` comparisons.

Sample sizes come from Hoeffding's inequality with a union bound over the
``l * C(m, l)`` entries of the degree-l slice.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DomainError, FeasibilityError, ResourceError
from .plurality import PluralityMatrix, empirical_from_counts, plurality_matrix, subsets_of_size
from .prefcore import MAX_ENUM_M, ExactProfile, Profile, RankMarginalProfile, positions, sample_voters


@dataclass(frozen=True)
class AccuracySpec:
    """Every entry within ``epsilon`` of the truth with probability at least ``1 - delta``."""

    epsilon: float
    delta: float

    def __post_init__(self):
        for name in ("epsilon", "delta"):
            x = getattr(self, name)
            if not 0 < x < 1:
                raise DomainError(f"{name} must lie in (0, 1), got {x}")


def _check_degree(m: int, l: int) -> None:
    if not 2 <= l <= m:
        raise DomainError(f"degree must lie in [2, {m}], got {l}")


def sample_budget(m: int, l: int, spec: AccuracySpec, population: int | None = None) -> tuple[int, int]:
    """``(Q, T)``: entry count of the degree-l slice and samples needed per entry.

    With ``population`` the count is sharpened for sampling without replacement.
    """
    _check_degree(m, l)
    Q = l * math.comb(m, l)
    T = math.ceil(math.log(2 * Q / spec.delta) / (2 * spec.epsilon**2))
    if population is not None:
        T = serfling_refine(T, population)
    return Q, T


def serfling_refine(T: int, n: int) -> int:
    """``ceil(T (n + 1) / (n + T))``, the finite-population version of ``T``."""
    if n < 1:
        raise DomainError("population size must be at least 1")
    return math.ceil(Fraction(T * (n + 1), n + T))


def ranking_cost(k: int) -> int:
    """``ceil(log2 k!)``: comparisons needed to sort k items in the worst case."""
    if k < 1:
        raise DomainError("k must be at least 1")
    return (math.factorial(k) - 1).bit_length()


@dataclass(frozen=True)
class ElicitationPlan:
    """A protocol with its query count ``N``, load ``lam`` and total budget ``B``.

    ``lam_main_text`` is the ``k log2 k`` order-of-magnitude cost, reported
    next to the exact sorting cost used for ``lam`` and ``B``.
    """

    kind: str
    m: int
    k: int
    l: int
    T: int
    N: int
    lam: int
    B: int
    Q: int
    spec: AccuracySpec | None = None

    @property
    def per_query(self) -> int:
        return self.lam

    @property
    def nominal_budget(self) -> float:
        """Budget before rounding ``N`` up to an integer."""
        return math.comb(self.m, self.l) * self.T * self.lam / math.comb(self.k, self.l)

    @property
    def lam_main_text(self) -> float:
        return self.k * math.log2(self.k)

    @property
    def label(self) -> str:
        return "chain" if self.kind == "chain" else f"ranking-{self.k}"

    def as_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "m": self.m,
            "k": self.k,
            "degree": self.l,
            "T": self.T,
            "N": self.N,
            "lambda": self.lam,
            "B": self.B,
            "Q": self.Q,
            "lambda_main_text": self.lam_main_text,
        }
        if self.spec is not None:
            out.update(epsilon=self.spec.epsilon, delta=self.spec.delta)
        return out


def plan_chain(m: int, l: int, spec: AccuracySpec) -> ElicitationPlan:
    Q, T = sample_budget(m, l, spec)
    N = math.comb(m, l) * T
    return ElicitationPlan("chain", m, l, l, T, N, l - 1, N * (l - 1), Q, spec)


def k_of_lambda(lam: int, l: int, m: int) -> int:
    """Largest ranking size in ``[l, m]`` whose sorting cost fits in ``lam``."""
    _check_degree(m, l)
    fits = [k for k in range(l, m + 1) if ranking_cost(k) <= lam]
    if not fits:
        raise FeasibilityError(f"no ranking protocol is feasible: sorting {l} items needs {ranking_cost(l)} > {lam}")
    return fits[-1]


def plan_ranking(m: int, l: int, lam_budget: int | None, spec: AccuracySpec, k: int | None = None) -> ElicitationPlan:
    """Ranking protocol with the largest size allowed by ``lam_budget`` (or an explicit ``k``)."""
    Q, T = sample_budget(m, l, spec)
    if k is None:
        if lam_budget is None:
            raise DomainError("give either a load budget or an explicit ranking size")
        k = k_of_lambda(lam_budget, l, m)
    elif not l <= k <= m:
        raise DomainError(f"ranking size must lie in [{l}, {m}]")
    elif lam_budget is not None and ranking_cost(k) > lam_budget:
        raise FeasibilityError(f"sorting {k} items needs {ranking_cost(k)} > {lam_budget}")
    N = -(-math.comb(m, l) * T // math.comb(k, l))
    lam = ranking_cost(k)
    return ElicitationPlan("ranking", m, k, l, T, N, lam, N * lam, Q, spec)


@dataclass(frozen=True)
class FrontierPoint:
    lam: int
    B: float
    plan: ElicitationPlan
    dominated: bool


def _dominated(p, others, tol=1e-9):
    return any(
        q[0] <= p[0] and q[1] <= p[1] * (1 + tol) and (q[0] < p[0] or q[1] < p[1] * (1 - tol))
        for q in others
    )


def pareto_frontier(m: int, l: int, spec: AccuracySpec) -> list[FrontierPoint]:
    """Chain point plus one ranking point per size ``k = l..m``, sorted by load.

    Budgets are the nominal (unrounded) values so that exact ties between
    protocols are visible.
    """
    plans = [plan_chain(m, l, spec)] + [plan_ranking(m, l, None, spec, k) for k in range(l, m + 1)]
    pts = [(p.lam, p.nominal_budget, p) for p in plans]
    out = [FrontierPoint(lam, B, p, _dominated((lam, B, p), pts)) for lam, B, p in pts]
    return sorted(out, key=lambda f: (f.lam, f.B, f.plan.kind != "chain", f.plan.k))


def choose_protocol(n: int, m: int, l: int, spec: AccuracySpec) -> ElicitationPlan:
    """Lowest-load protocol that a population of ``n`` voters can support.

    The chain when ``n >= C(m, l) T``; otherwise the smallest ranking size k
    with ``C(k, l) >= C(m, l) T / n``.
    """
    _, T = sample_budget(m, l, spec)
    need = math.comb(m, l) * T
    if n >= need:
        return plan_chain(m, l, spec)
    for k in range(l, m + 1):
        if math.comb(k, l) * n >= need:
            return plan_ranking(m, l, None, spec, k)
    raise FeasibilityError(f"{n} voters cannot support degree {l}; even full rankings need {math.ceil(need / math.comb(m, l))}")


@dataclass(frozen=True)
class LambdaCheck:
    ok: bool
    lam: int
    required: int
    message: str = ""


def validate_lambda(plan: ElicitationPlan) -> LambdaCheck:
    """Reject plans claiming degree ``l`` with fewer than ``l - 1`` comparisons per voter."""
    required = plan.l - 1
    if plan.lam < required:
        return LambdaCheck(False, plan.lam, required, f"degree {plan.l} needs a load of at least {required}, plan has {plan.lam}")
    return LambdaCheck(True, plan.lam, required)


# ---------------------------------------------------------------------------
# simulation


class _SubsetIndex:
    """Colex ranks of sorted subsets, for vectorised counting."""

    def __init__(self, m: int, k: int):
        self.m, self.k = m, k
        self.subsets = subsets_of_size(m, k)
        self.binom = np.array([[math.comb(n, i) for i in range(k + 1)] for n in range(m)], dtype=np.int64)
        ranks = self.rank(np.array(self.subsets, dtype=np.int64).reshape(-1, k))
        self.order = np.empty(len(self.subsets), dtype=np.int64)
        self.order[ranks] = np.arange(len(self.subsets))

    def rank(self, sorted_sets: np.ndarray) -> np.ndarray:
        cols = np.arange(1, self.k + 1)
        return self.binom[sorted_sets, cols].sum(axis=1)


def _voters(profile: Profile, N: int, rng, population):
    if population is None:
        return sample_voters(profile, N, rng)
    population = np.asarray(population)
    if N > len(population):
        raise ResourceError(f"population of {len(population)} voters exhausted by {N} queries")
    return population[rng.permutation(len(population))[:N]]


def _schedule(C: int, N: int, rng, schedule: str) -> np.ndarray:
    if schedule == "round_robin":
        return np.arange(N) % C
    if schedule == "random":
        return rng.integers(C, size=N)
    raise DomainError(f"unknown schedule {schedule!r}")


def _truth(profile: Profile, l: int) -> PluralityMatrix | None:
    if isinstance(profile, ExactProfile) and profile.m > MAX_ENUM_M:
        return None
    if isinstance(profile, (ExactProfile, RankMarginalProfile)):
        return plurality_matrix(profile, {l})
    return None


@dataclass
class SimulationReport:
    plan: ElicitationPlan | None
    matrix: PluralityMatrix
    max_error: float | None
    budget: int
    lam: int
    queries: int
    epsilon: float | None = None
    extra: dict = field(default_factory=dict)

    @property
    def covered(self) -> bool | None:
        if self.max_error is None or self.epsilon is None:
            return None
        return self.max_error <= self.epsilon

    def as_dict(self) -> dict:
        return {
            "plan": None if self.plan is None else self.plan.as_dict(),
            "max_error": self.max_error,
            "budget": self.budget,
            "lambda": self.lam,
            "queries": self.queries,
            "covered": self.covered,
        }


class _Accumulator:
    def __init__(self, m: int, degrees):
        self.m = m
        self.index = {k: _SubsetIndex(m, k) for k in degrees}
        self.counts = {k: np.zeros((len(ix.subsets), m)) for k, ix in self.index.items()}

    def add(self, items: np.ndarray, winners: np.ndarray) -> None:
        k = items.shape[1]
        ix = self.index[k]
        rows = ix.order[ix.rank(np.sort(items, axis=1))]
        np.add.at(self.counts[k], (rows, winners), 1.0)

    def matrix(self) -> PluralityMatrix:
        counts = {}
        for k, ix in self.index.items():
            arr = self.counts[k]
            counts[k] = {S: arr[r, list(S)] for r, S in enumerate(ix.subsets)}
        return empirical_from_counts(self.m, counts)


def _max_error(est: PluralityMatrix, truth: PluralityMatrix | None, l: int) -> float | None:
    if truth is None:
        return None
    worst = 0.0
    for S, row in truth.slice(l).items():
        got = est.slices.get(l, {}).get(S)
        if got is None:
            return math.inf
        worst = max(worst, float(np.max(np.abs(got - row))))
    return worst


def run_chain(
    profile: Profile,
    l: int,
    N: int,
    seed=None,
    schedule: str = "round_robin",
    population=None,
    plan: ElicitationPlan | None = None,
    epsilon: float | None = None,
) -> SimulationReport:
    """Simulate ``N`` chain queries on size-``l`` subsets.

    Each query takes a subset from the schedule, a fresh voter, and a uniformly
    random comparison order. The survivor after the first j items is recorded
    as a degree-j observation for every j = 2..l.
    """
    m = profile.m
    _check_degree(m, l)
    rng = np.random.default_rng(seed)
    subsets = np.array(subsets_of_size(m, l), dtype=np.int64).reshape(-1, l)
    which = _schedule(len(subsets), N, rng, schedule)
    voters = positions(_voters(profile, N, rng, population))
    order = np.argsort(rng.random((N, l)), axis=1)
    items = np.take_along_axis(subsets[which], order, axis=1)
    pos = np.take_along_axis(voters, items, axis=1)
    acc = _Accumulator(m, range(2, l + 1))
    for j in range(2, l + 1):
        best = np.argmin(pos[:, :j], axis=1)
        acc.add(items[:, :j], items[np.arange(N), best])
    est = acc.matrix()
    return SimulationReport(plan, est, _max_error(est, _truth(profile, l), l), N * (l - 1), l - 1, N, epsilon)


def run_ranking(
    profile: Profile,
    k: int,
    l: int,
    N: int,
    seed=None,
    schedule: str = "random",
    population=None,
    plan: ElicitationPlan | None = None,
    epsilon: float | None = None,
) -> SimulationReport:
    """Simulate ``N`` ranking queries of size ``k``, each updating all size-``l`` subsets."""
    m = profile.m
    _check_degree(m, l)
    if not l <= k <= m:
        raise DomainError(f"ranking size must lie in [{l}, {m}]")
    rng = np.random.default_rng(seed)
    subsets = np.array(subsets_of_size(m, k), dtype=np.int64).reshape(-1, k)
    which = _schedule(len(subsets), N, rng, schedule)
    voters = positions(_voters(profile, N, rng, population))
    S = subsets[which]
    pos = np.take_along_axis(voters, S, axis=1)
    acc = _Accumulator(m, [l])
    for combo in itertools.combinations(range(k), l):
        cols = list(combo)
        sub = S[:, cols]
        best = np.argmin(pos[:, cols], axis=1)
        acc.add(sub, sub[np.arange(N), best])
    est = acc.matrix()
    cost = ranking_cost(k)
    return SimulationReport(plan, est, _max_error(est, _truth(profile, l), l), N * cost, cost, N, epsilon)


def run_plan(profile: Profile, plan: ElicitationPlan, seed=None, **kw) -> SimulationReport:
    eps = plan.spec.epsilon if plan.spec else None
    if plan.kind == "chain":
        return run_chain(profile, plan.l, plan.N, seed, plan=plan, epsilon=eps, **kw)
    return run_ranking(profile, plan.k, plan.l, plan.N, seed, plan=plan, epsilon=eps, **kw)


def coverage(profile: Profile, plan: ElicitationPlan, trials: int, seed=0, **kw) -> float:
    """Fraction of seeded trials whose max entry error is within the plan's epsilon."""
    seeds = np.random.SeedSequence(seed).spawn(trials)
    hits = [run_plan(profile, plan, np.random.default_rng(s), **kw).covered for s in seeds]
    return float(np.mean(hits))


# ---------------------------------------------------------------------------
# selection bias of transitive inference


@dataclass(frozen=True)
class ChainBiasReport:
    true_p_ca: Fraction
    inferred: Fraction
    prefix: Fraction
    prefix_top: dict
    true_top: dict

    @property
    def bias(self) -> Fraction:
        return self.inferred - self.true_p_ca

    def as_dict(self) -> dict:
        return {
            "true_p_ca": float(self.true_p_ca),
            "inferred": float(self.inferred),
            "prefix": float(self.prefix),
            "bias": float(self.bias),
            "prefix_top": {k: float(v) for k, v in self.prefix_top.items()},
            "true_top": {k: float(v) for k, v in self.true_top.items()},
        }


def _closure(pairs: set) -> set:
    pairs = set(pairs)
    while True:
        extra = {(x, z) for x, y in pairs for y2, z in pairs if y == y2 and x != z} - pairs
        if not extra:
            return pairs
        pairs |= extra


def chain_bias_demo() -> ChainBiasReport:
    """Exhaustive 2 voter types x 6 orders run of a chain over {a, b, c}.

    Voters rank a > c > b or b > c > a with probability 1/2 each. Estimating
    ``p(c > a)`` from comparisons implied by transitivity, conditioned on the
    pair being resolved, gives 1/4 instead of 1/2; the survivor of the first
    comparison (a prefix winner) is unbiased.
    """
    a, b, c = 0, 1, 2
    voters = [(a, c, b), (b, c, a)]
    half, sixth = Fraction(1, 2), Fraction(1, 6)
    resolved = c_over_a = Fraction(0)
    pair_seen = pair_c = Fraction(0)
    top = {x: Fraction(0) for x in (a, b, c)}
    for voter in voters:
        rank = {x: i for i, x in enumerate(voter)}
        for tau in itertools.permutations((a, b, c)):
            w = half * sixth
            first = min(tau[:2], key=rank.__getitem__)
            loser = tau[1] if first == tau[0] else tau[0]
            final = min((first, tau[2]), key=rank.__getitem__)
            other = tau[2] if final == first else first
            known = _closure({(first, loser), (final, other)})
            if (c, a) in known or (a, c) in known:
                resolved += w
                c_over_a += w * ((c, a) in known)
            if set(tau[:2]) == {a, c}:
                pair_seen += w
                pair_c += w * (first == c)
            top[final] += w
    true_top = {a: half, b: half, c: Fraction(0)}
    return ChainBiasReport(half, c_over_a / resolved, pair_c / pair_seen, top, true_top)


# ---------------------------------------------------------------------------
# stopping-time data for the load and population plot


def stopping_times(m: int, l: int, k: int, T: int, trials: int, seed=0) -> np.ndarray:
    """Queries until every size-``l`` subset has ``T`` observations, random schedule.

    Each query draws a uniform size-``k`` subset (``k = l`` for chains) and
    observes every size-``l`` subset inside it.
    """
    big = subsets_of_size(m, k)
    idx = _SubsetIndex(m, l)
    inner = list(itertools.combinations(range(k), l))
    cover = np.array([[idx.order[idx.rank(np.array([[S[i] for i in c]]))[0]] for c in inner] for S in big])
    n_small = len(idx.subsets)
    rng = np.random.default_rng(seed)
    out = np.empty(trials, dtype=np.int64)
    base = int(math.ceil(n_small * T / len(inner)))
    for t in range(trials):
        length = max(2 * base, base + 1000)
        while True:
            q = rng.integers(len(big), size=length)
            seen = cover[q].ravel()
            qid = np.repeat(np.arange(length), len(inner))
            counts = np.bincount(seen, minlength=n_small)
            if counts.min() >= T:
                order = np.argsort(seen, kind="stable")
                starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
                out[t] = qid[order[starts + T - 1]].max() + 1
                break
            length *= 2
    return out


def fig3_rows(m: int, degrees, spec: AccuracySpec, trials: int = 50, seed=0, max_lambda: int | None = None) -> list[dict]:
    """For each degree and load, the budget-optimal protocol with its planned and simulated N."""
    rows = []
    seeds = np.random.SeedSequence(seed)
    for l in degrees:
        top = ranking_cost(m) if max_lambda is None else max_lambda
        best_by_plan = {}
        for lam in range(l - 1, top + 1):
            options = [plan_chain(m, l, spec)] + [
                plan_ranking(m, l, None, spec, k) for k in range(l, m + 1) if ranking_cost(k) <= lam
            ]
            best = min(options, key=lambda p: (p.nominal_budget, p.lam, p.kind != "chain"))
            key = (best.kind, best.k)
            if key not in best_by_plan:
                child = seeds.spawn(1)[0]
                best_by_plan[key] = stopping_times(m, l, best.k, best.T, trials, child)
            times = best_by_plan[key]
            rows.append(
                {
                    "degree": l,
                    "lambda": lam,
                    "N": best.N,
                    "protocol": best.label,
                    "percentile_5": float(np.percentile(times, 5)),
                    "percentile_95": float(np.percentile(times, 95)),
                }
            )
    return rows
