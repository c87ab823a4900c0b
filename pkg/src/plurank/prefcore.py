"""Alternatives, strict rankings, preference profiles and their generators.

A ranking is a tuple of alternative indices, most preferred first. Arrays of
rankings have shape ``(n, m)`` with the same convention, one ranking per row.

Three profile representations are supported:

* :class:`ExactProfile` -- an explicit probability table over rankings;
* :class:`SampledProfile` -- a weighted list of voters;
* :class:`RankMarginalProfile` -- a focal alternative whose rank follows a
  given law while the other alternatives fill the remaining positions
  uniformly at random.
"""

from __future__ import annotations

import itertools
import math
import string
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DomainError, ResourceError, UnsupportedError

#: Largest m for which all m! rankings are enumerated.
MAX_ENUM_M = 8

_SUM_TOL = 1e-12


def default_labels(m: int) -> tuple[str, ...]:
    if m <= 26:
        return tuple(string.ascii_lowercase[:m])
    return tuple(f"x{i}" for i in range(m))


@dataclass(frozen=True)
class AlternativeSet:
    """Ordered, duplicate-free alternative labels."""

    labels: tuple

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if len(set(labels)) != len(labels):
            raise DomainError("alternative labels must be pairwise distinct")
        if len(labels) < 2:
            raise DomainError("at least two alternatives are required")

    @classmethod
    def of_size(cls, m: int) -> "AlternativeSet":
        return cls(default_labels(m))

    @property
    def m(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        """Index of ``label``; integer-like strings are accepted as indices."""
        if label in self.labels:
            return self.labels.index(label)
        try:
            i = int(label)
        except (TypeError, ValueError):
            raise DomainError(f"unknown alternative {label!r}") from None
        if not 0 <= i < self.m:
            raise DomainError(f"alternative index {i} out of range for m={self.m}")
        return i

    def label(self, i: int):
        return self.labels[i]


# ---------------------------------------------------------------------------
# rankings


def as_ranking(order: Iterable[int], m: int | None = None) -> tuple[int, ...]:
    """Validate ``order`` as a permutation of ``range(m)`` and return it as a tuple."""
    r = tuple(int(x) for x in order)
    if m is None:
        m = len(r)
    if len(r) != m or sorted(r) != list(range(m)):
        raise DomainError(f"{r} is not a permutation of 0..{m - 1}")
    return r


def rank_of(ranking: Sequence[int], a: int) -> int:
    """1-based rank of ``a``: one plus the number of alternatives preferred to it."""
    m = len(ranking)
    if not 0 <= a < m:
        raise DomainError(f"alternative index {a} out of range for m={m}")
    return list(ranking).index(a) + 1


def restrict(ranking: Sequence[int], S: Iterable[int]) -> tuple[int, ...]:
    """Restriction of ``ranking`` to ``S``, relative order preserved."""
    S = set(S)
    if not S:
        raise DomainError("cannot restrict a ranking to an empty set")
    if not S.issubset(ranking):
        raise DomainError(f"{sorted(S - set(ranking))} not in ranking")
    return tuple(x for x in ranking if x in S)


def positions(rankings: np.ndarray) -> np.ndarray:
    """Inverse permutations: ``pos[i, a]`` is the 0-based position of ``a`` in row ``i``."""
    rankings = np.asarray(rankings)
    n, m = rankings.shape
    pos = np.empty_like(rankings)
    pos[np.arange(n)[:, None], rankings] = np.arange(m)
    return pos


def all_rankings(m: int) -> np.ndarray:
    """All m! rankings in lexicographic order."""
    if m > MAX_ENUM_M:
        raise ResourceError(
            f"enumerating {m}! rankings is infeasible (limit m <= {MAX_ENUM_M}); sample instead"
        )
    return np.array(list(itertools.permutations(range(m))), dtype=np.int64).reshape(-1, m)


def is_single_peaked(ranking: Sequence[int], axis: Sequence[int]) -> bool:
    """True when every top-j set of ``ranking`` is contiguous on ``axis``."""
    where = {a: i for i, a in enumerate(axis)}
    lo = hi = where[ranking[0]]
    for a in ranking[1:]:
        i = where[a]
        if i == lo - 1:
            lo = i
        elif i == hi + 1:
            hi = i
        else:
            return False
    return True


def _check_rankings(rankings: np.ndarray) -> None:
    if rankings.ndim != 2 or rankings.shape[1] < 2:
        raise DomainError("rankings must be a 2-d array with at least two columns")
    m = rankings.shape[1]
    if not np.array_equal(np.sort(rankings, axis=1), np.broadcast_to(np.arange(m), rankings.shape)):
        raise DomainError("every row must be a permutation of 0..m-1")


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


# ---------------------------------------------------------------------------
# profiles


class Profile:
    """Common base of the three profile representations."""

    alternatives: AlternativeSet

    @property
    def m(self) -> int:
        return self.alternatives.m


@dataclass(frozen=True, eq=False)
class ExactProfile(Profile):
    """Explicit distribution: ``probs[i]`` is the probability of ``rankings[i]``."""

    rankings: np.ndarray
    probs: np.ndarray
    alternatives: AlternativeSet = None

    def __post_init__(self):
        rankings = _frozen(self.rankings, np.int64)
        probs = _frozen(self.probs, float)
        _check_rankings(rankings)
        if probs.shape != (rankings.shape[0],):
            raise DomainError("one probability per ranking is required")
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > _SUM_TOL:
            raise DomainError("probabilities must be non-negative and sum to 1")
        object.__setattr__(self, "rankings", rankings)
        object.__setattr__(self, "probs", probs)
        if self.alternatives is None:
            object.__setattr__(self, "alternatives", AlternativeSet.of_size(rankings.shape[1]))
        elif self.alternatives.m != rankings.shape[1]:
            raise DomainError("alternative set size does not match rankings")

    @classmethod
    def from_mapping(cls, mapping: Mapping[Sequence[int], float], alternatives=None) -> "ExactProfile":
        items = [(as_ranking(r), float(p)) for r, p in mapping.items()]
        return cls(np.array([r for r, _ in items]), np.array([p for _, p in items]), alternatives)

    def as_dict(self) -> dict[tuple[int, ...], float]:
        out: dict[tuple[int, ...], float] = {}
        for r, p in zip(self.rankings, self.probs):
            key = tuple(int(x) for x in r)
            out[key] = out.get(key, 0.0) + float(p)
        return out


@dataclass(frozen=True, eq=False)
class SampledProfile(Profile):
    """Weighted voters; ``weights`` need not be normalised."""

    rankings: np.ndarray
    weights: np.ndarray = None
    alternatives: AlternativeSet = None

    def __post_init__(self):
        rankings = _frozen(self.rankings, np.int64)
        _check_rankings(rankings)
        n = rankings.shape[0]
        weights = np.ones(n) if self.weights is None else self.weights
        weights = _frozen(weights, float)
        if weights.shape != (n,):
            raise DomainError("one weight per voter is required")
        if np.any(weights < 0) or not weights.sum() > 0:
            raise DomainError("weights must be non-negative with positive total")
        object.__setattr__(self, "rankings", rankings)
        object.__setattr__(self, "weights", weights)
        if self.alternatives is None:
            object.__setattr__(self, "alternatives", AlternativeSet.of_size(rankings.shape[1]))
        elif self.alternatives.m != rankings.shape[1]:
            raise DomainError("alternative set size does not match rankings")

    @property
    def n(self) -> int:
        return self.rankings.shape[0]

    @property
    def probs(self) -> np.ndarray:
        return self.weights / self.weights.sum()


@dataclass(frozen=True, eq=False)
class RankMarginalProfile(Profile):
    """Focal alternative ranked ``j+1`` with probability ``w[j]``; others uniform."""

    focal: int
    w: np.ndarray
    alternatives: AlternativeSet = None

    def __post_init__(self):
        w = _frozen([float(x) for x in self.w], float)
        if w.ndim != 1 or w.size < 2:
            raise DomainError("w must be a vector of length m >= 2")
        if np.any(w < 0) or abs(w.sum() - 1.0) > _SUM_TOL:
            raise DomainError("w must be non-negative and sum to 1")
        object.__setattr__(self, "w", w)
        if self.alternatives is None:
            object.__setattr__(self, "alternatives", AlternativeSet.of_size(w.size))
        elif self.alternatives.m != w.size:
            raise DomainError("alternative set size does not match len(w)")
        if not 0 <= self.focal < w.size:
            raise DomainError(f"focal index {self.focal} out of range")


def profile_rankings(profile: Profile) -> tuple[np.ndarray, np.ndarray]:
    """(rankings, probabilities) for table-backed profiles."""
    if isinstance(profile, ExactProfile):
        return profile.rankings, profile.probs
    if isinstance(profile, SampledProfile):
        return profile.rankings, profile.probs
    raise UnsupportedError("rank-marginal profiles have no ranking table; expand them first")


# ---------------------------------------------------------------------------
# generator specifications


@dataclass(frozen=True)
class ImpartialCulture:
    pass


@dataclass(frozen=True)
class Mallows:
    center: tuple
    phi: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_ranking(self.center))
        if not 0 < self.phi <= 1:
            raise DomainError("Mallows dispersion phi must lie in (0, 1]")


@dataclass(frozen=True)
class MallowsMixture:
    """Mixture of Mallows components; ``centers=None`` draws them at random from the seed."""

    weights: tuple
    phi: float
    centers: tuple | None = None

    def __post_init__(self):
        weights = tuple(float(x) for x in self.weights)
        object.__setattr__(self, "weights", weights)
        if any(x < 0 for x in weights) or abs(sum(weights) - 1) > 1e-12:
            raise DomainError("mixture weights must be non-negative and sum to 1")
        if not 0 < self.phi <= 1:
            raise DomainError("Mallows dispersion phi must lie in (0, 1]")
        if self.centers is not None:
            centers = tuple(as_ranking(c) for c in self.centers)
            if len(centers) != len(weights):
                raise DomainError("one center per mixture component is required")
            object.__setattr__(self, "centers", centers)


@dataclass(frozen=True)
class PlackettLuce:
    strengths: tuple

    def __post_init__(self):
        v = tuple(float(x) for x in self.strengths)
        if any(not x > 0 for x in v):
            raise DomainError("Plackett-Luce strengths must be positive")
        object.__setattr__(self, "strengths", v)


@dataclass(frozen=True)
class WalshSinglePeaked:
    axis: tuple

    def __post_init__(self):
        object.__setattr__(self, "axis", as_ranking(self.axis))


@dataclass(frozen=True)
class Euclidean:
    dimension: int

    def __post_init__(self):
        if self.dimension < 1:
            raise DomainError("Euclidean dimension must be >= 1")


@dataclass(frozen=True)
class Antagonism:
    focal: int = 0


@dataclass(frozen=True)
class Custom:
    w: tuple
    focal: int = 0


@dataclass(frozen=True)
class GeneratorSpec:
    kind: object
    m: int
    seed: int = 0
    labels: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.m < 2:
            raise DomainError("m must be at least 2")
        size = {
            Mallows: lambda k: len(k.center),
            PlackettLuce: lambda k: len(k.strengths),
            WalshSinglePeaked: lambda k: len(k.axis),
            Custom: lambda k: len(k.w),
        }.get(type(self.kind))
        if size is not None and size(self.kind) != self.m:
            raise DomainError(f"{type(self.kind).__name__} parameters do not match m={self.m}")
        if isinstance(self.kind, MallowsMixture) and self.kind.centers is not None:
            if any(len(c) != self.m for c in self.kind.centers):
                raise DomainError("mixture centers do not match m")
        if isinstance(self.kind, (Antagonism, Custom)) and not 0 <= self.kind.focal < self.m:
            raise DomainError("focal index out of range")

    @property
    def alternatives(self) -> AlternativeSet:
        return AlternativeSet(self.labels) if self.labels else AlternativeSet.of_size(self.m)


def generate(spec: GeneratorSpec, n: int) -> Profile:
    """Draw ``n`` voters from ``spec``, or build the analytic profile when ``n == 0``.

    Identical ``(spec, n)`` always yields identical output.
    """
    if n < 0:
        raise DomainError("n must be non-negative")
    if n == 0:
        return _analytic(spec)
    rng = np.random.default_rng(spec.seed)
    kind, m = spec.kind, spec.m
    if isinstance(kind, ImpartialCulture):
        rankings = np.argsort(rng.random((n, m)), axis=1)
    elif isinstance(kind, Mallows):
        rankings = _mallows(rng, np.array(kind.center), kind.phi, n)
    elif isinstance(kind, MallowsMixture):
        centers = kind.centers
        if centers is None:
            centers = tuple(tuple(rng.permutation(m)) for _ in kind.weights)
        comp = rng.choice(len(kind.weights), size=n, p=np.asarray(kind.weights) / sum(kind.weights))
        rankings = np.empty((n, m), dtype=np.int64)
        for c, center in enumerate(centers):
            rows = np.flatnonzero(comp == c)
            rankings[rows] = _mallows(rng, np.array(center), kind.phi, rows.size)
    elif isinstance(kind, PlackettLuce):
        keys = np.log(np.asarray(kind.strengths)) + rng.gumbel(size=(n, m))
        rankings = np.argsort(-keys, axis=1, kind="stable")
    elif isinstance(kind, WalshSinglePeaked):
        rankings = _walsh(rng.random((n, m - 1)) < 0.5, np.array(kind.axis))
    elif isinstance(kind, Euclidean):
        alts = rng.random((m, kind.dimension))
        voters = rng.random((n, kind.dimension))
        dist = ((voters[:, None, :] - alts[None, :, :]) ** 2).sum(axis=2)
        rankings = np.argsort(dist, axis=1, kind="stable")
    elif isinstance(kind, (Antagonism, Custom)):
        return SampledProfile(sample_voters(_analytic(spec), n, rng), alternatives=spec.alternatives)
    else:
        raise DomainError(f"unknown generator kind {kind!r}")
    return SampledProfile(rankings, alternatives=spec.alternatives)


def _analytic(spec: GeneratorSpec) -> Profile:
    kind, m, alts = spec.kind, spec.m, spec.alternatives
    if isinstance(kind, ImpartialCulture):
        if m <= MAX_ENUM_M:
            rankings = all_rankings(m)
            return ExactProfile(rankings, np.full(len(rankings), 1.0 / len(rankings)), alts)
        return RankMarginalProfile(0, np.full(m, 1.0 / m), alts)
    if isinstance(kind, Antagonism):
        w = np.zeros(m)
        w[0] = w[-1] = 0.5
        return RankMarginalProfile(kind.focal, w, alts)
    if isinstance(kind, Custom):
        return RankMarginalProfile(kind.focal, np.asarray(kind.w, float), alts)
    if isinstance(kind, PlackettLuce) and m <= MAX_ENUM_M:
        rankings = all_rankings(m)
        v = np.asarray(kind.strengths)[rankings]
        tails = np.cumsum(v[:, ::-1], axis=1)[:, ::-1]
        probs = np.prod(v / tails, axis=1)
        return ExactProfile(rankings, probs / probs.sum(), alts)
    if isinstance(kind, WalshSinglePeaked) and m <= MAX_ENUM_M:
        coins = np.array(list(itertools.product([False, True], repeat=m - 1)), dtype=bool)
        rankings = _walsh(coins.reshape(-1, m - 1), np.array(kind.axis))
        return ExactProfile(rankings, np.full(len(rankings), 1.0 / len(rankings)), alts)
    raise UnsupportedError(f"{type(kind).__name__} has no analytic form for m={m}; pass n > 0")


def _mallows(rng: np.random.Generator, center: np.ndarray, phi: float, n: int) -> np.ndarray:
    # repeated insertion: item i goes to slot j in 0..i with weight phi**(i - j)
    m = center.size
    slots = np.zeros((n, m), dtype=np.int64)
    for i in range(1, m):
        weights = phi ** np.arange(i, -1, -1, dtype=float)
        cdf = np.cumsum(weights / weights.sum())
        slots[:, i] = np.minimum(np.searchsorted(cdf, rng.random(n), side="right"), i)
    out = np.empty((n, m), dtype=np.int64)
    for row in range(n):
        order: list[int] = []
        for i in range(m):
            order.insert(slots[row, i], center[i])
        out[row] = order
    return out


def _walsh(coins: np.ndarray, axis: np.ndarray) -> np.ndarray:
    # fill positions bottom-up, taking the left or right end of the remaining axis
    n, m = coins.shape[0], axis.size
    left = np.zeros(n, dtype=np.int64)
    right = np.full(n, m - 1, dtype=np.int64)
    out = np.empty((n, m), dtype=np.int64)
    for step, pos in enumerate(range(m - 1, 0, -1)):
        take_left = coins[:, step]
        out[:, pos] = np.where(take_left, axis[left], axis[right])
        left += take_left
        right -= ~take_left
    out[:, 0] = axis[left]
    return out


def sample_voters(profile: Profile, n: int, seed=None) -> np.ndarray:
    """Draw ``n`` i.i.d. rankings from ``profile`` as an ``(n, m)`` array."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    m = profile.m
    if isinstance(profile, RankMarginalProfile):
        ranks = rng.choice(m, size=n, p=profile.w / profile.w.sum())
        others = np.array([x for x in range(m) if x != profile.focal], dtype=np.int64)
        fill = others[np.argsort(rng.random((n, m - 1)), axis=1)]
        out = np.empty((n, m), dtype=np.int64)
        out[np.arange(n), ranks] = profile.focal
        mask = np.ones((n, m), dtype=bool)
        mask[np.arange(n), ranks] = False
        out[mask] = fill.ravel()
        return out
    rankings, probs = profile_rankings(profile)
    idx = rng.choice(len(probs), size=n, p=probs / probs.sum())
    return np.array(rankings[idx])


# ---------------------------------------------------------------------------
# named profiles


def impartial_culture(m: int) -> Profile:
    return _analytic(GeneratorSpec(ImpartialCulture(), m))


def antagonism(m: int, focal: int = 0) -> RankMarginalProfile:
    """Focal alternative ranked first or last with probability 1/2 each."""
    return _analytic(GeneratorSpec(Antagonism(focal), m))


def minority_top(m: int, eps1: float, focal: int = 0) -> RankMarginalProfile:
    """Focal alternative first with probability ``eps1``, last otherwise."""
    if not 0 < eps1 < 1:
        raise DomainError("eps1 must lie in (0, 1)")
    w = np.zeros(m)
    w[0], w[-1] = eps1, 1 - eps1
    return RankMarginalProfile(focal, w)


def symmetric_extremes(m: int, eps2: float, focal: int = 0) -> RankMarginalProfile:
    """Focal alternative first or last with probability ``eps2`` each, middle otherwise."""
    if not 0 < eps2 <= 0.5:
        raise DomainError("eps2 must lie in (0, 1/2]")
    w = np.zeros(m)
    w[0] = w[-1] = eps2
    w[(m + 1) // 2 - 1] += 1 - 2 * eps2
    return RankMarginalProfile(focal, w)


def table1_antagonism() -> ExactProfile:
    """Three-alternative profile split evenly between a > c > b and b > c > a.

    Every pairwise proportion is 1/2, so it is indistinguishable from impartial
    culture at degree 2. The triple slice differs because c never tops {a, b, c}.
    """
    return ExactProfile.from_mapping({(0, 2, 1): 0.5, (1, 2, 0): 0.5})


def two_camp(m: int) -> ExactProfile:
    """Half the voters rank 0 > 1 > ... > m-1, the other half the reverse."""
    forward = tuple(range(m))
    return ExactProfile.from_mapping({forward: 0.5, forward[::-1]: 0.5})


def unanimous(ranking: Sequence[int]) -> ExactProfile:
    return ExactProfile.from_mapping({as_ranking(ranking): 1.0})


def random_exact(m: int, seed=None, concentration: float = 1.0, support: int | None = None) -> ExactProfile:
    """Dirichlet-random distribution over all m! rankings (or a random ``support``-sized subset)."""
    rng = np.random.default_rng(seed)
    rankings = all_rankings(m)
    if support is not None:
        rankings = rankings[np.sort(rng.choice(len(rankings), size=support, replace=False))]
    probs = rng.dirichlet(np.full(len(rankings), concentration))
    return ExactProfile(rankings, probs / probs.sum())


def num_rankings(m: int) -> int:
    return math.factorial(m)
