"""Witness pairs showing that degree-k data does not determine degree k+1.

Both members of a pair are rank-marginal profiles over ``m = d + 2``
alternatives: the focal alternative's rank follows ``w`` (resp. ``w'``) and the
others fill the remaining positions uniformly. Its plurality on a size-s set
is a linear functional of the rank law, so matching degrees 1..d is a small
integer linear system with a two-dimensional null space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, SolverError
from .plurality import plurality_matrix
from .prefcore import Profile, RankMarginalProfile

#: Smallest entry allowed in the perturbed law when ``t`` is chosen automatically.
MIN_ENTRY = Fraction(1, 100)
#: Above this degree the null space is computed in floating point.
EXACT_LIMIT = 20


def splur_from_w(w, m: int, s: int):
    """Focal plurality on any size-``s`` set containing it, for rank law ``w``.

    Exact when ``w`` holds :class:`~fractions.Fraction` entries.
    """
    if len(w) != m:
        raise DomainError("len(w) must equal m")
    if not 1 <= s <= m:
        raise DomainError(f"s must lie in [1, {m}]")
    total = sum(w[j - 1] * math.comb(m - j, s - 1) for j in range(1, m + 1))
    return total / math.comb(m - 1, s - 1) if isinstance(total, Fraction) else float(total) / math.comb(m - 1, s - 1)


def matching_matrix(d: int) -> list[list[int]]:
    """Rows s = 1..d, columns j = 1..d+2: ``C(m - j, s - 1)``."""
    m = d + 2
    return [[math.comb(m - j, s - 1) for j in range(1, m + 1)] for s in range(1, d + 1)]


def _nullspace_exact(A: list[list[int]]) -> list[list[Fraction]]:
    rows = [[Fraction(x) for x in r] for r in A]
    n_rows, n_cols = len(rows), len(rows[0])
    pivots = []
    r = 0
    for c in range(n_cols):
        piv = next((i for i in range(r, n_rows) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        lead = rows[r][c]
        rows[r] = [x / lead for x in rows[r]]
        for i in range(n_rows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    if len(pivots) != n_rows:
        raise SolverError(f"matching system has rank {len(pivots)} < {n_rows}")
    basis = []
    for free in (c for c in range(n_cols) if c not in pivots):
        v = [Fraction(0)] * n_cols
        v[free] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -rows[i][free]
        basis.append(v)
    return basis


def _nullspace_float(A: list[list[int]]) -> list[list[Fraction]]:
    M = np.array(A, dtype=float)
    _, sv, vt = np.linalg.svd(M)
    rank = int(np.sum(sv > sv[0] * 1e-12))
    if rank != M.shape[0]:
        raise SolverError(f"matching system is numerically rank deficient ({rank} < {M.shape[0]})")
    return [[Fraction(float(x)) for x in v] for v in vt[rank:]]


def _separation(v, d: int):
    m = d + 2
    return sum(v[j - 1] * math.comb(m - j, d) for j in range(1, m + 1))


def solve_matching(d: int) -> tuple[Fraction, ...]:
    """A direction that keeps degrees 1..d of the focal plurality fixed and moves degree d+1.

    Returned as integers (as Fractions) with no common factor; for ``d = 3``
    this is ``(-1, 3, -3, 1, 0)``.
    """
    if d < 2:
        raise DomainError("d must be at least 2")
    A = matching_matrix(d)
    basis = _nullspace_exact(A) if d <= EXACT_LIMIT else _nullspace_float(A)
    for v in basis:
        if _separation(v, d) != 0:
            break
    else:
        v = [x + y for x, y in zip(*basis)]
        if _separation(v, d) == 0:
            raise SolverError("no null-space direction separates degree d+1")
    if d <= EXACT_LIMIT:
        scale = math.lcm(*(x.denominator for x in v))
        v = [x * scale for x in v]
        g = math.gcd(*(int(x) for x in v))
        v = [x / g for x in v]
    return tuple(Fraction(x) for x in v)


def _as_fraction(t) -> Fraction:
    if isinstance(t, float):
        return Fraction(repr(t))
    return Fraction(t)


@dataclass(frozen=True)
class WitnessPair:
    """Uniform law ``w`` and perturbed law ``w_prime = w + t * delta`` (exact rationals)."""

    d: int
    w: tuple
    w_prime: tuple
    delta: tuple
    t: Fraction

    @property
    def m(self) -> int:
        return self.d + 2

    @property
    def gap_degree(self) -> int:
        return self.d + 1

    def entries(self, s: int) -> tuple[Fraction, Fraction]:
        """Focal plurality at degree ``s`` under ``w`` and under ``w_prime``."""
        return splur_from_w(self.w, self.m, s), splur_from_w(self.w_prime, self.m, s)

    @property
    def gap_value(self) -> Fraction:
        lo, hi = self.entries(self.gap_degree)
        return abs(hi - lo)

    def profiles(self, focal: int = 0) -> tuple[RankMarginalProfile, RankMarginalProfile]:
        return (
            RankMarginalProfile(focal, [float(x) for x in self.w]),
            RankMarginalProfile(focal, [float(x) for x in self.w_prime]),
        )

    def as_dict(self) -> dict:
        return {
            "d": self.d,
            "m": self.m,
            "w": [float(x) for x in self.w],
            "w_prime": [float(x) for x in self.w_prime],
            "gap_degree": self.gap_degree,
            "gap_value": float(self.gap_value),
            "w_exact": [str(x) for x in self.w],
            "w_prime_exact": [str(x) for x in self.w_prime],
            "t": str(self.t),
            "focal_entries": {
                str(s): [str(x) for x in self.entries(s)] for s in range(2, self.m + 1)
            },
        }


def default_scale(delta, m: int) -> Fraction:
    """Largest t keeping every entry of ``1/m + t * delta`` at least :data:`MIN_ENTRY`."""
    base = Fraction(1, m)
    if base <= MIN_ENTRY:
        raise DomainError(f"uniform entries 1/{m} are already below {MIN_ENTRY}")
    return min((base - MIN_ENTRY) / -x for x in delta if x < 0)


def build_witness(d: int, t=None) -> WitnessPair:
    """Witness pair agreeing on degrees 2..d and differing at degree d+1.

    ``t`` defaults to :func:`default_scale`. ``t = 1/20`` at ``d = 3`` gives
    ``w' = (3, 7, 1, 5, 4)/20``.
    """
    delta = solve_matching(d)
    m = d + 2
    t = default_scale(delta, m) if t is None else _as_fraction(t)
    if t == 0:
        raise DomainError("t must be non-zero")
    w = tuple(Fraction(1, m) for _ in range(m))
    w_prime = tuple(x + t * y for x, y in zip(w, delta))
    if any(x < 0 for x in w_prime):
        raise DomainError(f"t = {t} pushes the perturbed law below zero")
    return WitnessPair(d, w, w_prime, delta, t)


@dataclass(frozen=True)
class AgreementReport:
    max_gap_per_degree: dict
    first_divergent_degree: int | None
    tol: float

    def agrees_through(self, k: int) -> bool:
        return all(g <= self.tol for deg, g in self.max_gap_per_degree.items() if deg <= k)


def verify_agreement(first: Profile, second: Profile, k: int | None = None, tol: float = 1e-9) -> AgreementReport:
    """Largest entry gap per degree between two profiles' plurality matrices.

    When ``k`` is given, only degrees up to ``k + 1`` are compared.
    """
    if first.m != second.m:
        raise DomainError("profiles must share the alternative count")
    m = first.m
    top = m if k is None else min(m, k + 1)
    degrees = range(2, top + 1)
    A, B = plurality_matrix(first, degrees), plurality_matrix(second, degrees)
    gaps = {s: A.max_gap(B, s) for s in degrees}
    first_div = next((s for s in degrees if gaps[s] > tol), None)
    return AgreementReport(gaps, first_div, tol)
