"""Rebuilding higher-degree plurality data from pairwise data under structural assumptions.

Under a Plackett-Luce model every entry is a strength ratio, and strengths
are identified (up to scale) by the pairwise proportions against one
reference alternative. Under single-peakedness on a known axis every entry is
a difference of pairwise proportions between axis neighbours.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import CollapseInapplicableError, DomainError, NotSinglePeakedError
from .plurality import PluralityMatrix, canonical, plurality_matrix, subsets_of_size
from .prefcore import Profile, as_ranking, positions, profile_rankings

SP_TOL = 1e-9


@dataclass(frozen=True)
class StrengthVector:
    v: tuple

    def __post_init__(self):
        v = tuple(float(x) for x in self.v)
        if any(not x > 0 for x in v):
            raise DomainError("strengths must be positive")
        object.__setattr__(self, "v", v)


@dataclass(frozen=True)
class Axis:
    order: tuple

    def __post_init__(self):
        object.__setattr__(self, "order", as_ranking(self.order))

    def position(self) -> dict:
        return {x: i for i, x in enumerate(self.order)}


def pl_plurality(v, S, a: int) -> float:
    v = StrengthVector(v).v if not isinstance(v, StrengthVector) else v.v
    S = canonical(S)
    if a not in S:
        raise DomainError(f"{a} not in {S}")
    return v[a] / sum(v[x] for x in S)


def _softmax_matrix(logv: np.ndarray, provenance: str) -> PluralityMatrix:
    m = logv.size
    slices = {}
    for k in range(2, m + 1):
        sl = {}
        for S in subsets_of_size(m, k):
            x = logv[list(S)]
            e = np.exp(x - x.max())
            sl[S] = e / e.sum()
        slices[k] = sl
    return PluralityMatrix(m, slices, None, provenance)


def pl_matrix(v) -> PluralityMatrix:
    """Full plurality matrix of the Plackett-Luce model with strengths ``v``."""
    return _softmax_matrix(np.log(np.asarray(StrengthVector(v).v)), "exact")


def pl_lift(row: Mapping[int, float], reference: int = 0, m: int | None = None) -> PluralityMatrix:
    """Full matrix implied by ``row[a] = p_{a r}(a)`` for every ``a != r``.

    Strengths are recovered as log-odds, ``log v_a - log v_r = logit(p_ar)``,
    which avoids dividing by ``1 - p_ar`` near the boundary.
    """
    m = len(row) + 1 if m is None else m
    logv = np.zeros(m)
    for a in range(m):
        if a == reference:
            continue
        if a not in row:
            raise DomainError(f"missing pairwise value for ({a}, {reference})")
        p = float(row[a])
        if not 0 < p < 1:
            raise CollapseInapplicableError(f"p_({a},{reference}) = {p:g} lies on the boundary")
        logv[a] = np.log(p) - np.log1p(-p)
    return _softmax_matrix(logv, "lifted")


def pl_lift_matrix(matrix: PluralityMatrix, reference: int = 0) -> PluralityMatrix:
    """:func:`pl_lift` fed from the pairwise slice of ``matrix``."""
    row = {a: matrix.pair(a, reference) for a in range(matrix.m) if a != reference}
    return pl_lift(row, reference, matrix.m)


def sp_plurality(axis, pairwise: PluralityMatrix, S, tol: float | None = SP_TOL) -> dict:
    """Entries of ``S`` for a profile single-peaked on ``axis``, from pairwise data.

    Raises :class:`NotSinglePeakedError` when an entry falls below ``-tol``;
    ``tol=None`` skips the check.
    """
    axis = axis if isinstance(axis, Axis) else Axis(axis)
    pos = axis.position()
    order = sorted(canonical(S), key=pos.__getitem__)
    k = len(order)
    if k < 2:
        raise DomainError("S needs at least two alternatives")
    # adj[j] = p(order[j] beats order[j + 1])
    adj = [pairwise.pair(order[j], order[j + 1]) for j in range(k - 1)]
    out = {}
    for j, x in enumerate(order):
        right = adj[j] if j < k - 1 else 1.0
        left = adj[j - 1] if j > 0 else 0.0
        out[x] = right - left
    if tol is not None:
        low = min(out.values())
        if low < -tol:
            raise NotSinglePeakedError(f"entry {low:.3g} < 0 on {tuple(order)}: data is not single-peaked on this axis")
    return out


def sp_lift(axis, pairwise: PluralityMatrix, tol: float | None = SP_TOL) -> PluralityMatrix:
    """Full matrix implied by single-peakedness on ``axis``."""
    m = pairwise.m
    slices = {2: {S: np.array(r) for S, r in pairwise.slice(2).items()}}
    for k in range(3, m + 1):
        sl = {}
        for S in subsets_of_size(m, k):
            vals = sp_plurality(axis, pairwise, S, tol)
            sl[S] = np.array([vals[x] for x in S])
        slices[k] = sl
    return PluralityMatrix(m, slices, None, "lifted")


@dataclass(frozen=True)
class PL:
    """Plackett-Luce structure; ``v=None`` lifts from the profile's own pairwise data."""

    v: tuple | None = None
    reference: int = 0


@dataclass(frozen=True)
class SP:
    axis: tuple


def verify_collapse(profile: Profile, structure) -> float:
    """Largest gap between the profile's matrix and the structure's prediction over all degrees."""
    truth = plurality_matrix(profile)
    if isinstance(structure, PL):
        pred = pl_matrix(structure.v) if structure.v is not None else pl_lift_matrix(truth, structure.reference)
    elif isinstance(structure, SP):
        pred = sp_lift(structure.axis, truth, tol=None)
    else:
        raise DomainError(f"unknown structure {structure!r}")
    return max(truth.max_gap(pred, k) for k in truth.degrees)


def middle_never_last(profile: Profile, axis) -> float:
    """Largest probability, over axis-ordered triples x < y < z, that y is below both x and z."""
    rankings, probs = profile_rankings(profile)
    pos = positions(rankings)
    worst = 0.0
    for x, y, z in itertools.combinations(Axis(axis).order, 3):
        event = (pos[:, x] < pos[:, y]) & (pos[:, z] < pos[:, y])
        worst = max(worst, float(probs @ event))
    return worst
