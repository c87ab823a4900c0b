"""Central moments of rank variables from aggregate plurality, and the Pearson plane.

The k-th central moment of a's rank is a fixed linear combination of
``P_0(a), ..., P_k(a)`` whose coefficients depend only on the Borda score, so
it is a measure of level k + 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError, DomainError
from .plurality import AggregatePlurality

#: Default offset of the bimodality parabola ``gamma2 = gamma1**2 - c``.
DEFAULT_BIMODALITY_C = 1.0
PEARSON_TOL = 1e-9

REGIONS = ("infeasible", "bimodal", "unimodal")


def moment_coefficients(bor: float, k: int) -> np.ndarray:
    """Coefficients ``c_0..c_k`` of the k-th moment identity for Borda score ``bor``.

    ``c_s`` is the s-th forward difference at 0 of ``x -> (x - bor)**k``.
    """
    if k < 1:
        raise DomainError("k must be at least 1")
    return np.array(
        [
            sum((-1) ** (s - j) * math.comb(s, j) * (j - bor) ** k for j in range(s + 1))
            for s in range(k + 1)
        ],
        dtype=float,
    )


def central_moment(P: AggregatePlurality, k: int) -> float:
    """``E[(r_a - E r_a)**k]`` from ``P_0..P_k``.

    Terms with ``s >= m`` vanish (no set of that size exists), so any ``k >= 1``
    is accepted once ``P_0..P_{min(k, m-1)}`` are known.
    """
    if k < 1:
        raise DomainError("k must be at least 1")
    need = min(k, P.m - 1)
    if len(P.values) <= need:
        raise DomainError(f"moment {k} needs P_0..P_{need}; only {len(P.values)} values given")
    c = moment_coefficients(P.values[1], k)
    vals = np.zeros(k + 1)
    vals[: need + 1] = P.values[: need + 1]
    return float((-1) ** k * c @ vals)


@dataclass(frozen=True)
class MomentVector:
    """Moments ``M[k]`` for k = 2..K of one alternative's rank.

    ``gamma1`` and ``gamma2`` are ``None`` unless ``M_2 > 0`` and K >= 4.
    """

    a: int
    bor: float
    M: dict
    gamma1: float | None = None
    gamma2: float | None = None

    @classmethod
    def from_aggregate(cls, P: AggregatePlurality, K: int = 4) -> "MomentVector":
        M = {k: central_moment(P, k) for k in range(2, K + 1)}
        g1 = g2 = None
        if K >= 4 and M[2] > PEARSON_TOL:
            g1, g2 = _shape(M)
        return cls(P.a, P.values[1], M, g1, g2)


def _shape(M: dict) -> tuple[float, float]:
    return M[3] / M[2] ** 1.5, M[4] / M[2] ** 2 - 3


def skew_kurtosis(M: MomentVector) -> tuple[float, float]:
    """``(skewness, excess kurtosis)`` of the rank."""
    if M.M.get(2, 0.0) <= PEARSON_TOL:
        raise DegenerateError(f"alternative {M.a} has a deterministic rank")
    if 4 not in M.M:
        raise DomainError("skewness and kurtosis need moments up to order 4")
    return _shape(M.M)


@dataclass(frozen=True)
class PearsonPoint:
    gamma1: float
    gamma2: float
    region: str
    c: float = DEFAULT_BIMODALITY_C


def classify(gamma1: float, gamma2: float, c: float = DEFAULT_BIMODALITY_C) -> str:
    if gamma2 < gamma1**2 - 2 - PEARSON_TOL:
        return "infeasible"
    if gamma2 < gamma1**2 - c:
        return "bimodal"
    return "unimodal"


def pearson_point(M, c: float = DEFAULT_BIMODALITY_C) -> PearsonPoint:
    """Place a moment vector (or a ``(gamma1, gamma2)`` pair) in the Pearson plane."""
    g1, g2 = skew_kurtosis(M) if isinstance(M, MomentVector) else M
    return PearsonPoint(float(g1), float(g2), classify(g1, g2, c), c)


def pearson_rows(aggregates, profile_name: str, labels=None, c: float = DEFAULT_BIMODALITY_C) -> list[dict]:
    """Plot rows ``alt, profile, skewness, excess_kurtosis, region``; skips zero-variance alternatives."""
    rows = []
    for P in aggregates:
        mv = MomentVector.from_aggregate(P, 4)
        if mv.gamma1 is None:
            continue
        pt = pearson_point(mv, c)
        rows.append(
            {
                "alt": P.a if labels is None else labels[P.a],
                "profile": profile_name,
                "skewness": pt.gamma1,
                "excess_kurtosis": pt.gamma2,
                "region": pt.region,
            }
        )
    return rows
