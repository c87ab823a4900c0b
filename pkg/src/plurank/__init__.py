"""Plurality matrices, disagreement measures, and elicitation planning for ranking data."""

from .errors import (
    CollapseInapplicableError,
    DegenerateError,
    DegeneratePairError,
    DependencyError,
    DomainError,
    FeasibilityError,
    NotSinglePeakedError,
    ParseError,
    PluRankError,
    PositivityError,
    ResourceError,
    SolverError,
    UnsupportedError,
)
from .plurality import (
    AggregatePlurality,
    PluralityMatrix,
    aggregate_plurality,
    aggregate_vector,
    anti_plurality,
    empirical_update,
    plurality_entry,
    plurality_matrix,
    rank_distribution,
)
from .prefcore import (
    AlternativeSet,
    ExactProfile,
    GeneratorSpec,
    RankMarginalProfile,
    SampledProfile,
    generate,
)

__version__ = "0.1.0"
