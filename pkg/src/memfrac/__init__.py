"""Fractional and probabilistic memory operators, series solvers and moment probes."""

from .errors import (
    AccuracyError,
    AxiomError,
    BracketError,
    DivergenceError,
    DomainError,
    MemfracError,
    NoKnownPairing,
    ParseError,
    SingularityError,
)
from .operators import OperatorSpec, SampledFunction
from .series_solve import PolynomialField, PowerSeries, SirParams, SolverReport
from .specfun import mittag_leffler, new_ml, new_ml_matrix
from .weights import WeightDistribution, admissible, paired_v, parse_weight

__version__ = "0.1.0"

__all__ = [
    "AccuracyError",
    "AxiomError",
    "BracketError",
    "DivergenceError",
    "DomainError",
    "MemfracError",
    "NoKnownPairing",
    "OperatorSpec",
    "ParseError",
    "PolynomialField",
    "PowerSeries",
    "SampledFunction",
    "SingularityError",
    "SirParams",
    "SolverReport",
    "WeightDistribution",
    "admissible",
    "mittag_leffler",
    "new_ml",
    "new_ml_matrix",
    "paired_v",
    "parse_weight",
]
