"""equivlab: stability, consistency and convergence experiments for
quadrature, Monte Carlo integration, finite differences and polynomial
interpolation."""

__version__ = "0.1.0"

from equivlab.errors import DomainError, EquivlabError, NumericalError
from equivlab.funcspace import Interval, NormEstimate, ScalarFunction

__all__ = [
    "__version__",
    "DomainError",
    "EquivlabError",
    "Interval",
    "NormEstimate",
    "NumericalError",
    "ScalarFunction",
]
