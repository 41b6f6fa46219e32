"""ramcalc: exact computation of piecewise-monomial profiles of disc
morphisms, higher-ramification filtrations with Herbrand functions, and
radial multiplicity loci on skeletons.

All arithmetic is exact rational in valuation coordinates v = -log_q r.
"""

from .errors import InvalidDatum, InvariantViolation, ParseError, RamcalcError
from .pmfun import INF, PMFunction, ProfileFunction, Val

__version__ = "0.1.0"

__all__ = [
    "INF",
    "InvalidDatum",
    "InvariantViolation",
    "PMFunction",
    "ParseError",
    "ProfileFunction",
    "RamcalcError",
    "Val",
    "__version__",
]
