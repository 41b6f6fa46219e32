"""Exception hierarchy shared across the package."""


class RamcalcError(Exception):
    pass


class InvalidDatum(RamcalcError):
    """A mathematical object failed its validity axioms (bad table, bad
    valuation data, broken ultrametric, ...).  Maps to CLI exit code 4."""


class InvariantViolation(RamcalcError):
    """An internal cross-check that is a theorem for valid inputs failed.
    Reaching this means a bug, not a bad input."""


class ParseError(RamcalcError):
    """Structured input was syntactically valid JSON but violated the
    documented file schema.  Maps to CLI exit code 2."""
