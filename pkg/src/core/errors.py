"""QuadTorsion Errors
Exception hierarchy shared by the arithmetic kernel, the engine and the CLI
"""


class QuadTorsionError(Exception):
    """Base class for every error raised by QuadTorsion"""


class FieldError(QuadTorsionError):
    """Invalid field parameter, field mismatch or division by zero"""


class BudgetExceededError(QuadTorsionError):
    """A computation was refused because its input exceeds the configured budget"""


class CurveError(QuadTorsionError):
    """Singular curve or point not on the curve"""


class BadReductionError(QuadTorsionError):
    """The model does not reduce to a nonsingular curve at the requested prime"""


class InsufficientPrimesError(QuadTorsionError):
    """Fewer usable primes than a torsion bound needs"""


class CountingError(QuadTorsionError):
    """Point counts are inconsistent with the Weil bounds"""


class LedgerError(QuadTorsionError):
    """Facts ledger missing or malformed"""


class FixtureError(QuadTorsionError):
    """Fixture file missing or malformed"""


class UsageError(QuadTorsionError):
    """Bad command-line input (unknown group, curve, subcommand argument)"""
