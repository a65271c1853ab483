"""Exception hierarchy shared by every gavekit module."""


class GaveError(Exception):
    """Base class for gavekit failures."""


class InputError(GaveError, ValueError):
    """Malformed or inconsistent input.

    ``code`` is a short machine-readable tag (``E_JSON``, ``E_RAGGED``, ...)
    and ``field`` names the offending input field when known.
    """

    def __init__(self, message: str, code: str = "E_INPUT", field: str | None = None):
        self.code = code
        self.field = field
        prefix = f"[{code}]" + (f" {field}:" if field else "")
        super().__init__(f"{prefix} {message}")


class NumericalError(GaveError, ArithmeticError):
    """A numerical routine could not produce a trustworthy answer."""


class SvdConvergenceError(NumericalError):
    pass


class SingularMatrixError(NumericalError):
    pass


class SimplexStallError(NumericalError):
    """Pivot budget exhausted or a verdict failed re-verification."""


class BudgetExceededError(GaveError):
    """A combinatorial search was refused or cut short by its budget."""
