"""Exception hierarchy shared by the solvers and the CLI."""


class CommitPayError(Exception):
    pass


class SchemaError(CommitPayError):
    """A game, commitment or report document is structurally invalid.

    ``violations`` lists every problem found, not just the first.
    """

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class ValidationError(CommitPayError):
    """Input values violate a precondition (bad distribution, negative payment, ...)."""


class SizeError(CommitPayError):
    """A size guard or enumeration budget was exceeded."""


class ConsistencyError(CommitPayError):
    """An internal invariant failed; indicates a bug rather than bad input."""
