"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid parameters, budgets, attack settings, or guard refusals."""


class DomainError(ValueError):
    """An operand (key, block, index) lies outside its declared range."""


class BudgetError(RuntimeError):
    """An oracle query was attempted after its budget was exhausted."""


class BudgetViolation(BudgetError):
    """An adversary run was aborted because it exceeded its query budget."""

    def __init__(self, message: str, q_used: int, t_used: int, transcript=None):
        super().__init__(message)
        self.q_used = q_used
        self.t_used = t_used
        self.transcript = transcript


class TranscriptParseError(ValueError):
    """A transcript file could not be parsed; carries the offending line number."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number
