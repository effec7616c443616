"""Exception hierarchy. The CLI maps these onto exit codes."""


class HindsightError(Exception):
    """Base class for all engine errors."""


class DomainError(HindsightError, ValueError):
    """Invalid parameters or inputs (exit code 2)."""


class QuoteParseError(DomainError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class EmptySeriesError(DomainError):
    pass


class AlignmentError(DomainError):
    pass


class InfeasibleError(HindsightError):
    """No admissible trajectory exists (exit code 3)."""


class PropagationError(InfeasibleError):
    def __init__(self, t: int, message: str = ""):
        super().__init__(f"no feasible state at t={t}" + (f": {message}" if message else ""))
        self.t = t


class OracleTooLargeError(DomainError):
    def __init__(self, n_ids: int, n_steps: int, limit: int):
        super().__init__(
            f"brute force would enumerate {n_ids}^{n_steps} = {n_ids ** n_steps} sequences (limit {limit})"
        )
        self.size = n_ids**n_steps
