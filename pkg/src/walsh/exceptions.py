from typing import Optional


class WalshError(Exception):
    """
    Base class for every error raised by the toolkit.
    """


class ConstructionError(WalshError, ValueError):
    """
    Raised when a matrix construction is asked for parameters outside its range.

    Args:
        message (str): The violated constraint, e.g. "k must be odd".
        field (str): The offending parameter ("k" or "n").
    """

    def __init__(self, message: str, field: str = "k"):
        super().__init__(message)
        self.field = field


class DimensionError(WalshError, ValueError):
    pass


class TableError(WalshError, ValueError):
    pass


class SelectionError(WalshError, ValueError):
    pass


class LabelError(WalshError, ValueError):
    pass


class MatrixFormatError(WalshError, ValueError):
    """
    Raised when a ".wam", ".wat" or simulation config file cannot be parsed.
    """

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class PoolConfigError(WalshError, ValueError):
    def __init__(self, message: str, pool_id: Optional[str] = None, field: str = ""):
        self.pool_id = pool_id
        self.field = field
        where = f"pool {pool_id}" if pool_id else "simulation"
        super().__init__(f"{where}: {field}: {message}" if field else f"{where}: {message}")


class VerificationLimitError(WalshError, ValueError):
    pass


class AssignmentError(WalshError):
    """
    Raised when no code assignment exists for the requested users.
    The Hall violation that proves it is kept on `violation`.
    """

    def __init__(self, violation):
        self.violation = violation
        super().__init__(violation.to_record())


class InvariantViolation(WalshError, RuntimeError):
    pass
