class Error(Exception):
    pass


class DomainError(Error, ValueError):
    pass


class DimensionError(Error, ValueError):
    pass


class BinomialOverflowError(Error, OverflowError):
    pass


class ConfigError(Error, ValueError):
    def __init__(self, message: str, line: int | None = None) -> None:
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class QuadratureConvergenceError(Error, ArithmeticError):
    pass
