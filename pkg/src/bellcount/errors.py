"""Exception hierarchy. Each CLI-facing error carries the process exit code."""


class BellCountError(Exception):
    exit_code = 1


class UsageError(BellCountError):
    exit_code = 2


class ParseError(BellCountError):
    exit_code = 3

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class SchemaError(BellCountError):
    exit_code = 3

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class InvalidArgumentError(BellCountError, ValueError):
    exit_code = 4


class ValidationError(InvalidArgumentError):
    exit_code = 4


class DegenerateComputationError(BellCountError, ArithmeticError):
    exit_code = 5


class DegenerateFitError(DegenerateComputationError):
    pass


class NonPositiveDenominatorError(DegenerateComputationError):
    pass


class UndefinedDiagnosticError(DegenerateComputationError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index
