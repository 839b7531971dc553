"""Exception hierarchy shared by the foca modules."""


class FocaError(Exception):
    """Base class for every error raised by foca."""


class ValidationError(FocaError, ValueError):
    """Invalid user input (grades, answer files, flags)."""


class WrongArity(ValidationError):
    pass


class IllegalGrade(ValidationError):
    pass


class NotApplicable(ValidationError):
    pass


class Q2Locked(ValidationError):
    pass


class SchemaError(ValidationError):
    """Malformed answer file or dataset file."""


class NumericError(FocaError, ArithmeticError):
    """Failures of the beta-regression machinery."""


class DomainError(NumericError, ValueError):
    def __init__(self, message, row=None):
        super().__init__(message if row is None else f"row {row}: {message}")
        self.row = row


class RankDeficient(NumericError):
    pass


class NotConverged(NumericError):
    def __init__(self, message, fit=None):
        super().__init__(message)
        self.fit = fit


class ParseError(FocaError, ValueError):
    def __init__(self, message, line=None, column=None, token=None):
        where = f" at line {line}, column {column}" if line is not None else ""
        near = f" near {token!r}" if token else ""
        super().__init__(f"{message}{where}{near}")
        self.line = line
        self.column = column
        self.token = token


class UnknownPrefix(ParseError):
    def __init__(self, name, line=None, column=None):
        super().__init__(f"unknown prefix in {name!r}", line, column, name)
        self.name = name
