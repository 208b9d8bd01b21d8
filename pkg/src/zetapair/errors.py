"""Exception hierarchy.  Each class carries the CLI exit code it maps to."""


class ZetaPairError(Exception):
    exit_code = 1

    def to_dict(self):
        return {"error": type(self).__name__, "message": str(self)}


class InvalidArgumentError(ZetaPairError, ValueError):
    exit_code = 2


class DomainError(InvalidArgumentError):
    exit_code = 2


class PoleError(DomainError):
    exit_code = 2


class ConfigError(InvalidArgumentError):
    exit_code = 2


class BandLimitError(InvalidArgumentError):
    """A finite band limit was required but the test function has none."""

    exit_code = 2


class NonSmoothError(InvalidArgumentError):
    exit_code = 2


class PreconditionError(ZetaPairError):
    exit_code = 2


class InsufficientTablesError(PreconditionError):
    def __init__(self, message, required_limit):
        super().__init__(message)
        self.required_limit = int(required_limit)

    def to_dict(self):
        d = super().to_dict()
        d["required_limit"] = self.required_limit
        return d


class IncompleteListError(PreconditionError):
    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval

    def to_dict(self):
        d = super().to_dict()
        d["interval"] = list(self.interval) if self.interval is not None else None
        return d


class AccuracyError(ZetaPairError):
    exit_code = 3

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate

    def to_dict(self):
        d = super().to_dict()
        d["estimate"] = self.estimate
        return d


class ParseError(ZetaPairError, ValueError):
    exit_code = 4

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line

    def to_dict(self):
        d = super().to_dict()
        d["line"] = self.line
        return d
