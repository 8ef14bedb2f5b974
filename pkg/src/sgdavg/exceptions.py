"""Exception types raised across the package."""


class UsageError(ValueError):
    """Invalid arguments, violated preconditions or mismatched dimensions."""


class ParseError(ValueError):
    """Malformed SVMlight input. ``lineno`` is 1-based."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class BoundUnavailableError(UsageError):
    """No closed-form oracle norm bound G exists for the objective/domain pair."""


class ConfigError(UsageError):
    """Invalid experiment configuration; ``path`` names the offending key."""

    def __init__(self, message, path=None):
        self.path = path
        if path:
            message = f"{path}: {message}"
        super().__init__(message)
