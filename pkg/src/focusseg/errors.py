"""Exception types shared across the package."""


class FocusSegError(Exception):
    """Base class for data/validation failures."""


class ShapeError(FocusSegError, ValueError):
    pass


class DomainError(FocusSegError, ValueError):
    pass


class FormatError(FocusSegError, ValueError):
    """File exists but is not a supported format."""


class ConfigError(FocusSegError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)
