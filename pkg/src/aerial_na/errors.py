"""Exception hierarchy. CLI exit codes hang off these classes."""


class AerialNaError(Exception):
    exit_code = 4


class DomainError(AerialNaError, ValueError):
    """Argument outside the domain of a numerical routine."""

    exit_code = 4


class ConfigError(AerialNaError):
    """Bad scenario configuration or option value."""

    exit_code = 2

    def __init__(self, message, key=None, line=None):
        self.message = message
        self.key = key
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class InfeasibleError(AerialNaError):
    """The requested resource configuration cannot be realized."""

    exit_code = 3


class NumericalError(AerialNaError):
    exit_code = 4
