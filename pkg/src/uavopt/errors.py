class NumericalError(RuntimeError):
    """Raised when a quadrature or solver produces non-finite values."""


class ConfigError(ValueError):
    """Scenario config problem, carrying the offending line and field when known."""

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
