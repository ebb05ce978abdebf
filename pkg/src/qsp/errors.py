"""Exception hierarchy shared by all qsp modules."""


class QspError(Exception):
    """Base class for every error raised by qsp."""


class InvalidShapeError(QspError, ValueError):
    pass


class InvalidParameterError(QspError, ValueError):
    pass


class InvalidConfigurationError(QspError, ValueError):
    pass


class InvalidLevelError(QspError, IndexError):
    pass


class InvalidQueryError(QspError, ValueError):
    pass


class InvalidStateError(QspError, RuntimeError):
    pass


class InconsistentProblemError(QspError):
    """A projected start or goal is infeasible for a nested robot.

    Under a correct nesting this cannot happen, so it signals a broken
    nesting (or a completeness-trading inflation of the nested robot).
    """


class SceneError(QspError):
    """Scene file could not be parsed or failed validation."""

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)
