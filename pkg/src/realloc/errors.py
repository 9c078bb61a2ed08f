"""Exception hierarchy shared across the package."""


class ReallocError(Exception):
    """Base class for every error raised by :mod:`realloc`."""


class InvalidEconomy(ReallocError, ValueError):
    pass


class InvalidSubset(ReallocError, ValueError):
    pass


class InfeasibleAllocation(ReallocError, ValueError):
    pass


class DomainError(ReallocError, ValueError):
    """A rule was applied outside the set of economies it is defined on."""


class UnsupportedRule(ReallocError, ValueError):
    pass


class UnknownRule(ReallocError, ValueError):
    pass


class InapplicableVariant(ReallocError, ValueError):
    """The sign preconditions of a cross-economy condition are not met."""


class InvalidPerturbation(ReallocError, ValueError):
    pass


class InvalidBattery(ReallocError, ValueError):
    pass


class StaleWitness(ReallocError, ValueError):
    """A witness no longer replays as a violation."""


class ConfigError(ReallocError, ValueError):
    pass


class ParseError(ReallocError, ValueError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
