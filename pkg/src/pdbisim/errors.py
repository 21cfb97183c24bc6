"""Exception types shared across the package."""


class PdbisimError(Exception):
    """Base class for all errors raised by this package."""


class MalformedInputError(PdbisimError):
    """A value violates a structural invariant (foreign symbol, bad shape, ...)."""


class InstanceError(PdbisimError):
    """A word-pair list is not a valid problem instance."""


class ResourceLimitError(PdbisimError):
    """A configured node/size budget was exhausted before an answer was found.

    Raised instead of returning a possibly wrong result.
    """


class IllegalMoveError(PdbisimError):
    """A move violates the game rules; the message names the violated constraint."""


class StrategyDefectError(PdbisimError):
    """A strategy agent was asked to move in a position outside its playbook."""


class PartialSolutionError(PdbisimError):
    """An index sequence expected to be a partial solution is not one."""


class ParseError(PdbisimError):
    """Text input could not be parsed; carries line/column information."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, col {column}: {message}")
        self.line = line
        self.column = column
