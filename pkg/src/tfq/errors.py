"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class TFQError(Exception):
    exit_code = 1


class ParseError(TFQError, ValueError):
    exit_code = 2


class InvalidGroupError(ParseError):
    pass


class InvalidSubgroupError(ParseError):
    pass


class DomainError(TFQError, ValueError):
    """Operands live on different groups, lattices or register layouts."""

    exit_code = 3


class ShapeError(DomainError):
    pass


class InvalidWindowError(TFQError, ValueError):
    exit_code = 4


class UnsupportedIsomorphismError(TFQError, NotImplementedError):
    exit_code = 5
