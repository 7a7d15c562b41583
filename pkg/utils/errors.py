"""
Errors - Derived Chronicles

This module defines the exception hierarchy shared by the library, the
workspace loader and the command line. Every error carries the exit code
the CLI reports for it.
"""

EXIT_OK = 0
EXIT_VERDICT_FAILED = 1
EXIT_USAGE = 2
EXIT_INVARIANT = 3


class ChroniclesError(Exception):
    """Base class for all errors raised by Derived Chronicles"""

    exit_code = EXIT_INVARIANT


# Usage level

class UsageError(ChroniclesError):
    exit_code = EXIT_USAGE


class UnknownCommand(UsageError):
    def __init__(self, command):
        self.command = command
        super().__init__(f"unknown command: {command!r}")


class ParseError(UsageError):
    def __init__(self, line, message):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}")


# Invariant level

class InvariantError(ChroniclesError):
    """An object failed one of its structural invariants"""

    def __init__(self, obj, detail):
        self.obj = obj
        self.detail = detail
        super().__init__(f"{obj}: {detail}")


class FieldMismatch(ChroniclesError):
    pass


class DimensionMismatch(ChroniclesError):
    pass


class SubspaceError(ChroniclesError):
    pass


class SingularMatrix(ChroniclesError):
    pass


class AssociativityViolation(ChroniclesError):
    def __init__(self, i, j, k, witness):
        self.triple = (i, j, k)
        self.witness = witness
        super().__init__(f"(b{i}*b{j})*b{k} != b{i}*(b{j}*b{k}): {witness}")


class UnitViolation(ChroniclesError):
    pass


class NonNilpotent(ChroniclesError):
    pass


class UnsupportedRadical(ChroniclesError):
    pass


class AlgebraMismatch(ChroniclesError):
    pass


class ModuleLawViolation(ChroniclesError):
    pass


class NotChainMap(ChroniclesError):
    pass


class NotProjectiveTerm(ChroniclesError):
    def __init__(self, degree, detail=""):
        self.degree = degree
        super().__init__(f"term in degree {degree} is not projective{': ' + detail if detail else ''}")


class WindowTooSmall(ChroniclesError):
    pass
