from typing import Optional

# exit codes used by the command line front end
EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_GUARD = 3
EXIT_MISSING_DATABASE = 4


class CliffHierError(Exception):
    exit_code = EXIT_USAGE


class DimensionMismatchError(CliffHierError, ValueError):
    pass


class InvalidPermutationError(CliffHierError, ValueError):
    pass


class InvalidGateError(CliffHierError, ValueError):
    pass


class CircuitParseError(CliffHierError, ValueError):
    def __init__(self, message: str, line: int, column: int, source: Optional[str] = None):
        self.line = line
        self.column = column
        self.source = source
        where = f"{source}:" if source else ""
        super().__init__(f"{where}{line}:{column}: {message}")


class GuardExceededError(CliffHierError):
    exit_code = EXIT_GUARD


class DecompositionError(CliffHierError):
    exit_code = EXIT_MISMATCH


class MissingDatabaseError(CliffHierError):
    exit_code = EXIT_MISSING_DATABASE

    def __init__(self, what: str, command: str):
        self.command = command
        super().__init__(f"{what} has not been computed yet; run `{command}` first")


class VerificationError(CliffHierError):
    exit_code = EXIT_MISMATCH
