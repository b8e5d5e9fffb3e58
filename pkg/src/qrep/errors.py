"""Exception types shared across the package."""


class QRepError(Exception):
    """Base class for all qrep errors."""


class QasmError(QRepError):
    """Problem in OpenQASM source. Carries 1-based line/column."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        super().__init__(f"line {line}, column {col}: {message}" if line else message)


class QasmSyntaxError(QasmError):
    pass


class UnsupportedGateError(QasmError):
    pass


class UnsupportedFeatureError(QasmError):
    pass


class GateIndexError(QRepError, IndexError):
    """Gate position outside the circuit's gate list."""


class QubitIndexError(QRepError, ValueError):
    """Qubit index outside the circuit width."""


class WidthMismatchError(QRepError, ValueError):
    """Operands defined over different qubit counts / outcome spaces."""


class SuiteTooWideError(QRepError, ValueError):
    """Suite generation would enumerate too many basis states."""


class UnknownGateError(QRepError, KeyError):
    """Gate identity not present in the suspiciousness table."""


class NoFailingTestError(QRepError, ValueError):
    """Repair/localisation requires at least one failing test case."""


class NoNonEquivalentMutantError(QRepError, ValueError):
    """Every candidate mutant passes the reference suite."""
