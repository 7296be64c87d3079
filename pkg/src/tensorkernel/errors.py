"""Exception hierarchy shared by every module of the kernel."""


class TensorKernelError(Exception):
    """Base class for all errors raised by the kernel."""


class FreeIndexMismatch(TensorKernelError):
    pass


class RepeatedIndex(TensorKernelError):
    """An index occurs too often, or twice with the same variance."""


class NoContractibleSlots(TensorKernelError):
    pass


class ParseError(TensorKernelError):
    """Syntax error carrying the source span of the offending token."""

    def __init__(self, message, span=None):
        self.span = span
        if span is not None:
            message = f"{message} (line {span.line}, column {span.column})"
        super().__init__(message)


class UnknownProperty(TensorKernelError):
    pass


class ArityMismatch(TensorKernelError):
    pass


class ConflictingProperty(TensorKernelError):
    pass


class PatternArityMismatch(TensorKernelError):
    pass


class MissingGammaMetric(TensorKernelError):
    pass


class NoSymmetry(TensorKernelError):
    pass


class OrbitTooLarge(TensorKernelError):
    pass


class UnknownChart(TensorKernelError):
    pass


class SingularMetric(TensorKernelError):
    pass


class KindMismatch(TensorKernelError):
    pass


class DimensionNotThree(TensorKernelError):
    pass


class NonOrthogonalChart(TensorKernelError):
    pass


class UnboundSymbol(TensorKernelError):
    pass


class GoldenMismatch(TensorKernelError):
    pass
