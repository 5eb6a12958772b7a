"""Exception hierarchy shared by every estimator, generator and I/O helper."""

from __future__ import annotations


class LsxgcError(ValueError):
    """Base class for all errors raised by this package."""


class ZeroVarianceSeries(LsxgcError):
    def __init__(self, row: int):
        super().__init__(f"series {row} has zero variance")
        self.row = row


class InvalidComponentCount(LsxgcError):
    pass


class DimensionMismatch(LsxgcError):
    pass


class NonFiniteInput(LsxgcError):
    pass


class TooFewSamples(LsxgcError):
    pass


class ParseError(LsxgcError):
    def __init__(self, line: int, column: int, token: str = ""):
        super().__init__(f"cannot parse {token!r} at line {line}, column {column}")
        self.line = line
        self.column = column


class NonFiniteValue(LsxgcError):
    pass


class RaggedRows(LsxgcError):
    pass


class ZeroResidualVariance(LsxgcError):
    def __init__(self, target: int):
        super().__init__(f"residual variance of target {target} is zero")
        self.target = target


class UnderdeterminedSystem(LsxgcError):
    def __init__(self, n_nodes: int, lag: int, n_samples: int):
        super().__init__(
            f"full VAR with N={n_nodes}, m={lag} needs T - m > N*m + 1, got T={n_samples}"
        )
        self.n_nodes = n_nodes
        self.lag = lag
        self.n_samples = n_samples


class DegenerateDistances(LsxgcError):
    pass


class StabilityNotReached(LsxgcError):
    pass


class NumericalBlowup(LsxgcError):
    pass


class InvalidParams(LsxgcError):
    pass


class IncompatibleSamplingRates(LsxgcError):
    pass


class ZeroPowerSignal(LsxgcError):
    pass


class DegenerateGroundTruth(LsxgcError):
    pass


class AllDifferencesZero(LsxgcError):
    pass


class EmptyInput(LsxgcError):
    pass
