"""Exception hierarchy. Every error carries a short ``code`` used by the CLI."""


class CDPPError(Exception):
    code = "Error"


class ParseError(CDPPError):
    code = "ParseError"


class NotSymmetric(CDPPError):
    code = "NotSymmetric"


class NotPSD(CDPPError):
    code = "NotPSD"


class ArityMismatch(CDPPError):
    code = "ArityMismatch"


class TooLarge(CDPPError):
    code = "TooLarge"


class VariableClash(CDPPError):
    code = "VariableClash"


class RankDeficient(CDPPError):
    code = "RankDeficient"


class DegreeExceeded(CDPPError):
    code = "DegreeExceeded"


class GridTooLarge(CDPPError):
    code = "GridTooLarge"


class NumericalResolutionExceeded(CDPPError):
    code = "NumericalResolutionExceeded"


class NegativeMass(NumericalResolutionExceeded):
    code = "NegativeMass"


class NullMass(CDPPError):
    code = "NullMass"


class NonConvergence(CDPPError):
    code = "NonConvergence"


class Disconnected(CDPPError):
    code = "Disconnected"


class OddVertexCount(CDPPError):
    code = "OddVertexCount"


class CostBudgetExceeded(CDPPError):
    code = "CostBudgetExceeded"


class DimensionMismatch(CDPPError):
    code = "DimensionMismatch"


class DimensionBudgetExceeded(CDPPError):
    code = "DimensionBudgetExceeded"
