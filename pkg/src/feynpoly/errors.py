"""Exception types.

Each error carries the process exit code that the command line front end
reports for it: 2 for malformed input, 3 for violated preconditions and 4
for an exhausted evaluation budget.
"""


class FeynpolyError(Exception):
    exit_code = 3


class ParseError(FeynpolyError):
    exit_code = 2

    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + where)
        self.line = line
        self.column = column


class InvalidGraph(FeynpolyError):
    exit_code = 2


class ZeroPolynomial(FeynpolyError):
    pass


class NotMassMomentumSpanning(FeynpolyError):
    pass


class ReconstructionStuck(FeynpolyError):
    pass


class NotUnionClosed(FeynpolyError):
    pass


class OddDimension(FeynpolyError):
    pass


class NotMotic(FeynpolyError):
    pass


class InhomogeneousNumerator(FeynpolyError):
    pass


class DivergentIntegrand(FeynpolyError):
    pass


class NonGenericPoint(FeynpolyError):
    pass


class BudgetExceeded(FeynpolyError):
    exit_code = 4
