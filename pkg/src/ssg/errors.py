"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command line front end:
2 for validation failures, 3 for verification failures, 4 for exhausted
budgets.
"""


class SSGError(Exception):
    exit_code = 2


class ValidationError(SSGError):
    exit_code = 2


class VerificationError(SSGError):
    exit_code = 3


class BudgetError(SSGError):
    exit_code = 4


class InfiniteIndex(ValidationError):
    def __init__(self, msg="subgroup has infinite index", partial=None):
        super().__init__(msg)
        self.partial = partial


class SearchExhausted(BudgetError):
    pass


class ClosureBudgetExceeded(BudgetError):
    pass


class RewritingBudgetExceeded(BudgetError):
    pass


class NotApplicable(ValidationError):
    pass


class PrecondViolated(ValidationError):
    pass


class FamilyMismatch(ValidationError):
    pass


class NotInDomain(ValidationError):
    pass


class NotTransitive(ValidationError):
    pass


class BadArity(ValidationError):
    pass


class BadLetter(ValidationError):
    pass


class BadPrime(ValidationError):
    pass


class UnknownGenerator(ValidationError):
    pass


class ExprSyntaxError(ValidationError):
    def __init__(self, msg, column):
        super().__init__(f"{msg} at column {column}")
        self.column = column


class VerificationFailed(VerificationError):
    pass


class NonIntegralGamma(VerificationError):
    pass


class NonIntegralAlphaBeta(VerificationError):
    pass


class RelationFailed(VerificationError):
    def __init__(self, msg, relation=None):
        super().__init__(msg)
        self.relation = relation
