"""Exception hierarchy shared across the package."""


class ParaverifyError(Exception):
    """Base class for all errors raised by this package."""


class ExpressionSyntaxError(ParaverifyError):
    """Malformed expression text."""


class UnknownIdentifierError(ExpressionSyntaxError):
    """Identifier does not resolve to a chart coordinate."""


class EvaluationDomainError(ParaverifyError):
    """Evaluation left the domain of an elementary function (log of a
    non-positive number, division by zero, sec at a zero of cos, ...)."""


class DegenerateMetricError(ParaverifyError):
    """Metric matrix is singular (or numerically singular) at a point."""


class SignatureMismatchError(ParaverifyError):
    """Eigenvalue signs of a metric sample disagree with its declared signature."""


class FrameDegeneracyError(ParaverifyError):
    """Rank-deficient Jacobian, lightlike tangent direction, or degenerate
    normal frame at a sample point."""


class UnsupportedValenceError(ParaverifyError):
    """Tensor valence outside what an operation supports."""


class ScenarioError(ParaverifyError):
    """Scenario document fails schema validation or internal consistency."""
