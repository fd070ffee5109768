"""Exception types raised by the package.

Validation errors subclass ValueError so that callers who do not care
about the fine-grained taxonomy can catch the familiar builtin.
"""


class EprStatesError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(EprStatesError, ValueError):
    """Input fails a structural or numerical precondition."""


class InvariantError(ValidationError):
    """A type invariant (finiteness, hermiticity, normalization) fails."""


class NonSquareError(ValidationError):
    """A square matrix was required."""


class NotHermitianError(InvariantError):
    """Matrix is not Hermitian within the zero threshold."""


class ShapeMismatchError(ValidationError):
    """Operands have incompatible shapes."""


class DimensionMismatchError(ValidationError):
    """Objects live on spaces of different dimensions."""


class NotNormalizedError(ValidationError):
    """A unit-norm state (or unit-trace matrix) was required."""


class ZeroStateError(ValidationError):
    """The state has (numerically) zero norm."""


class NotInAlgebraError(ValidationError):
    """Observable does not commute with the state's gram operator."""


class NotMaximalEprError(ValidationError):
    """State is not maximally correlated (gram operator is not scalar)."""


class WeightMismatchError(ValidationError):
    """Schmidt weights do not satisfy the unit-norm constraint."""


class BlocksNotOrthogonalError(ValidationError):
    """Supplied subspace bases are not mutually orthonormal."""


class NotIsometryError(ValidationError):
    """Imbedding matrix fails the isometry condition W†W = I."""


class GraphUndefinedError(ValidationError):
    """Prediction graph is missing a value of positive probability."""


class PreconditionFailedError(ValidationError):
    """A documented precondition of the operation does not hold."""


class DuplicateValuesError(ValidationError):
    """Assigned observable values must be pairwise distinct."""


class NotPositiveError(ValidationError):
    """Matrix is not positive semidefinite within tolerance."""


class CellOutOfRangeError(ValidationError):
    """Grid cell index lies outside the embedding."""


class ParseError(ValidationError):
    """Input file is not valid JSON/CSV."""


class SchemaError(ValidationError):
    """Input file parses but does not match the expected schema."""


class NumericalError(EprStatesError, ArithmeticError):
    """An iterative numerical procedure failed."""


class NoConvergenceError(NumericalError):
    """Eigensolver hit its sweep cap before converging."""


class QuadratureFailureError(NumericalError):
    """Requested quadrature accuracy or tail bound cannot be met."""
