"""Exceptions raised by the jetcheck verification engine."""

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceSpan:
    """Character offsets ``[start, end)`` into a parsed text."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise ValueError("SourceSpan start must not exceed end.")


class JetcheckError(Exception):
    """Base class for every jetcheck domain error."""

    pass


class InputError(JetcheckError):
    """Base class for errors caused by user input (exit code 2 on the command line)."""

    pass


class ParseError(InputError):
    """Base class for errors located in an expression or definition text.

    Parameters
    ----------
    message : str
        Human readable description.
    span : SourceSpan or None, optional
        Offsets of the offending text inside the parsed string.
    line : int or None, optional
        1-based line of a definition file, set when the error comes from one.
    """

    def __init__(
        self, message: str, span: SourceSpan | None = None, line: int | None = None
    ) -> None:
        super().__init__(message)
        self.message = message
        self.span = span
        self.line = line

    def __str__(self) -> str:
        where = []
        if self.line is not None:
            where.append(f"line {self.line}")
        if self.span is not None:
            where.append(f"chars {self.span.start}-{self.span.end}")
        return f"{self.message} ({', '.join(where)})" if where else self.message


class ExpressionSyntaxError(ParseError):
    """Exception raised for text that does not follow the expression grammar."""

    pass


class UndeclaredSymbol(ParseError):
    """Exception raised when an expression names a symbol nobody declared."""

    pass


class DuplicateName(ParseError):
    """Exception raised when a definition file declares the same name twice."""

    pass


class MissingOrientation(ParseError):
    """Exception raised for an equation without a leading derivative."""

    pass


class DefinitionFormatError(ParseError):
    """Exception raised for malformed definition-file lines or sections."""

    pass


class UnknownEntry(InputError):
    """Exception raised for a catalog entry name that does not exist."""

    pass


class ClassMismatch(JetcheckError):
    """Exception raised when scalar and matrix classes are combined illegally."""

    pass


class InverseOfNonMatrix(JetcheckError):
    """Exception raised when ``inv`` is applied to a scalar-class expression."""

    pass


class UnsupportedInverse(JetcheckError):
    """Exception raised when ``inv`` is applied to a sum of matrix terms."""

    pass


class UnknownSymbol(JetcheckError):
    """Exception raised when a substitution binds a name the expression cannot carry."""

    pass


class NotPolynomialInParameter(JetcheckError):
    """Exception raised when a parameter sits inside a function argument."""

    pass


class UnknownVariable(JetcheckError):
    """Exception raised for a derivative with respect to an undeclared variable."""

    pass


class TargetMismatch(JetcheckError):
    """Exception raised when two characteristics act on different symbols."""

    pass


class UndeclaredLieAction(JetcheckError):
    """Exception raised when a Lie derivative meets a symbol it has no rule for."""

    pass


class NonlinearInLeading(JetcheckError):
    """Exception raised when an equation cannot be solved for its leading derivative."""

    pass


class LeadingAbsent(JetcheckError):
    """Exception raised when the declared leading derivative does not occur."""

    pass


class PassLimitExceeded(JetcheckError):
    """Exception raised when reduction does not settle within the pass limit."""

    pass


class NotSolvable(JetcheckError):
    """Exception raised when a BT relation cannot be solved for the eliminated symbol."""

    pass


class MixedDerivativeMismatch(JetcheckError):
    """Exception raised when BT relations do not isolate two distinct first derivatives."""

    pass


class EliminationFailure(JetcheckError):
    """Exception raised when Lax-pair auxiliary derivatives cannot be eliminated."""

    pass


class NotLaurent(JetcheckError):
    """Exception raised when a Lax relation is not a Laurent polynomial in its parameter."""

    pass


class Type4Unsupported(JetcheckError):
    """Exception raised when the total-derivative triviality test gets a matrix density."""

    pass


class MatrixClassUnsupported(JetcheckError):
    """Exception raised when the Euler operator receives a matrix-class expression."""

    pass


class RankDeficientBasis(JetcheckError):
    """Exception raised when a span basis is linearly dependent."""

    pass


class NotInSpan(JetcheckError):
    """Exception raised when a target is not a rational combination of the basis."""

    pass


class NotClosed(JetcheckError):
    """Exception raised when a bracket of basis characteristics leaves the span.

    Parameters
    ----------
    i : int
        1-based index of the first characteristic.
    j : int
        1-based index of the second characteristic.
    residual : str
        Rendered reduced bracket.
    """

    def __init__(self, i: int, j: int, residual: str) -> None:
        super().__init__(f"bracket ({i}, {j}) is not in the span: {residual}")
        self.i = i
        self.j = j
        self.residual = residual


class SingularPoint(JetcheckError):
    """Exception raised when a closed form cannot be evaluated at a sample point."""

    pass


class UnboundSymbol(JetcheckError):
    """Exception raised when a numeric valuation has no value for a symbol."""

    pass


class SingularSample(JetcheckError):
    """Exception raised when random matrices stay singular after every retry."""

    pass


class NoConvergence(JetcheckError):
    """Exception raised when finite differences disagree with symbolic derivatives."""

    pass


class DocDrift(JetcheckError):
    """Exception raised when a walkthrough page no longer matches the CLI output."""

    pass
