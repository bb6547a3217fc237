"""Constructors and structural operations that keep expressions in normal form."""

from fractions import Fraction
from typing import Callable

from sympy import factorint

from src.jetcheck.enums import ExprClass
from src.jetcheck.exceptions import (
    ClassMismatch,
    InverseOfNonMatrix,
    NotPolynomialInParameter,
    UnsupportedInverse,
)
from src.jetcheck.expr.models import (
    Expr,
    FunctionApp,
    JetSymbol,
    Number,
    Parameter,
    ScalarAtom,
    TraceAtom,
    Word,
    make_term,
)

ODD_FUNCTIONS = ("sin", "arctan")
EVEN_FUNCTIONS = ("cos",)


def word_expr(word: Word, coeff: Number = 1) -> Expr:
    """Return the matrix expression ``coeff * word``."""
    return Expr.collect(ExprClass.MATRIX, [make_term(coeff, (), word)])


def _leading_negative(arg: Expr) -> bool:
    return not arg.is_zero and arg.terms[0].coeff < 0


def sqrt_of(arg: Expr) -> Expr:
    """Return ``sqrt(arg)``; rational constants are reduced to ``q * sqrt(squarefree)``."""
    if not arg.is_constant():
        return Expr.atom(FunctionApp("sqrt", arg))
    value = arg.constant_value()
    if value < 0:
        raise ValueError("sqrt of a negative constant is not a real number.")
    if value == 0:
        return Expr.zero()
    product = value.numerator * value.denominator
    outside, radicand = 1, 1
    for prime, mult in factorint(product).items():
        outside *= prime ** (mult // 2)
        radicand *= prime ** (mult % 2)
    coeff = Fraction(outside, value.denominator)
    if radicand == 1:
        return Expr.constant(coeff)
    return Expr.atom(FunctionApp("sqrt", Expr.constant(radicand))).scale(coeff)


def reciprocal(arg: Expr) -> Expr:
    """Return ``1/arg`` for a nonzero scalar expression."""
    if arg.cls is ExprClass.MATRIX and not arg.is_zero:
        raise ClassMismatch("Only scalar-class expressions have a reciprocal; use inv().")
    if arg.is_zero:
        raise ZeroDivisionError("Reciprocal of zero.")
    if arg.is_single_term:
        term = arg.terms[0]
        return Expr.collect(
            ExprClass.SCALAR,
            [make_term(1 / term.coeff, [(a, -k) for a, k in term.monomial])],
        )
    lead = arg.terms[0].coeff
    monic = arg.scale(1 / lead)
    return Expr.atom(FunctionApp("recip", monic)).scale(1 / lead)


def apply_function(func: str, arg: Expr) -> Expr:
    """Apply an elementary function with the normal-form simplifications.

    Parameters
    ----------
    func : str
        One of ``sin``, ``cos``, ``exp``, ``ln``, ``arctan``, ``sqrt`` and ``recip``.
    arg : Expr
        Scalar-class argument.

    Returns
    -------
    Expr
        The normalized application.
    """
    if arg.cls is ExprClass.MATRIX and not arg.is_zero:
        raise ClassMismatch(f"{func} needs a scalar argument.")
    arg = arg.as_class(ExprClass.SCALAR)
    if func == "sqrt":
        return sqrt_of(arg)
    if func == "recip":
        return reciprocal(arg)
    if arg.is_zero:
        if func in ("exp", "cos"):
            return Expr.constant(1)
        if func in ODD_FUNCTIONS:
            return Expr.zero()
    if func == "ln" and arg.is_constant() and arg.constant_value() == 1:
        return Expr.zero()
    if func in ODD_FUNCTIONS and _leading_negative(arg):
        return -Expr.atom(FunctionApp(func, -arg))
    if func in EVEN_FUNCTIONS and _leading_negative(arg):
        arg = -arg
    return Expr.atom(FunctionApp(func, arg))


def inverse(e: Expr) -> Expr:
    """Return the inverse of a single-term matrix expression."""
    if e.cls is not ExprClass.MATRIX:
        raise InverseOfNonMatrix("inv() needs a matrix-class argument.")
    if not e.is_single_term:
        raise UnsupportedInverse("inv() of a sum of matrix terms is not supported.")
    term = e.terms[0]
    return Expr.collect(
        ExprClass.MATRIX,
        [
            make_term(
                1 / term.coeff,
                [(a, -k) for a, k in term.monomial],
                [f.inverse() for f in reversed(term.word)],
            )
        ],
    )


def power(e: Expr, k: int) -> Expr:
    """Raise ``e`` to an integer power."""
    if k >= 0:
        result = Expr.constant(1, e.cls)
        for _ in range(k):
            result = result * e
        return result
    if e.cls is ExprClass.MATRIX:
        return power(inverse(e), -k)
    return power(reciprocal(e), -k)


def divide(numerator: Expr, denominator: Expr) -> Expr:
    """Return ``numerator / denominator``; a matrix denominator multiplies by its inverse."""
    return numerator * power(denominator, -1)


def transpose(e: Expr) -> Expr:
    """Return the transpose: words reversed, factor flags flipped, scalars untouched."""
    if e.cls is ExprClass.SCALAR:
        return e
    return Expr.collect(
        ExprClass.MATRIX,
        [
            make_term(t.coeff, t.monomial, [f.transpose() for f in reversed(t.word)])
            for t in e.terms
        ],
    )


def commutator(a: Expr, b: Expr) -> Expr:
    """Return ``a*b - b*a``."""
    return a * b - b * a


def trace(e: Expr) -> Expr:
    """Return the trace of a matrix-class expression."""
    if e.cls is not ExprClass.MATRIX and not e.is_zero:
        raise ClassMismatch("tr() needs a matrix-class argument.")
    return Expr.collect(
        ExprClass.SCALAR,
        [make_term(t.coeff, t.monomial + ((TraceAtom(t.word), 1),)) for t in e.terms],
    )


SymbolMap = Callable[[ScalarAtom | JetSymbol], Expr | None]


def replace_symbols(e: Expr, fn: SymbolMap) -> Expr:
    """Rebuild ``e`` atom by atom, replacing atoms for which ``fn`` returns an expression.

    Parameters
    ----------
    e : Expr
        Expression to rebuild.
    fn : callable
        Called with parameters, independent variables and jet symbols (scalar or matrix);
        returns the replacement or None to keep the atom.

    Returns
    -------
    Expr
        The normalized result.
    """
    total = Expr.zero(e.cls)
    for term in e.terms:
        product = Expr.constant(term.coeff, e.cls if not term.word else ExprClass.SCALAR)
        for atom, k in term.monomial:
            if isinstance(atom, FunctionApp):
                piece = apply_function(atom.func, replace_symbols(atom.arg, fn))
            elif isinstance(atom, TraceAtom):
                piece = trace(replace_symbols(word_expr(atom.word), fn))
            else:
                found = fn(atom)
                piece = Expr.atom(atom) if found is None else found
            product = product * power(piece, k)
        for factor in term.word:
            found = fn(factor.symbol)
            if found is None:
                piece = Expr.factor(factor)
            else:
                piece = transpose(found) if factor.transposed else found
                if factor.inverted:
                    piece = inverse(piece)
            product = product * piece
        total = total + product
    return total


def normalize(e: Expr) -> Expr:
    """Return the normal form of ``e``; idempotent."""
    return replace_symbols(e, lambda atom: None)


def contains_atom(e: Expr, predicate: Callable[[object], bool]) -> bool:
    """True when some atom or matrix factor of ``e`` satisfies ``predicate``."""
    return any(predicate(item) for item in e.iter_atoms())


def coefficients_in(e: Expr, param: Parameter | str) -> dict[int, Expr]:
    """Split ``e`` into its coefficients of powers of a parameter.

    Parameters
    ----------
    e : Expr
        A polynomial or finite Laurent expression in the parameter.
    param : Parameter or str
        The parameter.

    Returns
    -------
    dict of int to Expr
        Degree to nonzero coefficient.
    """
    atom = param if isinstance(param, Parameter) else Parameter(param)
    buckets: dict[int, list] = {}
    for term in e.terms:
        degree = 0
        rest = []
        for a, k in term.monomial:
            if a == atom:
                degree = k
                continue
            if isinstance(a, FunctionApp) and atom.name in a.arg.parameters():
                raise NotPolynomialInParameter(
                    f"'{atom.name}' occurs inside {a.func}(); cannot split by degree."
                )
            rest.append((a, k))
        buckets.setdefault(degree, []).append(make_term(term.coeff, rest, term.word))
    result = {d: Expr.collect(e.cls, terms) for d, terms in buckets.items()}
    return {d: result[d] for d in sorted(result) if not result[d].is_zero}


def from_coefficients(coefficients: dict[int, Expr], param: Parameter | str) -> Expr:
    """Inverse of `coefficients_in`: ``sum(param**d * c)``."""
    atom = param if isinstance(param, Parameter) else Parameter(param)
    total = Expr.zero()
    for degree, coeff in coefficients.items():
        total = total + Expr.atom(atom, degree) * coeff if degree else total + coeff
    return total

