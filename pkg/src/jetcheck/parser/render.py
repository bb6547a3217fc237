"""Deterministic text rendering of normal-form expressions.

The output is valid input for `parse_expression`, so rendering and parsing
round-trip on every normal form.
"""

from fractions import Fraction

from src.jetcheck.enums import ExprClass
from src.jetcheck.expr.models import (
    Expr,
    FunctionApp,
    IndependentVar,
    JetSymbol,
    MatrixFactor,
    Parameter,
    Term,
    TraceAtom,
)


def render_coeff(value: Fraction) -> str:
    """Render a positive rational, ``3`` or ``1/2``."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def render_factor(factor: MatrixFactor) -> str:
    """Render ``J``, ``inv(J)``, ``tp(J)`` or ``inv(tp(J))``."""
    text = factor.symbol.text()
    if factor.transposed:
        text = f"tp({text})"
    if factor.inverted:
        text = f"inv({text})"
    return text


def _render_word(word: tuple[MatrixFactor, ...]) -> str:
    return "*".join(render_factor(f) for f in word) if word else "Id"


def render_atom(atom: object, exponent: int = 1) -> str:
    """Render a scalar atom raised to ``exponent``."""
    if isinstance(atom, FunctionApp) and atom.func == "recip":
        return f"({render(atom.arg)})^{-exponent}"
    if isinstance(atom, (Parameter, IndependentVar)):
        text = atom.name
    elif isinstance(atom, JetSymbol):
        text = atom.text()
    elif isinstance(atom, FunctionApp):
        text = f"{atom.func}({render(atom.arg)})"
    elif isinstance(atom, TraceAtom):
        text = f"tr({_render_word(atom.word)})"
    else:
        raise TypeError(f"Cannot render {atom!r}.")
    return text if exponent == 1 else f"{text}^{exponent}"


def _render_term(term: Term, cls: ExprClass) -> str:
    factors = [render_atom(atom, k) for atom, k in term.monomial]
    if term.word:
        factors.extend(render_factor(f) for f in term.word)
    elif cls is ExprClass.MATRIX:
        factors.append("Id")
    magnitude = abs(term.coeff)
    if not factors:
        return render_coeff(magnitude)
    if magnitude == 1:
        return "*".join(factors)
    return "*".join([render_coeff(magnitude)] + factors)


def render(e: Expr) -> str:
    """Render an expression.

    Parameters
    ----------
    e : Expr
        Any normal-form expression.

    Returns
    -------
    str
        Text such as ``u_xt - sin(u)`` or ``X*M - M*X``; zero renders as ``0``.
    """
    if e.is_zero:
        return "0"
    parts = []
    for pos, term in enumerate(e.terms):
        body = _render_term(term, e.cls)
        if pos == 0:
            parts.append(f"-{body}" if term.coeff < 0 else body)
        else:
            parts.append(f" - {body}" if term.coeff < 0 else f" + {body}")
    return "".join(parts)
