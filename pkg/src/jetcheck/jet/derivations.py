"""Derivations on jet-space expressions.

A `Derivation` is linear, satisfies the Leibniz rule without reordering
matrix factors, and acts through the chain rule on function atoms and
through ``d(A^-1) = -A^-1 dA A^-1`` on inverted factors. Subclasses only
say what happens to jet symbols and independent variables:

* `TotalDerivative` raises the multi-index (``D_x u_t = u_xt``),
* `LieDerivative` maps ``u_I`` to ``D_I Q`` for a characteristic ``Q``,
* `PartialDerivative` differentiates with respect to one jet coordinate.
"""

from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Callable

from src.jetcheck.enums import ExprClass
from src.jetcheck.exceptions import (
    ClassMismatch,
    MatrixClassUnsupported,
    TargetMismatch,
    UndeclaredLieAction,
    UnknownVariable,
)
from src.jetcheck.expr.models import (
    Expr,
    FunctionApp,
    IndependentVar,
    JetSymbol,
    MatrixFactor,
    MultiIndex,
    Parameter,
    TraceAtom,
    Term,
    make_term,
)
from src.jetcheck.expr.normalize import apply_function, power, trace, transpose, word_expr
from src.jetcheck.system.models import Characteristic, EquationSystem

Rewrite = Callable[[JetSymbol], Expr | None]


class Derivation(ABC):
    """Abstract base class for derivations of the expression algebra."""

    @abstractmethod
    def on_symbol(self, symbol: JetSymbol) -> Expr:
        """Return the image of a jet symbol (scalar or matrix).

        Parameters
        ----------
        symbol : JetSymbol
            The jet coordinate.

        Returns
        -------
        Expr
            An expression of the symbol's class.
        """
        pass

    @abstractmethod
    def on_variable(self, var: IndependentVar) -> Expr:
        """Return the image of an independent variable."""
        pass

    def on_parameter(self, param: Parameter) -> Expr:
        """Parameters are constants for every derivation here."""
        return Expr.zero()

    def apply(self, e: Expr) -> Expr:
        """Apply the derivation to an expression.

        Parameters
        ----------
        e : Expr
            Expression to differentiate.

        Returns
        -------
        Expr
            The normalized image, of the same class as ``e``.
        """
        total = Expr.zero(e.cls)
        for term in e.terms:
            total = total + self._apply_term(term, e.cls)
        return total

    def _apply_term(self, term: Term, cls: ExprClass) -> Expr:
        total = Expr.zero(cls)
        for pos, (atom, k) in enumerate(term.monomial):
            d_atom = self._atom(atom)
            if d_atom.is_zero:
                continue
            rest = list(term.monomial)
            rest[pos] = (atom, k - 1)
            total = total + Expr.collect(cls, [make_term(term.coeff * k, rest, term.word)]) * d_atom
        for pos, factor in enumerate(term.word):
            d_factor = self._factor(factor)
            if d_factor.is_zero:
                continue
            left = Expr.collect(
                ExprClass.MATRIX, [make_term(term.coeff, term.monomial, term.word[:pos])]
            )
            total = total + left * d_factor * word_expr(term.word[pos + 1 :])
        return total

    def _atom(self, atom: object) -> Expr:
        if isinstance(atom, Parameter):
            return self.on_parameter(atom)
        if isinstance(atom, IndependentVar):
            return self.on_variable(atom)
        if isinstance(atom, JetSymbol):
            return self.on_symbol(atom)
        if isinstance(atom, TraceAtom):
            return trace(self.apply(word_expr(atom.word)))
        if isinstance(atom, FunctionApp):
            return self._chain(atom)
        raise TypeError(f"Cannot differentiate {atom!r}.")

    def _chain(self, app: FunctionApp) -> Expr:
        inner = self.apply(app.arg)
        if inner.is_zero:
            return Expr.zero()
        arg = app.arg
        if app.func == "sin":
            outer = apply_function("cos", arg)
        elif app.func == "cos":
            outer = -apply_function("sin", arg)
        elif app.func == "exp":
            outer = apply_function("exp", arg)
        elif app.func == "ln":
            outer = power(arg, -1)
        elif app.func == "arctan":
            outer = power(arg * arg + 1, -1)
        elif app.func == "recip":
            outer = -power(Expr.atom(app), 2)
        else:
            outer = power(Expr.atom(app), -1).scale(Fraction(1, 2))
        return outer * inner

    def _factor(self, factor: MatrixFactor) -> Expr:
        image = self.on_symbol(factor.symbol)
        if image.is_zero:
            return Expr.zero(ExprClass.MATRIX)
        if image.cls is not ExprClass.MATRIX:
            raise ClassMismatch(f"Image of matrix '{factor.symbol.text()}' is scalar-class.")
        if factor.transposed:
            image = transpose(image)
        if factor.inverted:
            own = Expr.factor(factor)
            image = -(own * image * own)
        return image


class TotalDerivative(Derivation):
    """Total derivative ``D_var`` on the jet space of a system.

    Parameters
    ----------
    var : str
        Independent variable.
    variables : tuple of str
        Declared variables of the system.
    rewrite : callable, optional
        Applied to every produced jet symbol; returning an expression replaces it.
    """

    def __init__(
        self, var: str, variables: tuple[str, ...], rewrite: Rewrite | None = None
    ) -> None:
        if var not in variables:
            raise UnknownVariable(f"'{var}' is not one of the variables {variables}.")
        self.var = var
        self.variables = variables
        self.rewrite = rewrite

    def on_symbol(self, symbol: JetSymbol) -> Expr:
        if self.var in symbol.constant_in:
            return Expr.zero(symbol.cls)
        raised = symbol.with_index(symbol.index.bump(self.var))
        if self.rewrite is not None:
            replaced = self.rewrite(raised)
            if replaced is not None:
                return replaced.as_class(symbol.cls)
        return Expr.symbol(raised)

    def on_variable(self, var: IndependentVar) -> Expr:
        return Expr.constant(1) if var.name == self.var else Expr.zero()


def total_derivative(
    e: Expr, var: str, system: EquationSystem, rewrite: Rewrite | None = None
) -> Expr:
    """Return ``D_var e``.

    Parameters
    ----------
    e : Expr
        Expression to differentiate.
    var : str
        Independent variable of ``system``.
    system : EquationSystem
        Supplies the declared variables.
    rewrite : callable, optional
        Potential-rule hook applied to produced jet symbols.

    Returns
    -------
    Expr
        The derivative.
    """
    return TotalDerivative(var, system.variables, rewrite).apply(e)


def apply_index(
    e: Expr, index: MultiIndex, variables: tuple[str, ...], rewrite: Rewrite | None = None
) -> Expr:
    """Return ``D_I e`` for a multi-index ``I``."""
    result = e
    for var in index.steps():
        if result.is_zero:
            break
        result = TotalDerivative(var, variables, rewrite).apply(result)
    return result


class LieDerivative(Derivation):
    """Lie derivative along a characteristic: ``L u_I = D_I Q``.

    Symbols declared as functions of a subset of the variables are constants;
    any other symbol that is not a target raises `UndeclaredLieAction`.
    """

    def __init__(self, characteristic: Characteristic, variables: tuple[str, ...]) -> None:
        self.components = characteristic.components()
        self.variables = variables
        self._prolonged: dict[tuple[str, MultiIndex], Expr] = {}

    def on_symbol(self, symbol: JetSymbol) -> Expr:
        q = self.components.get(symbol.name)
        if q is None:
            if symbol.is_constant:
                return Expr.zero(symbol.cls)
            raise UndeclaredLieAction(
                f"No characteristic component acts on '{symbol.text()}' and it is not declared "
                "constant."
            )
        if not q.is_zero and q.cls is not symbol.cls:
            raise ClassMismatch(f"Characteristic class differs from '{symbol.name}'.")
        key = (symbol.name, symbol.index)
        if key not in self._prolonged:
            self._prolonged[key] = apply_index(q, symbol.index, self.variables).as_class(symbol.cls)
        return self._prolonged[key]

    def on_variable(self, var: IndependentVar) -> Expr:
        return Expr.zero()


def lie_apply(q: Characteristic, e: Expr, system: EquationSystem) -> Expr:
    """Return ``L_Q e``."""
    return LieDerivative(q, system.variables).apply(e)


def lie_bracket(q1: Characteristic, q2: Characteristic, system: EquationSystem) -> Characteristic:
    """Return the characteristic ``L_1(Q_2) - L_2(Q_1)``.

    Parameters
    ----------
    q1, q2 : Characteristic
        Characteristics with the same target.
    system : EquationSystem
        Ambient system.

    Returns
    -------
    Characteristic
        The bracket, not yet reduced modulo the equations.
    """
    if q1.target != q2.target:
        raise TargetMismatch(f"Cannot bracket characteristics of '{q1.target}' and '{q2.target}'.")
    bracket = lie_apply(q1, q2.expr, system) - lie_apply(q2, q1.expr, system)
    name = f"[{q1.name or '?'}, {q2.name or '?'}]"
    return Characteristic(target=q1.target, expr=bracket, name=name)


class PartialDerivative(Derivation):
    """Partial derivative with respect to one scalar jet coordinate."""

    def __init__(self, coordinate: JetSymbol) -> None:
        if coordinate.cls is ExprClass.MATRIX:
            raise MatrixClassUnsupported("Partial derivatives need a scalar coordinate.")
        self.coordinate = coordinate

    def apply(self, e: Expr) -> Expr:
        if e.cls is ExprClass.MATRIX and not e.is_zero:
            raise MatrixClassUnsupported("Partial derivatives act on scalar-class expressions.")
        return super().apply(e)

    def on_symbol(self, symbol: JetSymbol) -> Expr:
        if symbol.cls is ExprClass.MATRIX:
            raise MatrixClassUnsupported(f"Matrix symbol '{symbol.name}' in a scalar expression.")
        return Expr.constant(1) if symbol == self.coordinate else Expr.zero()

    def on_variable(self, var: IndependentVar) -> Expr:
        return Expr.zero()
