"""Numeric evaluation of expressions under valuations of the jet coordinates.

Two backends are provided. Float mode computes with Python floats and numpy
arrays; exact mode computes with sympy rationals and sympy matrices, so that
polynomial identities evaluate to exactly zero.
"""

import math
from abc import ABC, abstractmethod
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np
import sympy as sp

from src.jetcheck.enums import ExprClass, NumericMode
from src.jetcheck.exceptions import SingularPoint, UnboundSymbol
from src.jetcheck.expr.models import (
    Expr,
    FunctionApp,
    IndependentVar,
    JetSymbol,
    Parameter,
    Term,
    TraceAtom,
)
from src.jetcheck.system.models import EquationSystem

Value = Any

SYMPY_NAMES = {
    "sin": sp.sin,
    "cos": sp.cos,
    "exp": sp.exp,
    "ln": sp.log,
    "log": sp.log,
    "arctan": sp.atan,
    "sqrt": sp.sqrt,
    "pi": sp.pi,
    "Matrix": sp.Matrix,
}


class Backend(ABC):
    """Arithmetic of one numeric mode."""

    mode: NumericMode

    @abstractmethod
    def number(self, value: Fraction | float) -> Value:
        """Convert a rational or float into the backend's scalar type."""

    @abstractmethod
    def function(self, name: str, x: Value) -> Value:
        """Apply a named elementary function."""

    @abstractmethod
    def identity(self, size: int) -> Value:
        """Return the identity matrix."""

    @abstractmethod
    def inverse(self, m: Value) -> Value:
        """Invert a matrix, raising `SingularPoint` when it is singular."""

    @abstractmethod
    def trace(self, m: Value) -> Value:
        """Return the trace of a matrix."""

    @abstractmethod
    def magnitude(self, value: Value) -> float:
        """Largest absolute value (entrywise for matrices) as a float."""


class FloatBackend(Backend):
    mode = NumericMode.FLOAT

    _functions = {
        "sin": math.sin,
        "cos": math.cos,
        "exp": math.exp,
        "ln": math.log,
        "arctan": math.atan,
        "sqrt": math.sqrt,
        "recip": lambda x: 1.0 / x,
    }

    def number(self, value: Fraction | float) -> float:
        return float(value)

    def function(self, name: str, x: Value) -> float:
        try:
            return self._functions[name](float(x))
        except (ValueError, ZeroDivisionError, OverflowError) as err:
            raise SingularPoint(f"{name}({x}) is undefined.") from err

    def identity(self, size: int) -> np.ndarray:
        return np.eye(size)

    def inverse(self, m: Value) -> np.ndarray:
        if abs(np.linalg.det(m)) < 1e-12:
            raise SingularPoint("A matrix is singular at the sample point.")
        return np.linalg.inv(m)

    def trace(self, m: Value) -> float:
        return float(np.trace(m))

    def magnitude(self, value: Value) -> float:
        result = float(np.max(np.abs(np.asarray(value, dtype=float))))
        if not math.isfinite(result):
            raise SingularPoint("Evaluation produced a non-finite value.")
        return result


class ExactBackend(Backend):
    mode = NumericMode.EXACT

    def number(self, value: Fraction | float) -> sp.Expr:
        if isinstance(value, Fraction):
            return sp.Rational(value.numerator, value.denominator)
        return sp.nsimplify(value, rational=True)

    def function(self, name: str, x: Value) -> sp.Expr:
        if name == "recip":
            if x == 0:
                raise SingularPoint("recip(0) is undefined.")
            return 1 / x
        return SYMPY_NAMES[name](x)

    def identity(self, size: int) -> sp.Matrix:
        return sp.eye(size)

    def inverse(self, m: Value) -> sp.Matrix:
        if m.det() == 0:
            raise SingularPoint("A matrix is singular at the sample point.")
        return m.inv()

    def trace(self, m: Value) -> sp.Expr:
        return m.trace()

    def magnitude(self, value: Value) -> float:
        entries = list(value) if isinstance(value, sp.MatrixBase) else [value]
        if any(sp.sympify(v).has(sp.zoo, sp.nan, sp.oo) for v in entries):
            raise SingularPoint("Evaluation produced a non-finite value.")
        return max((float(abs(sp.N(v))) for v in entries), default=0.0)


BACKENDS: dict[NumericMode, Backend] = {
    NumericMode.FLOAT: FloatBackend(),
    NumericMode.EXACT: ExactBackend(),
}


class Valuation(ABC):
    """Assigns numbers to jet coordinates, variables and parameters."""

    def __init__(self, mode: NumericMode, matrix_order: int) -> None:
        self.backend = BACKENDS[mode]
        self.matrix_order = matrix_order

    @abstractmethod
    def symbol(self, s: JetSymbol) -> Value:
        """Value of a jet coordinate (a matrix for matrix-class symbols)."""

    @abstractmethod
    def variable(self, name: str) -> Value:
        """Value of an independent variable."""

    @abstractmethod
    def parameter(self, name: str) -> Value:
        """Value of a parameter."""


def _scalar_atom(atom: object, valuation: Valuation) -> Value:
    b = valuation.backend
    if isinstance(atom, Parameter):
        return valuation.parameter(atom.name)
    if isinstance(atom, IndependentVar):
        return valuation.variable(atom.name)
    if isinstance(atom, JetSymbol):
        return valuation.symbol(atom)
    if isinstance(atom, FunctionApp):
        return b.function(atom.func, evaluate(atom.arg, valuation))
    if isinstance(atom, TraceAtom):
        return b.trace(_word(atom.word, valuation))
    raise TypeError(f"Cannot evaluate {atom!r}.")


def _word(word: Iterable, valuation: Valuation) -> Value:
    b = valuation.backend
    product = b.identity(valuation.matrix_order)
    for factor in word:
        m = valuation.symbol(factor.symbol)
        if factor.transposed:
            m = m.T
        if factor.inverted:
            m = b.inverse(m)
        product = product @ m
    return product


def _term(term: Term, cls: ExprClass, valuation: Valuation) -> Value:
    b = valuation.backend
    value = b.number(term.coeff)
    for atom, k in term.monomial:
        base = _scalar_atom(atom, valuation)
        try:
            value = value * base**k
        except ZeroDivisionError as err:
            raise SingularPoint(f"Division by zero in {atom!r}.") from err
    if cls is ExprClass.MATRIX:
        return value * _word(term.word, valuation)
    return value


def evaluate(e: Expr, valuation: Valuation) -> Value:
    """Evaluate an expression; matrix-class results are matrices.

    Parameters
    ----------
    e : Expr
        Expression to evaluate.
    valuation : Valuation
        Values of every atom ``e`` contains.

    Returns
    -------
    float, sympy number, numpy array or sympy Matrix
        Depending on the expression class and the valuation's mode.
    """
    b = valuation.backend
    if e.cls is ExprClass.MATRIX:
        total = b.number(Fraction(0)) * b.identity(valuation.matrix_order)
    else:
        total = b.number(Fraction(0))
    for term in e.terms:
        total = total + _term(term, e.cls, valuation)
    return total


def max_abs(e: Expr, valuation: Valuation) -> float:
    """Largest absolute value of ``e`` (entrywise for matrices) under a valuation."""
    return valuation.backend.magnitude(evaluate(e, valuation))


class RandomJetValuation(Valuation):
    """Independent seeded random values for every jet coordinate.

    Scalars are drawn uniformly from ``[-1, 1]``; matrices are the identity
    plus a small random perturbation so that they stay invertible. Symmetric
    symbols get symmetric matrices.

    Parameters
    ----------
    system : EquationSystem
        Declares the variables and parameters.
    seed : int, optional
        Seed of the draws.
    mode : NumericMode, optional
        Float or exact values.
    matrix_order : int, optional
        Size of the random matrices.
    draw : int, optional
        Index of the draw, advanced by `resample`.
    """

    def __init__(
        self,
        system: EquationSystem,
        seed: int = 1729,
        mode: NumericMode = NumericMode.FLOAT,
        matrix_order: int = 3,
        draw: int = 0,
    ) -> None:
        super().__init__(mode, matrix_order)
        self.system = system
        self.seed = seed
        self.draw = draw
        self._rng = np.random.default_rng([seed, draw])
        self._values: dict[object, Value] = {}

    def resample(self) -> "RandomJetValuation":
        """Return a fresh, independent draw with the same settings."""
        self.draw += 1
        return RandomJetValuation(
            self.system, self.seed, self.backend.mode, self.matrix_order, self.draw
        )

    def _scalar(self) -> Value:
        if self.backend.mode is NumericMode.EXACT:
            num = int(self._rng.integers(-9, 10))
            return sp.Rational(num, int(self._rng.integers(1, 10)))
        return float(self._rng.uniform(-1.0, 1.0))

    def _matrix(self, symmetric: bool) -> Value:
        n = self.matrix_order
        entries = [[self._scalar() for _ in range(n)] for _ in range(n)]
        if self.backend.mode is NumericMode.EXACT:
            m = sp.eye(n) + sp.Matrix(entries) / 4
            return (m + m.T) / 2 if symmetric else m
        m = np.eye(n) + 0.25 * np.array(entries)
        return (m + m.T) / 2 if symmetric else m

    def _cached(self, key: object, make: Any) -> Value:
        if key not in self._values:
            self._values[key] = make()
        return self._values[key]

    def symbol(self, s: JetSymbol) -> Value:
        if s.cls is ExprClass.MATRIX:
            return self._cached(s, lambda: self._matrix(s.symmetric))
        return self._cached(s, self._scalar)

    def variable(self, name: str) -> Value:
        return self._cached(("var", name), self._scalar)

    def parameter(self, name: str) -> Value:
        return self._cached(("param", name), self._scalar)


def parse_closed_form(text: str, variables: Iterable[str], parameters: Iterable[str] = ()) -> Any:
    """Parse a closed-form solution (sympy syntax, ``arctan`` and ``ln`` allowed)."""
    local = dict(SYMPY_NAMES)
    local.update({name: sp.Symbol(name, real=True) for name in [*variables, *parameters]})
    return sp.parse_expr(text, local_dict=local)


@dataclass
class ClosedFormBinding:
    """Closed-form solutions bound to dependent symbols.

    Parameters
    ----------
    variables : tuple of str
        Independent variables of the closed forms.
    functions : dict of str to sympy expression or Matrix
        Dependent symbol name to its closed form.
    parameters : dict of str to Fraction or float
        Numeric parameter values.
    mode : NumericMode
        Float or exact evaluation.
    """

    variables: tuple[str, ...]
    functions: dict[str, Any]
    parameters: dict[str, Fraction | float] = field(default_factory=dict)
    mode: NumericMode = NumericMode.FLOAT
    _derivatives: dict[tuple[str, tuple[int, ...]], Any] = field(default_factory=dict, repr=False)

    @classmethod
    def from_texts(
        cls,
        variables: Iterable[str],
        texts: Mapping[str, str],
        parameters: Mapping[str, Fraction | float] | None = None,
        mode: NumericMode = NumericMode.FLOAT,
    ) -> "ClosedFormBinding":
        """Build a binding from closed forms written as text."""
        variables = tuple(variables)
        parameters = dict(parameters or {})
        functions = {
            name: parse_closed_form(text, variables, parameters) for name, text in texts.items()
        }
        return cls(variables, functions, parameters, mode)

    def derivative(self, name: str, counts: tuple[int, ...]) -> Any:
        """Closed form of a derivative, differentiated symbolically and cached."""
        if name not in self.functions:
            raise UnboundSymbol(f"No closed form is bound to '{name}'.")
        key = (name, counts)
        if key not in self._derivatives:
            expr = self.functions[name]
            for var, count in zip(self.variables, counts):
                if count:
                    expr = sp.diff(expr, sp.Symbol(var, real=True), count)
            self._derivatives[key] = expr
        return self._derivatives[key]

    def at(self, point: Mapping[str, Fraction | float]) -> "ClosedFormValuation":
        """Return the valuation at one sample point."""
        return ClosedFormValuation(self, dict(point))


class ClosedFormValuation(Valuation):
    """Values of closed forms and their derivatives at one point."""

    def __init__(self, binding: ClosedFormBinding, point: dict[str, Fraction | float]) -> None:
        order = 2
        for value in binding.functions.values():
            if isinstance(value, sp.MatrixBase):
                order = value.shape[0]
        super().__init__(binding.mode, order)
        self.binding = binding
        self.point = point
        self._subs = {
            sp.Symbol(k, real=True): self.backend.number(v)
            for k, v in [*point.items(), *binding.parameters.items()]
        }

    def symbol(self, s: JetSymbol) -> Value:
        counts = tuple(
            s.index.count(v) if v in s.index.variables else 0 for v in self.binding.variables
        )
        if sum(counts) != s.index.order:
            raise UnboundSymbol(f"'{s.text()}' differentiates in a variable the closed form lacks.")
        expr = self.binding.derivative(s.name, counts)
        value = expr.subs(self._subs)
        if self.backend.mode is NumericMode.EXACT:
            return value
        if isinstance(value, sp.MatrixBase):
            result = np.array(value.evalf(), dtype=float)
            if not np.all(np.isfinite(result)):
                raise SingularPoint(f"'{s.text()}' is singular at {self.point}.")
            return result
        try:
            result = float(value)
        except TypeError as err:
            raise SingularPoint(f"'{s.text()}' is not real at {self.point}.") from err
        if not math.isfinite(result):
            raise SingularPoint(f"'{s.text()}' is singular at {self.point}.")
        return result

    def variable(self, name: str) -> Value:
        if name not in self.point:
            raise UnboundSymbol(f"No value for the variable '{name}'.")
        return self.backend.number(self.point[name])

    def parameter(self, name: str) -> Value:
        if name not in self.binding.parameters:
            raise UnboundSymbol(f"No value for the parameter '{name}'.")
        return self.backend.number(self.binding.parameters[name])


def sample_points(
    domain: Mapping[str, tuple[float, float]],
    count: int,
    seed: int = 1729,
    mode: NumericMode = NumericMode.FLOAT,
) -> list[dict[str, Fraction | float]]:
    """Draw seeded sample points uniformly from a box.

    In exact mode the coordinates are rationals with denominator 64.
    """
    rng = np.random.default_rng(seed)
    points = []
    for _ in range(count):
        point: dict[str, Fraction | float] = {}
        for var, (low, high) in domain.items():
            x = float(rng.uniform(low, high))
            point[var] = Fraction(round(x * 64), 64) if mode is NumericMode.EXACT else x
        points.append(point)
    return points


def sample_residual(
    e: Expr,
    binding: ClosedFormBinding,
    points: Iterable[Mapping[str, Fraction | float]],
) -> float:
    """Largest absolute value of ``e`` over sample points of a closed-form solution.

    Parameters
    ----------
    e : Expr
        Expression in the bound symbols.
    binding : ClosedFormBinding
        Closed forms of every dependent symbol ``e`` contains.
    points : iterable of mapping
        Sample points (variable name to value).

    Returns
    -------
    float
        ``max |e|``; exactly 0.0 in exact mode when ``e`` vanishes at every point.

    Raises
    ------
    UnboundSymbol
        When a symbol or parameter has no value.
    SingularPoint
        When the closed form is undefined at a point.
    """
    missing = {s.name for s in e.symbols()} - set(binding.functions)
    if missing:
        raise UnboundSymbol(f"No closed form is bound to {sorted(missing)}.")
    return max((max_abs(e, binding.at(point)) for point in points), default=0.0)
