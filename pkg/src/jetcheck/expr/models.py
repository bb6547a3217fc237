"""Models for jet-space expressions.

This module defines the atoms an expression is built from (parameters,
independent variables, jet symbols, function applications and matrix
factors), the `Term` of a sum, and the immutable `Expr` in normal form.
Every constructor returns normalized values, so two expressions are equal
exactly when their normal forms coincide.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Union

from src.jetcheck.enums import ExprClass
from src.jetcheck.exceptions import ClassMismatch, UnknownVariable

Number = Union[int, Fraction]

FUNCTION_NAMES = ("sin", "cos", "exp", "ln", "arctan", "sqrt", "recip")


@dataclass(frozen=True)
class MultiIndex:
    """Derivative counts per independent variable of the ambient system.

    Parameters
    ----------
    variables : tuple of str
        The system's independent variables in declared order.
    counts : tuple of int
        Nonnegative derivative count for each variable.
    """

    variables: tuple[str, ...]
    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.variables) != len(self.counts):
            raise ValueError("MultiIndex needs one count per variable.")
        if any(c < 0 for c in self.counts):
            raise ValueError("MultiIndex counts must be nonnegative.")

    @classmethod
    def zero(cls, variables: tuple[str, ...]) -> "MultiIndex":
        """Return the empty multi-index over ``variables``."""
        return cls(variables, (0,) * len(variables))

    @property
    def order(self) -> int:
        """Total number of derivatives."""
        return sum(self.counts)

    def count(self, var: str) -> int:
        """Return how often ``var`` occurs."""
        if var not in self.variables:
            raise UnknownVariable(f"'{var}' is not an independent variable here.")
        return self.counts[self.variables.index(var)]

    def bump(self, var: str, by: int = 1) -> "MultiIndex":
        """Return the index with one more derivative in ``var``."""
        if var not in self.variables:
            raise UnknownVariable(f"'{var}' is not an independent variable here.")
        pos = self.variables.index(var)
        counts = list(self.counts)
        counts[pos] += by
        return MultiIndex(self.variables, tuple(counts))

    def dominates(self, other: "MultiIndex") -> bool:
        """Componentwise ``self >= other``."""
        return all(a >= b for a, b in zip(self.counts, other.counts))

    def minus(self, other: "MultiIndex") -> "MultiIndex":
        """Return ``self - other``; ``self`` must dominate ``other``."""
        return MultiIndex(self.variables, tuple(a - b for a, b in zip(self.counts, other.counts)))

    def plus(self, other: "MultiIndex") -> "MultiIndex":
        """Return ``self + other``."""
        return MultiIndex(self.variables, tuple(a + b for a, b in zip(self.counts, other.counts)))

    def lcm(self, other: "MultiIndex") -> "MultiIndex":
        """Return the componentwise maximum."""
        counts = tuple(max(a, b) for a, b in zip(self.counts, other.counts))
        return MultiIndex(self.variables, counts)

    def steps(self) -> list[str]:
        """Return the derivative variables one by one, in declared order."""
        return [v for v, c in zip(self.variables, self.counts) for _ in range(c)]

    def suffix(self) -> str:
        """Return the subscript spelling, e.g. ``"xt"`` or ``"yyb"``."""
        return "".join(self.steps())

    def rank_key(self) -> tuple[int, tuple[int, ...]]:
        """Ordering used to choose among competing leading derivatives."""
        return (self.order, self.counts)


@dataclass(frozen=True)
class Parameter:
    """A named commuting constant such as ``a``, ``c`` or ``lam``."""

    name: str

    def sort_key(self) -> tuple:
        return (self.name, (), 0, ())


@dataclass(frozen=True)
class IndependentVar:
    """An independent variable such as ``x``, ``t`` or ``rho``."""

    name: str

    def sort_key(self) -> tuple:
        return (self.name, (), 1, ())


@dataclass(frozen=True)
class JetSymbol:
    """A dependent symbol together with a derivative multi-index.

    Parameters
    ----------
    name : str
        Symbol name; family members carry their index, e.g. ``"Phi[1]"``.
    index : MultiIndex
        Derivative counts.
    cls : ExprClass
        Scalar or matrix.
    invertible : bool
        Declared invertible (matrices only).
    symmetric : bool
        Declared equal to its own transpose.
    constant_in : frozenset of str
        Variables the symbol does not depend on; a nonempty set also makes
        the symbol a constant for Lie derivatives.
    """

    name: str
    index: MultiIndex
    cls: ExprClass = ExprClass.SCALAR
    invertible: bool = False
    symmetric: bool = False
    constant_in: frozenset[str] = field(default_factory=frozenset)

    def sort_key(self) -> tuple:
        return (self.name, self.index.counts, 2, ())

    def with_index(self, index: MultiIndex) -> "JetSymbol":
        """Return the same symbol carrying ``index``."""
        return replace(self, index=index)

    def base(self) -> "JetSymbol":
        """Return the underived symbol."""
        return self.with_index(MultiIndex.zero(self.index.variables))

    @property
    def is_constant(self) -> bool:
        """True for declared functions of a subset of the variables."""
        return bool(self.constant_in)

    def text(self) -> str:
        """Return the source spelling, e.g. ``u_xt``."""
        suffix = self.index.suffix()
        return f"{self.name}_{suffix}" if suffix else self.name


@dataclass(frozen=True)
class FunctionApp:
    """An elementary function applied to a scalar expression."""

    func: str
    arg: "Expr"

    def __post_init__(self) -> None:
        if self.func not in FUNCTION_NAMES:
            raise ValueError(f"Unknown function '{self.func}'.")
        if self.arg.cls is ExprClass.MATRIX and not self.arg.is_zero:
            raise ClassMismatch(f"{self.func} needs a scalar argument.")

    def sort_key(self) -> tuple:
        return (self.func, (), 3, self.arg.sort_key)


@dataclass(frozen=True)
class MatrixFactor:
    """One factor of a noncommutative word: a matrix symbol, maybe inverted or transposed."""

    symbol: JetSymbol
    inverted: bool = False
    transposed: bool = False

    def __post_init__(self) -> None:
        if self.symbol.cls is not ExprClass.MATRIX:
            raise ClassMismatch(f"'{self.symbol.text()}' is not a matrix symbol.")
        if self.transposed and self.symbol.symmetric:
            object.__setattr__(self, "transposed", False)

    def sort_key(self) -> tuple:
        s = self.symbol
        return (s.name, s.index.counts, int(self.inverted), int(self.transposed))

    def inverse(self) -> "MatrixFactor":
        """Return the inverse factor."""
        return MatrixFactor(self.symbol, not self.inverted, self.transposed)

    def transpose(self) -> "MatrixFactor":
        """Return the transposed factor."""
        return MatrixFactor(self.symbol, self.inverted, not self.transposed)

    def cancels(self, other: "MatrixFactor") -> bool:
        """True when ``self * other`` is the identity."""
        return (
            self.symbol == other.symbol
            and self.transposed == other.transposed
            and self.inverted != other.inverted
        )


@dataclass(frozen=True)
class TraceAtom:
    """The trace of a matrix word, stored as its least cyclic rotation."""

    word: tuple[MatrixFactor, ...]

    def __post_init__(self) -> None:
        if self.word:
            rotations = [self.word[i:] + self.word[:i] for i in range(len(self.word))]
            best = min(rotations, key=lambda w: tuple(f.sort_key() for f in w))
            object.__setattr__(self, "word", best)

    def sort_key(self) -> tuple:
        return ("tr", (), 4, tuple(f.sort_key() for f in self.word))


ScalarAtom = Union[Parameter, IndependentVar, JetSymbol, FunctionApp, TraceAtom]
Monomial = tuple[tuple[ScalarAtom, int], ...]
Word = tuple[MatrixFactor, ...]


@dataclass(frozen=True)
class Term:
    """A rational coefficient times a scalar monomial times a matrix word."""

    coeff: Fraction
    monomial: Monomial = ()
    word: Word = ()

    @cached_property
    def shape(self) -> tuple[Monomial, Word]:
        return (self.monomial, self.word)

    @cached_property
    def shape_key(self) -> tuple:
        return (
            tuple((atom.sort_key(), exp) for atom, exp in self.monomial),
            tuple(f.sort_key() for f in self.word),
        )

    @cached_property
    def sort_key(self) -> tuple:
        return (0 if self.coeff > 0 else 1, self.shape_key, self.coeff)

    def exponent(self, atom: ScalarAtom) -> int:
        """Return the exponent of ``atom`` in the monomial (0 if absent)."""
        for a, k in self.monomial:
            if a == atom:
                return k
        return 0


def _sqrt_power(radicand: int, exponent: int) -> tuple[Fraction, int]:
    """Split ``sqrt(radicand)^exponent`` into a rational factor and a leftover power."""
    q, r = divmod(exponent, 2)
    return Fraction(radicand) ** q, r


def _normal_monomial(pairs: Iterable[tuple[ScalarAtom, int]]) -> tuple[Fraction, Monomial]:
    """Merge atoms, combine exponentials and absorb square roots of constants."""
    merged: dict[ScalarAtom, int] = {}
    for atom, exp in pairs:
        merged[atom] = merged.get(atom, 0) + exp
    factor = Fraction(1)
    exp_arg: Expr | None = None
    result: list[tuple[ScalarAtom, int]] = []
    for atom, exp in merged.items():
        if exp == 0:
            continue
        if isinstance(atom, FunctionApp) and atom.func == "exp":
            scaled = atom.arg.scale(exp)
            exp_arg = scaled if exp_arg is None else exp_arg + scaled
            continue
        if isinstance(atom, FunctionApp) and atom.func == "sqrt" and atom.arg.is_constant():
            outside, leftover = _sqrt_power(int(atom.arg.constant_value()), exp)
            factor *= outside
            if leftover:
                result.append((atom, leftover))
            continue
        result.append((atom, exp))
    if exp_arg is not None and not exp_arg.is_zero:
        result.append((FunctionApp("exp", exp_arg), 1))
    result.sort(key=lambda pair: (pair[0].sort_key(), pair[1]))
    return factor, tuple(result)


def _normal_word(factors: Iterable[MatrixFactor]) -> Word:
    """Cancel adjacent inverse pairs."""
    stack: list[MatrixFactor] = []
    for f in factors:
        if stack and stack[-1].cancels(f):
            stack.pop()
        else:
            stack.append(f)
    return tuple(stack)


def make_term(
    coeff: Number, pairs: Iterable[tuple[ScalarAtom, int]] = (), word: Iterable[MatrixFactor] = ()
) -> Term | None:
    """Build a normalized term, or None when it vanishes."""
    c = Fraction(coeff)
    if c == 0:
        return None
    factor, monomial = _normal_monomial(pairs)
    c *= factor
    if c == 0:
        return None
    return Term(c, monomial, _normal_word(word))


def _coerce(value: "Expr | Number") -> "Expr":
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, Fraction)):
        return Expr.constant(value)
    raise TypeError(f"Cannot use {type(value).__name__} in an expression.")


@dataclass(frozen=True, eq=False)
class Expr:
    """An immutable expression in normal form: a sorted sum of merged terms.

    Parameters
    ----------
    cls : ExprClass
        Scalar or matrix.
    terms : tuple of Term
        Normalized, merged, nonzero terms in canonical order.
    """

    cls: ExprClass
    terms: tuple[Term, ...] = ()

    # construction

    @classmethod
    def collect(cls, expr_class: ExprClass, terms: Iterable[Term | None]) -> "Expr":
        """Merge like terms, drop zeros and sort."""
        merged: dict[tuple[Monomial, Word], Fraction] = {}
        for term in terms:
            if term is None:
                continue
            if expr_class is ExprClass.SCALAR and term.word:
                raise ClassMismatch("A scalar expression cannot contain matrix factors.")
            merged[term.shape] = merged.get(term.shape, Fraction(0)) + term.coeff
        result = [Term(c, m, w) for (m, w), c in merged.items() if c != 0]
        result.sort(key=lambda t: t.sort_key)
        return cls(expr_class, tuple(result))

    @classmethod
    def zero(cls, expr_class: ExprClass = ExprClass.SCALAR) -> "Expr":
        """Return zero of the given class."""
        return cls(expr_class, ())

    @classmethod
    def constant(cls, value: Number, expr_class: ExprClass = ExprClass.SCALAR) -> "Expr":
        """Return a rational constant (a multiple of the identity for matrices)."""
        return cls.collect(expr_class, [make_term(value)])

    @classmethod
    def identity(cls) -> "Expr":
        """Return the identity matrix."""
        return cls.constant(1, ExprClass.MATRIX)

    @classmethod
    def atom(cls, atom: ScalarAtom, exponent: int = 1) -> "Expr":
        """Return a scalar atom raised to ``exponent``."""
        return cls.collect(ExprClass.SCALAR, [make_term(1, [(atom, exponent)])])

    @classmethod
    def factor(cls, factor: MatrixFactor) -> "Expr":
        """Return a single matrix factor."""
        return cls.collect(ExprClass.MATRIX, [make_term(1, (), [factor])])

    @classmethod
    def symbol(cls, symbol: JetSymbol) -> "Expr":
        """Return a jet symbol as an expression of its own class."""
        if symbol.cls is ExprClass.MATRIX:
            return cls.factor(MatrixFactor(symbol))
        return cls.atom(symbol)

    @classmethod
    def from_term(cls, term: Term, expr_class: ExprClass) -> "Expr":
        """Return a one-term expression."""
        return cls.collect(expr_class, [term])

    # inspection

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_single_term(self) -> bool:
        return len(self.terms) == 1

    def is_constant(self) -> bool:
        """True for a rational constant (times the identity for matrices)."""
        return self.is_zero or (
            self.is_single_term and not self.terms[0].monomial and not self.terms[0].word
        )

    def constant_value(self) -> Fraction:
        """Return the value of a constant expression."""
        if self.is_zero:
            return Fraction(0)
        if not self.is_constant():
            raise ValueError("Expression is not a rational constant.")
        return self.terms[0].coeff

    @cached_property
    def sort_key(self) -> tuple:
        return tuple(t.sort_key for t in self.terms)

    @cached_property
    def _hash(self) -> int:
        return hash(self.terms)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Expr):
            return NotImplemented
        if self.is_zero and other.is_zero:
            return True
        return self.cls is other.cls and self.terms == other.terms

    def iter_atoms(self) -> Iterator[ScalarAtom | MatrixFactor]:
        """Yield every atom and factor, descending into function arguments."""
        for term in self.terms:
            for atom, _ in term.monomial:
                yield atom
                if isinstance(atom, FunctionApp):
                    yield from atom.arg.iter_atoms()
                elif isinstance(atom, TraceAtom):
                    yield from atom.word
            yield from term.word

    def symbols(self) -> set[JetSymbol]:
        """Return every jet symbol occurring anywhere in the expression."""
        found: set[JetSymbol] = set()
        for item in self.iter_atoms():
            if isinstance(item, JetSymbol):
                found.add(item)
            elif isinstance(item, MatrixFactor):
                found.add(item.symbol)
        return found

    def parameters(self) -> set[str]:
        """Return the names of parameters occurring anywhere."""
        return {a.name for a in self.iter_atoms() if isinstance(a, Parameter)}

    # arithmetic

    def _check_sum(self, other: "Expr") -> ExprClass:
        if self.cls is other.cls:
            return self.cls
        if other.is_zero:
            return self.cls
        if self.is_zero:
            return other.cls
        raise ClassMismatch("Cannot add scalar-class and matrix-class expressions.")

    def __add__(self, other: "Expr | Number") -> "Expr":
        rhs = _coerce(other)
        target = self._check_sum(rhs)
        if rhs.is_zero:
            return self if self.cls is target else Expr(target, self.terms)
        if self.is_zero:
            return rhs if rhs.cls is target else Expr(target, rhs.terms)
        return Expr.collect(target, self.terms + rhs.terms)

    def __radd__(self, other: Number) -> "Expr":
        return _coerce(other) + self

    def __neg__(self) -> "Expr":
        terms = tuple(Term(-t.coeff, t.monomial, t.word) for t in self.terms)
        return Expr(self.cls, terms).resorted()

    def __sub__(self, other: "Expr | Number") -> "Expr":
        return self + (-_coerce(other))

    def __rsub__(self, other: Number) -> "Expr":
        return _coerce(other) - self

    def __mul__(self, other: "Expr | Number") -> "Expr":
        rhs = _coerce(other)
        if self.cls is ExprClass.MATRIX or rhs.cls is ExprClass.MATRIX:
            target = ExprClass.MATRIX
        else:
            target = ExprClass.SCALAR
        if self.is_zero or rhs.is_zero:
            return Expr.zero(target)
        return Expr.collect(
            target,
            (
                make_term(
                    a.coeff * b.coeff,
                    a.monomial + b.monomial,
                    a.word + b.word,
                )
                for a in self.terms
                for b in rhs.terms
            ),
        )

    def __rmul__(self, other: Number) -> "Expr":
        return _coerce(other) * self

    def scale(self, factor: Number) -> "Expr":
        """Multiply every coefficient by a rational number."""
        f = Fraction(factor)
        if f == 0:
            return Expr.zero(self.cls)
        terms = tuple(Term(t.coeff * f, t.monomial, t.word) for t in self.terms)
        return Expr(self.cls, terms).resorted()

    def resorted(self) -> "Expr":
        """Return the same terms in canonical order."""
        return Expr(self.cls, tuple(sorted(self.terms, key=lambda t: t.sort_key)))

    def as_class(self, expr_class: ExprClass) -> "Expr":
        """Reinterpret a scalar expression as a multiple of the identity when needed."""
        if expr_class is self.cls or self.is_zero:
            return Expr(expr_class, self.terms)
        if expr_class is ExprClass.MATRIX:
            return Expr(ExprClass.MATRIX, self.terms)
        raise ClassMismatch("A matrix expression cannot be used as a scalar.")

    def __repr__(self) -> str:
        from src.jetcheck.parser.render import render

        return f"Expr({render(self)!r})"
