"""Exact rational span membership of expressions."""

from collections.abc import Sequence
from fractions import Fraction

import sympy as sp

from my_logger import check_logger
from src.jetcheck.exceptions import ClassMismatch, NotInSpan, RankDeficientBasis
from src.jetcheck.expr.models import Expr

Vector = Expr | Sequence[Expr]


def _components(v: Vector) -> tuple[Expr, ...]:
    return (v,) if isinstance(v, Expr) else tuple(v)


def _rational(value: Fraction) -> sp.Rational:
    return sp.Rational(value.numerator, value.denominator)


def coefficient_rows(vectors: Sequence[tuple[Expr, ...]]) -> dict[tuple, list[Fraction]]:
    """Return, per (component, term shape), the coefficient of every vector."""
    rows: dict[tuple, list[Fraction]] = {}
    for col, components in enumerate(vectors):
        for pos, e in enumerate(components):
            for term in e.terms:
                row = rows.setdefault((pos, term.shape_key), [Fraction(0)] * len(vectors))
                row[col] += term.coeff
    return rows


def span_solve(
    target: Vector, basis: Sequence[Vector], allow_dependent: bool = False
) -> tuple[Fraction, ...]:
    """Write ``target`` as a rational combination of ``basis``.

    Expressions are compared term shape by term shape, so the coefficients are
    rational numbers and never depend on jet coordinates.

    Parameters
    ----------
    target : Expr or sequence of Expr
        Expression, or vector of expressions (e.g. conservation law components).
    basis : sequence
        Elements of the same shape as ``target``.
    allow_dependent : bool, optional
        Accept a dependent basis and set the free coefficients to zero.

    Returns
    -------
    tuple of Fraction
        One coefficient per basis element.

    Raises
    ------
    RankDeficientBasis
        When the basis is dependent and ``allow_dependent`` is false.
    NotInSpan
        When no combination equals the target.
    """
    goal = _components(target)
    vectors = [_components(b) for b in basis]
    if any(len(v) != len(goal) for v in vectors):
        raise ValueError("Every basis element needs as many components as the target.")
    for v in vectors:
        for a, b in zip(v, goal):
            if not a.is_zero and not b.is_zero and a.cls is not b.cls:
                raise ClassMismatch("Basis and target components differ in class.")
    if not vectors:
        if all(e.is_zero for e in goal):
            return ()
        raise NotInSpan("The empty basis spans only zero.")
    rows = coefficient_rows(vectors + [goal])
    if not rows:
        return tuple(Fraction(0) for _ in vectors)
    keys = sorted(rows, key=repr)
    matrix = sp.Matrix([[_rational(rows[k][c]) for c in range(len(vectors))] for k in keys])
    rhs = sp.Matrix([_rational(rows[k][-1]) for k in keys])
    if matrix.rank() < len(vectors) and not allow_dependent:
        raise RankDeficientBasis(
            f"The {len(vectors)} basis elements span only rank {matrix.rank()}."
        )
    try:
        solution, free = matrix.gauss_jordan_solve(rhs)
    except ValueError as err:
        raise NotInSpan("The target is not a rational combination of the basis.") from err
    if free.shape[0]:
        check_logger.debug(f"span_solve: {free.shape[0]} free coefficients set to zero")
        solution = solution.subs({p: 0 for p in free})
    return tuple(Fraction(int(c.p), int(c.q)) for c in solution)
