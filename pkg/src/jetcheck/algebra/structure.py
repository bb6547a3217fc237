"""Structure constants of finite symmetry algebras."""

from collections.abc import Sequence
from fractions import Fraction
from itertools import combinations

from my_logger import check_logger
from src.jetcheck.algebra.linear import span_solve
from src.jetcheck.exceptions import NotClosed, NotInSpan, TargetMismatch
from src.jetcheck.expr.models import Expr
from src.jetcheck.jet.derivations import lie_bracket
from src.jetcheck.parser.render import render
from src.jetcheck.reduction.reduce import reduce_expression
from src.jetcheck.reduction.rules import RuleSet, orient
from src.jetcheck.system.models import Characteristic, EquationSystem

Constants = dict[tuple[int, int], tuple[Fraction, ...]]


def _reduced(q: Characteristic, rules: RuleSet) -> Expr:
    return reduce_expression(q.expr, rules)[0]


def bracket_coefficients(
    q1: Characteristic,
    q2: Characteristic,
    basis: Sequence[Characteristic],
    system: EquationSystem,
    rules: RuleSet | None = None,
) -> tuple[Fraction, ...]:
    """Expand ``[q1, q2]``, reduced modulo the system, in a basis.

    Raises
    ------
    NotInSpan
        When the reduced bracket is not a rational combination of the basis.
    """
    rules = rules if rules is not None else orient(system)
    bracket = _reduced(lie_bracket(q1, q2, system), rules)
    return span_solve(bracket, [_reduced(q, rules) for q in basis])


def structure_constants(
    basis: Sequence[Characteristic],
    system: EquationSystem,
    rules: RuleSet | None = None,
) -> Constants:
    """Return ``c_ij`` with ``[Q_i, Q_j] = sum_k c_ij^k Q_k`` for every ordered pair.

    Parameters
    ----------
    basis : sequence of Characteristic
        Linearly independent characteristics of one target.
    system : EquationSystem
        Ambient system.
    rules : RuleSet or None, optional
        Oriented rules; built from ``system`` when omitted.

    Returns
    -------
    dict of (int, int) to tuple of Fraction
        1-based index pairs to coefficient tuples; ``c_ji = -c_ij``.

    Raises
    ------
    NotClosed
        When a bracket leaves the span.
    """
    if len({q.target for q in basis}) > 1:
        raise TargetMismatch("Structure constants need characteristics of a single target.")
    rules = rules if rules is not None else orient(system)
    reduced = [_reduced(q, rules) for q in basis]
    zero = tuple(Fraction(0) for _ in basis)
    constants: Constants = {(i, i): zero for i in range(1, len(basis) + 1)}
    for (i, qi), (j, qj) in combinations(enumerate(basis, start=1), 2):
        bracket = _reduced(lie_bracket(qi, qj, system), rules)
        try:
            c = span_solve(bracket, reduced)
        except NotInSpan as err:
            raise NotClosed(i, j, render(bracket)) from err
        constants[(i, j)] = c
        constants[(j, i)] = tuple(-x for x in c)
        check_logger.debug(f"[Q{i}, Q{j}] = {c}")
    return dict(sorted(constants.items()))


def jacobi_violations(constants: Constants, size: int) -> list[tuple[int, int, int]]:
    """Return the index triples at which the constants break the Jacobi identity."""
    bad = []
    for i, j, k in combinations(range(1, size + 1), 3):
        for m in range(size):
            total = sum(
                constants[(a, b)][l - 1] * constants[(l, c)][m]
                for a, b, c in ((i, j, k), (j, k, i), (k, i, j))
                for l in range(1, size + 1)
            )
            if total != 0:
                bad.append((i, j, k))
                break
    return bad
