"""Compatibility of Bäcklund transformations by cross-differentiation.

Each relation is solved for one first derivative of the symbol being
eliminated (``w_a = A``, ``w_b = B``); the induced PDE on the remaining
symbols is ``D_b A - D_a B`` with the derivatives of ``w`` rewritten.
"""

from fractions import Fraction

from my_logger import check_logger
from src.func_libs.clock import RunClock
from src.jetcheck.enums import CheckStatus, ExprClass
from src.jetcheck.exceptions import (
    LeadingAbsent,
    MixedDerivativeMismatch,
    NonlinearInLeading,
    NotSolvable,
)
from src.jetcheck.expr.models import Expr, JetSymbol, MatrixFactor
from src.jetcheck.expr.normalize import inverse
from src.jetcheck.jet.derivations import total_derivative
from src.jetcheck.numeric.evaluate import RandomJetValuation, max_abs
from src.jetcheck.reduction.reduce import reduce_expression
from src.jetcheck.reduction.rules import DEFAULT_PASS_LIMIT, RuleSet, orient_expression
from src.jetcheck.system.models import BTSystem, CheckReport, EquationSystem

NUMERIC_SAMPLES = 5


def _first_derivative(relation: Expr, name: str, position: int) -> JetSymbol:
    found = {s for s in relation.symbols() if s.name == name and s.index.order >= 1}
    if any(s.index.order > 1 for s in found):
        raise MixedDerivativeMismatch(
            f"Relation {position} contains a derivative of '{name}' above first order."
        )
    if len(found) != 1:
        raise MixedDerivativeMismatch(
            f"Relation {position} must contain exactly one first derivative of '{name}', "
            f"found {len(found)}."
        )
    return found.pop()


def _shared(factor: MatrixFactor | None, terms: tuple, pick: int) -> MatrixFactor | None:
    if factor is None or not (factor.inverted or factor.symbol.invertible):
        return None
    return factor if all(t.word and t.word[pick] == factor for t in terms) else None


def strip_invertible(e: Expr) -> Expr:
    """Remove invertible matrix factors shared by every term on the left or right."""
    while e.cls is ExprClass.MATRIX and not e.is_zero:
        first = e.terms[0].word[0] if e.terms[0].word else None
        left = _shared(first, e.terms, 0)
        if left is not None:
            e = inverse(Expr.factor(left)) * e
            continue
        last = e.terms[0].word[-1] if e.terms[0].word else None
        right = _shared(last, e.terms, -1)
        if right is not None:
            e = e * inverse(Expr.factor(right))
            continue
        break
    return e


def eliminate(
    bt: BTSystem, system: EquationSystem, symbol: str, pass_limit: int = DEFAULT_PASS_LIMIT
) -> Expr:
    """Return the PDE the remaining symbols satisfy once ``symbol`` is eliminated.

    Parameters
    ----------
    bt : BTSystem
        Two relations.
    system : EquationSystem
        Ambient system (variables and declarations).
    symbol : str
        One of the two related symbols.
    pass_limit : int, optional
        Pass limit of the two-rule reduction.

    Returns
    -------
    Expr
        The induced PDE, normalized, with shared invertible factors stripped.
    """
    if symbol not in bt.symbols:
        raise ValueError(f"'{symbol}' is not related by {bt.name}.")
    if len(bt.relations) != 2:
        raise MixedDerivativeMismatch(f"{bt.name} must consist of exactly two relations.")
    leads = [_first_derivative(rel, symbol, pos + 1) for pos, rel in enumerate(bt.relations)]
    steps = [lead.index.steps()[0] for lead in leads]
    if steps[0] == steps[1]:
        raise MixedDerivativeMismatch(
            f"Both relations of {bt.name} involve '{symbol}_{steps[0]}'; nothing to cross."
        )
    try:
        solved = [
            orient_expression(f"{bt.name}[{pos + 1}]", rel, lead)
            for pos, (rel, lead) in enumerate(zip(bt.relations, leads))
        ]
    except (NonlinearInLeading, LeadingAbsent) as err:
        raise NotSolvable(f"{bt.name}: {err}") from err
    first, second = solved
    rules = RuleSet(solved, system.variables, pass_limit)
    cross = total_derivative(first.remainder, steps[1], system) - total_derivative(
        second.remainder, steps[0], system
    )
    residual, passes = reduce_expression(cross, rules)
    check_logger.debug(f"{bt.name}: eliminated '{symbol}' in {passes} passes")
    return strip_invertible(residual)


def bt_compatibility(
    bt: BTSystem,
    system: EquationSystem,
    eliminate_symbol: str | None = None,
    pass_limit: int = DEFAULT_PASS_LIMIT,
) -> dict[str, Expr]:
    """Return the induced PDE per eliminated symbol.

    Parameters
    ----------
    bt : BTSystem
        The transformation.
    system : EquationSystem
        Ambient system.
    eliminate_symbol : str or None, optional
        Symbol to eliminate; both symbols in turn when omitted.
    pass_limit : int, optional
        Pass limit of the elimination.

    Returns
    -------
    dict of str to Expr
        Eliminated symbol to the residual PDE on the other.
    """
    names = [eliminate_symbol] if eliminate_symbol else list(bt.symbols)
    return {name: eliminate(bt, system, name, pass_limit) for name in names}


def proportional(residual: Expr, expected: Expr) -> Fraction | None:
    """Return ``r`` with ``residual = r * expected``, or None."""
    if residual.is_zero or expected.is_zero:
        return Fraction(1) if residual.is_zero and expected.is_zero else None
    ratio = guess_ratio(residual, expected)
    if ratio is not None and (residual - expected.scale(ratio)).is_zero:
        return ratio
    return None


def guess_ratio(residual: Expr, expected: Expr) -> Fraction | None:
    """Ratio of the coefficients of the first expected term's shape, if it occurs."""
    if expected.is_zero:
        return None
    anchor = expected.terms[0]
    for term in residual.terms:
        if term.shape == anchor.shape:
            return term.coeff / anchor.coeff
    return None


def bt_check(
    bt: BTSystem,
    system: EquationSystem,
    eliminate_symbol: str,
    expected: Expr,
    seed: int = 1729,
    tolerance: float = 1e-9,
    pass_limit: int = DEFAULT_PASS_LIMIT,
    check_id: str | None = None,
    induced: Expr | None = None,
) -> CheckReport:
    """Check that eliminating a symbol yields a rational multiple of ``expected``.

    When the normal forms differ only by identities the normal form does not
    apply (angle addition), the comparison falls back to seeded random jets.

    Parameters
    ----------
    bt : BTSystem
        The transformation.
    system : EquationSystem
        Ambient system.
    eliminate_symbol : str
        Symbol to eliminate.
    expected : Expr
        The PDE the other symbol should satisfy.
    seed : int, optional
        Seed of the numeric fallback.
    tolerance : float, optional
        Numeric tolerance of the fallback.
    pass_limit : int, optional
        Pass limit of the elimination.
    check_id : str or None, optional
        Report id.
    induced : Expr or None, optional
        Result of `eliminate` when the caller already has it.

    Returns
    -------
    CheckReport
        Zero when proportional, else the difference from the best multiple.
    """
    clock = RunClock()
    check_id = check_id or f"bt/{bt.name}:{eliminate_symbol}"
    residual = induced
    if residual is None:
        residual = eliminate(bt, system, eliminate_symbol, pass_limit)
    target = strip_invertible(expected)
    ratio = proportional(residual, target)
    if ratio is not None:
        return CheckReport(
            check_id, CheckStatus.ZERO, millis=clock.elapsed_millis(), message=f"ratio {ratio}"
        )
    guess = guess_ratio(residual, target)
    difference = residual - target.scale(guess) if guess is not None else residual
    if guess is not None:
        valuation = RandomJetValuation(system, seed=seed)
        deviation = max(max_abs(difference, valuation.resample()) for _ in range(NUMERIC_SAMPLES))
        if deviation <= tolerance:
            check_logger.warning(
                f"{check_id}: symbolic forms differ; random jets agree (ratio {guess}, "
                f"deviation {deviation:.2e})"
            )
            return CheckReport(
                check_id,
                CheckStatus.ZERO,
                millis=clock.elapsed_millis(),
                message=f"ratio {guess}, numeric",
            )
    return CheckReport(
        check_id, CheckStatus.RESIDUAL, residual=difference, millis=clock.elapsed_millis()
    )
