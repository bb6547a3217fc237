"""Reduction of expressions modulo an equation system."""

from my_logger import check_logger
from src.func_libs.clock import RunClock
from src.jetcheck.enums import CheckStatus
from src.jetcheck.exceptions import PassLimitExceeded
from src.jetcheck.expr.models import Expr
from src.jetcheck.reduction.rules import RuleSet
from src.jetcheck.system.models import CheckReport


def reduce_expression(e: Expr, rules: RuleSet) -> tuple[Expr, int]:
    """Rewrite until no rule applies.

    Parameters
    ----------
    e : Expr
        Expression to reduce.
    rules : RuleSet
        Oriented rules.

    Returns
    -------
    tuple of (Expr, int)
        The irreducible result and the number of passes that changed something.
    """
    current = e
    for passes in range(rules.pass_limit + 1):
        if current.is_zero:
            return current, passes
        rewritten, changed = rules.rewrite_pass(current)
        if not changed:
            return current, passes
        if passes == rules.pass_limit:
            break
        current = rewritten
    raise PassLimitExceeded(f"Reduction did not settle within {rules.pass_limit} passes.")


def reduce_mod(e: Expr, rules: RuleSet, check_id: str = "reduce") -> CheckReport:
    """Reduce ``e`` modulo the rules and report the outcome.

    Parameters
    ----------
    e : Expr
        Expression to reduce.
    rules : RuleSet
        Oriented rules.
    check_id : str, optional
        Identifier carried by the report.

    Returns
    -------
    CheckReport
        Zero status, the irreducible residual, or an error status when the pass
        limit is exceeded.
    """
    clock = RunClock()
    try:
        result, passes = reduce_expression(e, rules)
    except PassLimitExceeded as err:
        check_logger.warning(f"{check_id}: {err}")
        return CheckReport(
            check_id,
            CheckStatus.ERROR,
            passes=rules.pass_limit,
            millis=clock.elapsed_millis(),
            message=str(err),
        )
    status = CheckStatus.ZERO if result.is_zero else CheckStatus.RESIDUAL
    check_logger.debug(f"{check_id}: {status.value} after {passes} passes")
    return CheckReport(
        check_id,
        status,
        residual=None if result.is_zero else result,
        passes=passes,
        millis=clock.elapsed_millis(),
    )
