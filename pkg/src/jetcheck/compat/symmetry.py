"""Symmetry conditions ``S(Q; u) = L_Q F[u]`` and their checks modulo ``F``.

The condition of every equation is generated once from a formal
characteristic symbol and cached; a concrete characteristic is then
substituted for the formal one.
"""

import threading
from collections import OrderedDict

from my_logger import check_logger
from src.func_libs.clock import RunClock
from src.jetcheck.enums import CheckStatus
from src.jetcheck.expr.models import Expr
from src.jetcheck.expr.substitute import substitute
from src.jetcheck.jet.derivations import lie_apply
from src.jetcheck.parser.expressions import parse_expression
from src.jetcheck.reduction.reduce import reduce_mod
from src.jetcheck.reduction.rules import RuleSet, orient
from src.jetcheck.system.models import (
    Characteristic,
    CheckReport,
    DependentSymbol,
    Equation,
    EquationSystem,
)

FORMAL_NAME = "Q"


def formal_symbol(system: EquationSystem, target: str, name: str = FORMAL_NAME) -> DependentSymbol:
    """Return a fresh symbol of the target's class, renamed until it clashes with nothing."""
    symbol = system.symbol(target)
    while system.has_symbol(name) or name in system.parameters or name in system.variables:
        name = f"{name}0"
    return DependentSymbol(name, symbol.cls, system.variables)


class TemplateCache:
    """Thread-safe, size-bounded store of generated symmetry-condition templates.

    Entries are keyed on the variables, the equation expression, the target and the
    formal symbol. The least recently used entry is evicted beyond ``maxsize``.

    Parameters
    ----------
    maxsize : int, optional
        Maximum number of stored templates.
    """

    def __init__(self, maxsize: int = 512) -> None:
        self.maxsize = maxsize
        self._entries: OrderedDict[tuple, Expr] = OrderedDict()
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._entries)

    def clear(self) -> None:
        with self._lock:
            self._entries.clear()

    def get(
        self, system: EquationSystem, equation: Equation, target: str, name: str = FORMAL_NAME
    ) -> tuple[DependentSymbol, Expr]:
        """Return the formal symbol and ``L_Q`` of ``equation`` for a formal ``Q``."""
        formal = formal_symbol(system, target, name)
        key = (system.variables, equation.expr, target, formal)
        with self._lock:
            found = self._entries.get(key)
            if found is not None:
                self._entries.move_to_end(key)
                return formal, found
        template = lie_apply(Characteristic(target, formal.expr()), equation.expr, system)
        check_logger.debug(f"Generated the symmetry condition of {equation.name} for '{target}'")
        with self._lock:
            self._entries[key] = template
            self._entries.move_to_end(key)
            while len(self._entries) > self.maxsize:
                self._entries.popitem(last=False)
        return formal, template


templates = TemplateCache()


def _involved(system: EquationSystem, q: Characteristic) -> list[Equation]:
    names = set(q.components())
    return [
        eq for eq in system.equations.values() if any(s.name in names for s in eq.expr.symbols())
    ]


def symmetry_condition(q: Characteristic, system: EquationSystem) -> dict[str, Expr]:
    """Return ``S(Q; u)`` per equation that mentions a symbol ``Q`` acts on.

    Parameters
    ----------
    q : Characteristic
        The characteristic.
    system : EquationSystem
        Ambient system.

    Returns
    -------
    dict of str to Expr
        Equation name to the unreduced condition.
    """
    conditions: dict[str, Expr] = {}
    for eq in _involved(system, q):
        if q.extra:
            conditions[eq.name] = lie_apply(q, eq.expr, system)
            continue
        formal, template = templates.get(system, eq, q.target)
        if template.is_zero:
            conditions[eq.name] = template
            continue
        conditions[eq.name] = substitute(template, {formal.name: q.expr})
    return conditions


def symmetry_check(
    q: Characteristic,
    system: EquationSystem,
    rules: RuleSet | None = None,
    check_id: str | None = None,
) -> CheckReport:
    """Reduce the symmetry condition of ``q`` modulo the system.

    Parameters
    ----------
    q : Characteristic
        The characteristic to verify.
    system : EquationSystem
        Ambient system.
    rules : RuleSet or None, optional
        Oriented rules; built from ``system`` when omitted.
    check_id : str or None, optional
        Report id, ``symmetry/<name>`` by default.

    Returns
    -------
    CheckReport
        Zero when every involved equation's condition reduces to zero.
    """
    check_id = check_id or f"symmetry/{q.name or q.target}"
    rules = rules if rules is not None else orient(system)
    conditions = symmetry_condition(q, system)
    if not conditions:
        raise ValueError(f"No equation of {system.name} involves '{q.target}'.")
    reports = [reduce_mod(expr, rules, f"{check_id}:{name}") for name, expr in conditions.items()]
    return combine_reports(check_id, reports)


def combine_reports(check_id: str, reports: list[CheckReport]) -> CheckReport:
    """Fold several reports into one: the first error, else the first residual, else zero."""
    passes = max((r.passes for r in reports), default=0)
    millis = sum(r.millis for r in reports)
    for status in (CheckStatus.ERROR, CheckStatus.RESIDUAL):
        for report in reports:
            if report.status is status:
                return CheckReport(
                    check_id,
                    status,
                    residual=report.residual,
                    passes=passes,
                    millis=millis,
                    message=report.message,
                )
    return CheckReport(check_id, CheckStatus.ZERO, passes=passes, millis=millis)


def template_check(
    system: EquationSystem,
    target: str,
    expected: str,
    formal: str = FORMAL_NAME,
    via: tuple[str, str] | None = None,
    equation: str | None = None,
    check_id: str = "symmetry_template",
) -> CheckReport:
    """Compare a generated symmetry condition with a displayed form.

    Parameters
    ----------
    system : EquationSystem
        Ambient system.
    target : str
        Symbol the formal characteristic acts on.
    expected : str
        Displayed condition, written with the formal symbol (or the ``via`` symbol).
    formal : str, optional
        Name of the formal characteristic.
    via : tuple of (str, str) or None, optional
        ``(name, expression)`` rewriting the characteristic through a new symbol,
        e.g. ``("Phi", "g*Phi")`` for ``Q = g*Phi``.
    equation : str or None, optional
        Equation to use; the primary equation by default.
    check_id : str, optional
        Report id.

    Returns
    -------
    CheckReport
        Zero when the normal forms coincide, else the difference.
    """
    clock = RunClock()
    eq = system.equations[equation] if equation else system.primary_equation()
    symbol, template = templates.get(system, eq, target, formal)
    local = {symbol.name: symbol}
    if via is not None:
        name, text = via
        helper = DependentSymbol(name, symbol.cls, system.variables)
        local = {name: helper}
        template = substitute(
            template, {symbol.name: parse_expression(text, system, local)}, known={symbol.name}
        )
    difference = template - parse_expression(expected, system, local)
    status = CheckStatus.ZERO if difference.is_zero else CheckStatus.RESIDUAL
    check_logger.debug(f"{check_id}: template comparison {status.value}")
    return CheckReport(
        check_id,
        status,
        residual=None if difference.is_zero else difference,
        millis=clock.elapsed_millis(),
    )


def condition_identity(
    q: Characteristic, system: EquationSystem, expected: str, check_id: str = "identity"
) -> CheckReport:
    """Check ``S(Q; u) = expected`` as an identity of expressions, without reduction.

    ``expected`` may use equation names, e.g. ``"t*D[F; x]"``.
    """
    clock = RunClock()
    conditions = symmetry_condition(q, system)
    total = Expr.zero(conditions[next(iter(conditions))].cls) if conditions else Expr.zero()
    for value in conditions.values():
        total = total + value
    difference = total - parse_expression(expected, system)
    status = CheckStatus.ZERO if difference.is_zero else CheckStatus.RESIDUAL
    return CheckReport(
        check_id,
        status,
        residual=None if difference.is_zero else difference,
        millis=clock.elapsed_millis(),
    )
