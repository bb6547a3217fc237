"""Oriented rewrite rules and their prolongations.

`orient` solves each equation of a system for its declared leading
derivative. A `RuleSet` rewrites any jet symbol whose multi-index
dominates a rule's lead, using ``D_{I - lead}`` of the rule's remainder.
"""

import threading
from dataclasses import dataclass

from my_logger import check_logger
from src.jetcheck.enums import ExprClass
from src.jetcheck.exceptions import LeadingAbsent, NonlinearInLeading
from src.jetcheck.expr.models import (
    Expr,
    FunctionApp,
    JetSymbol,
    MatrixFactor,
    MultiIndex,
    TraceAtom,
    make_term,
)
from src.jetcheck.expr.normalize import inverse, power, replace_symbols, word_expr
from src.jetcheck.jet.derivations import TotalDerivative
from src.jetcheck.system.models import EquationSystem

DEFAULT_PASS_LIMIT = 64


@dataclass(frozen=True)
class Rule:
    """Rewrite ``lead -> remainder``."""

    name: str
    lead: JetSymbol
    remainder: Expr
    potential: bool = False

    def __repr__(self) -> str:
        from src.jetcheck.parser.render import render

        return f"Rule({self.lead.text()} -> {render(self.remainder)})"


def _dominated(e: Expr, lead: JetSymbol) -> bool:
    return any(s.name == lead.name and s.index.dominates(lead.index) for s in e.symbols())


def _invertible(factor: MatrixFactor) -> bool:
    return factor.inverted or factor.symbol.invertible


def orient_expression(name: str, expr: Expr, lead: JetSymbol) -> Rule:
    """Solve ``expr = 0`` for ``lead``.

    All terms containing the lead must have the form ``c * L * lead * R`` with
    the same invertible words ``L`` and ``R``; their scalar coefficients must
    add up to a single term.

    Parameters
    ----------
    name : str
        Rule name.
    expr : Expr
        Left side of the equation.
    lead : JetSymbol
        Leading derivative.

    Returns
    -------
    Rule
        The oriented rule.
    """
    lead_terms = []
    rest = []
    arrangement: tuple | None = None
    coefficient = Expr.zero()
    for term in expr.terms:
        scalar_hits = [k for a, k in term.monomial if a == lead]
        word_hits = [i for i, f in enumerate(term.word) if f.symbol == lead]
        hidden = any(
            isinstance(a, (FunctionApp, TraceAtom)) and _dominated(Expr.atom(a), lead)
            for a, _ in term.monomial
        )
        if hidden:
            raise NonlinearInLeading(f"'{lead.text()}' occurs inside a function in {name}.")
        if not scalar_hits and not word_hits:
            rest.append(term)
            continue
        if len(scalar_hits) + len(word_hits) != 1 or (scalar_hits and scalar_hits[0] != 1):
            raise NonlinearInLeading(f"'{lead.text()}' occurs nonlinearly in {name}.")
        if word_hits:
            pos = word_hits[0]
            factor = term.word[pos]
            if factor.inverted or factor.transposed:
                raise NonlinearInLeading(
                    f"'{lead.text()}' occurs inverted or transposed in {name}."
                )
            shape = (term.word[:pos], term.word[pos + 1 :])
            monomial = term.monomial
        else:
            shape = (term.word, ())
            monomial = tuple((a, k) for a, k in term.monomial if a != lead)
        if arrangement is None:
            arrangement = shape
        elif arrangement != shape:
            raise NonlinearInLeading(
                f"'{lead.text()}' appears with different matrix neighbours in {name}."
            )
        scalar = Expr.collect(ExprClass.SCALAR, [make_term(term.coeff, monomial)])
        coefficient = coefficient + scalar
        lead_terms.append(term)
    if not lead_terms or arrangement is None:
        raise LeadingAbsent(f"'{lead.text()}' does not occur in {name}.")
    if not coefficient.is_single_term:
        raise NonlinearInLeading(
            f"The coefficient of '{lead.text()}' in {name} is not a single invertible term."
        )
    left, right = arrangement
    if not all(_invertible(f) for f in left + right):
        raise NonlinearInLeading(
            f"'{lead.text()}' is multiplied by a matrix not declared invertible in {name}."
        )
    remainder = Expr.collect(expr.cls, rest)
    solved = power(coefficient, -1) * remainder
    if left:
        solved = inverse(word_expr(left)) * solved
    if right:
        solved = solved * inverse(word_expr(right))
    solved = -solved
    if _dominated(solved, lead):
        raise NonlinearInLeading(f"Solving {name} for '{lead.text()}' leaves a derivative of it.")
    return Rule(name, lead, solved)


class RuleSet:
    """Rewrite rules with a cache of prolonged right-hand sides.

    Parameters
    ----------
    rules : list of Rule
        Rules in declaration order.
    variables : tuple of str
        Independent variables of the system.
    pass_limit : int, optional
        Maximum rewriting passes per reduction.
    """

    def __init__(
        self, rules: list[Rule], variables: tuple[str, ...], pass_limit: int = DEFAULT_PASS_LIMIT
    ) -> None:
        self.rules = list(rules)
        self.variables = variables
        self.pass_limit = pass_limit
        self._cache: dict[tuple[int, MultiIndex], Expr] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self.rules)

    def extended(self, extra: list[Rule]) -> "RuleSet":
        """Return a new rule set with ``extra`` appended."""
        return RuleSet(self.rules + list(extra), self.variables, self.pass_limit)

    def rule_for(self, symbol: JetSymbol) -> tuple[int, Rule] | None:
        """Return the highest-ranked rule whose lead ``symbol`` dominates."""
        best: tuple[int, Rule] | None = None
        for pos, rule in enumerate(self.rules):
            lead = rule.lead
            if lead.name != symbol.name or not symbol.index.dominates(lead.index):
                continue
            if best is None or lead.index.rank_key() > best[1].lead.index.rank_key():
                best = (pos, rule)
        return best

    def prolonged(self, pos: int, index: MultiIndex) -> Expr:
        """Return ``D_index`` of rule ``pos``'s remainder, cached."""
        key = (pos, index)
        with self._lock:
            cached = self._cache.get(key)
        if cached is not None:
            return cached
        rule = self.rules[pos]
        if index.order == 0:
            value = rule.remainder
        else:
            var = index.steps()[-1]
            value = TotalDerivative(var, self.variables).apply(
                self.prolonged(pos, index.bump(var, -1))
            )
        with self._lock:
            self._cache.setdefault(key, value)
        return value

    def rewrite_symbol(self, symbol: JetSymbol) -> Expr | None:
        """Return the replacement of one jet symbol, or None when irreducible."""
        found = self.rule_for(symbol)
        if found is None:
            return None
        pos, rule = found
        return self.prolonged(pos, symbol.index.minus(rule.lead.index)).as_class(symbol.cls)

    def potential_rewrite(self, symbol: JetSymbol) -> Expr | None:
        """Like `rewrite_symbol` but only with potential rules; a `total_derivative` hook."""
        for pos, rule in enumerate(self.rules):
            if (
                rule.potential
                and rule.lead.name == symbol.name
                and symbol.index.dominates(rule.lead.index)
            ):
                return self.prolonged(pos, symbol.index.minus(rule.lead.index))
        return None

    def rewrite_pass(self, e: Expr) -> tuple[Expr, bool]:
        """Rewrite every reducible occurrence once, simultaneously."""
        changed = False

        def replace(atom: object) -> Expr | None:
            nonlocal changed
            if not isinstance(atom, JetSymbol):
                return None
            replacement = self.rewrite_symbol(atom)
            if replacement is not None:
                changed = True
            return replacement

        if not any(self.rule_for(s) for s in e.symbols()):
            return e, False
        result = replace_symbols(e, replace)
        return result, changed


def orient(system: EquationSystem, pass_limit: int = DEFAULT_PASS_LIMIT) -> RuleSet:
    """Build the rule set of a system: oriented equations, then potential rules.

    Parameters
    ----------
    system : EquationSystem
        System with oriented equations.
    pass_limit : int, optional
        Pass limit of the resulting rule set.

    Returns
    -------
    RuleSet
        Rules in declaration order.
    """
    rules = [orient_expression(eq.name, eq.expr, eq.lead) for eq in system.equations.values()]
    rules += [Rule(r.name, r.lhs, r.rhs, potential=True) for r in system.rules]
    check_logger.debug(f"Oriented {len(rules)} rules for {system.name}: {rules}")
    return RuleSet(rules, system.variables, pass_limit)
