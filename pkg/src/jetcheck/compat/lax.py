"""Compatibility of Lax pairs.

Each relation is read as ``c_i * aux_{l_i} + P_i = 0`` with ``c_i`` built from
parameters only. The mismatch ``c_1 D_{l-l_2} P_2 - c_2 D_{l-l_1} P_1`` at
``l = lcm(l_1, l_2)`` is pseudo-reduced: each rewrite of an auxiliary
derivative multiplies the other terms by the rule's ``c_i``. The product of
the multipliers is divided back out when the division in the parameter is
exact, the lowest power of the parameter is stripped and recorded as the
result's ``shift``, and every remaining degree is reduced modulo the system.
Pairs read as series are compared member by member with the PDE each member
should satisfy.
"""

from collections.abc import Callable
from dataclasses import dataclass, field
from fractions import Fraction

from my_logger import check_logger
from src.func_libs.clock import RunClock
from src.jetcheck.compat.backlund import bt_check, eliminate
from src.jetcheck.compat.series import series_extract
from src.jetcheck.compat.symmetry import combine_reports
from src.jetcheck.enums import CheckStatus, ExprClass
from src.jetcheck.exceptions import (
    EliminationFailure,
    JetcheckError,
    NotPolynomialInParameter,
)
from src.jetcheck.expr.models import (
    Expr,
    FunctionApp,
    JetSymbol,
    MultiIndex,
    Parameter,
    Term,
    make_term,
)
from src.jetcheck.expr.normalize import coefficients_in, word_expr
from src.jetcheck.jet.derivations import apply_index
from src.jetcheck.reduction.reduce import reduce_mod
from src.jetcheck.reduction.rules import RuleSet, orient
from src.jetcheck.system.models import CheckReport, EquationSystem, LaxPair

DEFAULT_WINDOW = range(-1, 2)


@dataclass(frozen=True)
class AuxRule:
    """``c * aux_lead = -rest``, with ``c`` a nonzero parameter expression."""

    lead: JetSymbol
    multiplier: Expr
    rest: Expr


@dataclass
class LaxResult:
    """Outcome of a Lax compatibility check.

    Parameters
    ----------
    pair : str
        Pair name.
    degrees : dict of int to Expr
        Compatibility residual per parameter degree, before reduction.
    report : CheckReport
        Combined verdict.
    reports : list of CheckReport
        One report per degree (or per series index).
    divided : bool
        Whether the multipliers were divided back out.
    induced : dict of int to Expr
        For pairs read as series, the PDE induced on each member.
    shift : int
        Power of the parameter stripped from every degree; ``degrees`` keys
        plus ``shift`` are the powers actually present.
    """

    pair: str
    degrees: dict[int, Expr]
    report: CheckReport
    reports: list[CheckReport] = field(default_factory=list)
    divided: bool = True
    induced: dict[int, Expr] = field(default_factory=dict)
    shift: int = 0


def _aux_atoms(term: Term, aux: str) -> list[tuple[JetSymbol, int]]:
    found = [(a, k) for a, k in term.monomial if isinstance(a, JetSymbol) and a.name == aux]
    found += [(f.symbol, 1) for f in term.word if f.symbol.name == aux]
    for a, _ in term.monomial:
        if isinstance(a, FunctionApp) and any(s.name == aux for s in a.arg.symbols()):
            raise EliminationFailure(f"'{aux}' occurs inside {a.func}().")
    return found


def split_relation(relation: Expr, aux: str, lead: JetSymbol) -> AuxRule:
    """Split a relation into ``c * aux_lead`` and the rest.

    Parameters
    ----------
    relation : Expr
        Relation equal to zero.
    aux : str
        Auxiliary symbol.
    lead : JetSymbol
        Highest auxiliary derivative of the relation.

    Returns
    -------
    AuxRule
        The multiplier and the remaining terms.
    """
    multiplier_terms = []
    rest = []
    for term in relation.terms:
        atoms = _aux_atoms(term, aux)
        if not any(a == lead for a, _ in atoms):
            rest.append(term)
            continue
        bare = term.word == () or (
            len(term.word) == 1 and not term.word[0].inverted and not term.word[0].transposed
        )
        others = [(a, k) for a, k in term.monomial if a != lead]
        if len(atoms) != 1 or atoms[0][1] != 1 or not bare or not all(
            isinstance(a, Parameter) for a, _ in others
        ):
            raise EliminationFailure(
                f"'{lead.text()}' must appear as (parameters) * {lead.text()} alone."
            )
        multiplier_terms.append(make_term(term.coeff, others))
    multiplier = Expr.collect(ExprClass.SCALAR, multiplier_terms)
    if multiplier.is_zero:
        raise EliminationFailure(f"'{lead.text()}' does not occur in the relation.")
    return AuxRule(lead, multiplier, Expr.collect(relation.cls, rest))


def _default_lead(relation: Expr, aux: str) -> JetSymbol:
    atoms = [a for term in relation.terms for a, _ in _aux_atoms(term, aux)]
    if not atoms:
        raise EliminationFailure(f"A relation does not contain '{aux}'.")
    return max(atoms, key=lambda a: a.index.rank_key())


def _replace_in_term(term: Term, atom: JetSymbol, value: Expr, cls: ExprClass) -> Expr:
    if term.word and any(f.symbol == atom for f in term.word):
        pos = next(i for i, f in enumerate(term.word) if f.symbol == atom)
        left = Expr.collect(
            ExprClass.MATRIX, [make_term(term.coeff, term.monomial, term.word[:pos])]
        )
        return left * value * word_expr(term.word[pos + 1 :])
    others = [(a, k) for a, k in term.monomial if a != atom]
    return Expr.collect(cls, [make_term(term.coeff, others, term.word)]) * value


class PseudoReducer:
    """Eliminates auxiliary derivatives one rule application at a time."""

    def __init__(
        self, aux: str, rules: list[AuxRule], variables: tuple[str, ...], pass_limit: int
    ) -> None:
        self.aux = aux
        self.rules = rules
        self.variables = variables
        self.pass_limit = pass_limit
        self._prolonged: dict[tuple[int, MultiIndex], Expr] = {}

    def _replacement(self, pos: int, index: MultiIndex) -> Expr:
        key = (pos, index)
        if key not in self._prolonged:
            self._prolonged[key] = -apply_index(self.rules[pos].rest, index, self.variables)
        return self._prolonged[key]

    def _pick(self, e: Expr) -> tuple[JetSymbol, int] | None:
        best: tuple[JetSymbol, int] | None = None
        for term in e.terms:
            for atom, _ in _aux_atoms(term, self.aux):
                for pos, rule in enumerate(self.rules):
                    if not atom.index.dominates(rule.lead.index):
                        continue
                    if best is None or (atom.index.rank_key(), -pos) > (
                        best[0].index.rank_key(),
                        -best[1],
                    ):
                        best = (atom, pos)
        return best

    def run(self, e: Expr) -> tuple[Expr, Expr]:
        """Return the reduced expression and the product of the multipliers used."""
        multiplier = Expr.constant(1)
        for _ in range(self.pass_limit):
            picked = self._pick(e)
            if picked is None:
                return e, multiplier
            atom, pos = picked
            rule = self.rules[pos]
            value = self._replacement(pos, atom.index.minus(rule.lead.index))
            hit = []
            rest = []
            for term in e.terms:
                atoms = _aux_atoms(term, self.aux)
                if any(a == atom for a, _ in atoms):
                    if len(atoms) != 1 or atoms[0][1] != 1:
                        raise EliminationFailure(
                            "The residual is not linear in the auxiliary symbol."
                        )
                    hit.append(term)
                else:
                    rest.append(term)
            reduced = rule.multiplier * Expr.collect(e.cls, rest)
            for term in hit:
                reduced = reduced + _replace_in_term(term, atom, value, e.cls)
            e = reduced
            multiplier = multiplier * rule.multiplier
        raise EliminationFailure(
            f"Auxiliary elimination did not settle in {self.pass_limit} passes."
        )


def _divide(
    numerator: dict[int, Expr], divisor: dict[int, Fraction]
) -> dict[int, Expr] | None:
    """Exact division of a Laurent polynomial by a rational one, or None."""
    if not numerator:
        return {}
    top = max(divisor)
    floor = min(numerator) - min(divisor)
    remaining = dict(numerator)
    quotient: dict[int, Expr] = {}
    while remaining:
        degree = max(remaining)
        shift = degree - top
        if shift < floor:
            return None
        q = remaining[degree].scale(1 / divisor[top])
        quotient[shift] = q
        for k, m in divisor.items():
            value = remaining.get(shift + k, Expr.zero(q.cls)) - q.scale(m)
            if value.is_zero:
                remaining.pop(shift + k, None)
            else:
                remaining[shift + k] = value
    return quotient


def compatibility_residual(
    pair: LaxPair, system: EquationSystem, pass_limit: int = 64
) -> tuple[dict[int, Expr], bool, int]:
    """Return the per-degree compatibility residual, whether it was divided, and the stripped power.

    Parameters
    ----------
    pair : LaxPair
        Pair without a parameter-derivative symbol.
    system : EquationSystem
        Ambient system.
    pass_limit : int, optional
        Pass limit of the auxiliary elimination.

    Returns
    -------
    tuple of (dict of int to Expr, bool, int)
        Degree to residual with the lowest power ``p^shift`` stripped (so the
        lowest key is 0), the division flag and ``shift``.
    """
    leads = pair.leads or tuple(_default_lead(r, pair.aux) for r in pair.relations)
    rules = [split_relation(r, pair.aux, lead) for r, lead in zip(pair.relations, leads)]
    first, second = rules
    target = first.lead.index.lcm(second.lead.index)
    variables = system.variables
    mismatch = first.multiplier * apply_index(
        second.rest, target.minus(second.lead.index), variables
    ) - second.multiplier * apply_index(first.rest, target.minus(first.lead.index), variables)
    reducer = PseudoReducer(pair.aux, rules, variables, pass_limit)
    residual, multiplier = reducer.run(mismatch)
    for term in residual.terms:
        if len(_aux_atoms(term, pair.aux)) != 1:
            raise EliminationFailure(
                f"{pair.name}: a residual term is not linear and homogeneous in '{pair.aux}'."
            )
    try:
        degrees = coefficients_in(residual, pair.param)
        divisor = coefficients_in(multiplier, pair.param)
    except NotPolynomialInParameter as err:
        raise EliminationFailure(f"{pair.name}: {err}") from err
    divided = False
    if all(c.is_constant() for c in divisor.values()):
        quotient = _divide(degrees, {k: c.constant_value() for k, c in divisor.items()})
        if quotient is not None:
            degrees, divided = quotient, True
    if not divided:
        check_logger.warning(f"{pair.name}: multipliers {multiplier!r} could not be divided out")
    shift = min(degrees, default=0)
    if shift:
        check_logger.debug(f"{pair.name}: stripped the common factor {pair.param}^{shift}")
    return {d - shift: c for d, c in sorted(degrees.items())}, divided, shift


def lax_compatibility(
    pair: LaxPair,
    system: EquationSystem,
    rules: RuleSet | None = None,
    family: str | None = None,
    window: range = DEFAULT_WINDOW,
    check_id: str | None = None,
    expected: Callable[[int], Expr] | None = None,
    seed: int = 1729,
    tolerance: float = 1e-9,
) -> LaxResult:
    """Check that a Lax pair is compatible exactly on solutions of the system.

    Parameters
    ----------
    pair : LaxPair
        The pair.
    system : EquationSystem
        Ambient system.
    rules : RuleSet or None, optional
        Oriented rules; built from ``system`` when omitted.
    family : str or None, optional
        Symbol family for pairs that carry a parameter-derivative symbol.
    window : range, optional
        Series indices examined for such pairs.
    check_id : str or None, optional
        Report id.
    expected : callable or None, optional
        For pairs read as series, the PDE the member at index ``n`` must
        satisfy once the next member is eliminated.
    seed : int, optional
        Seed of the random-jet comparison of series members.
    tolerance : float, optional
        Tolerance of that comparison.

    Returns
    -------
    LaxResult
        Per-degree residuals and reports.
    """
    check_id = check_id or f"lax/{pair.name}"
    rules = rules if rules is not None else orient(system)
    if pair.dparam is not None:
        return _series_compatibility(
            pair, system, rules, family, window, check_id, expected, seed, tolerance
        )
    clock = RunClock()
    degrees, divided, shift = compatibility_residual(pair, system, rules.pass_limit)
    reports = [
        reduce_mod(value, rules, f"{check_id}:{pair.param}^{degree + shift}")
        for degree, value in degrees.items()
    ]
    report = combine_reports(check_id, reports)
    notes = [] if divided else ["multipliers kept"]
    if shift:
        notes.append(f"common factor {pair.param}^{shift} stripped")
    if notes:
        report = CheckReport(
            check_id,
            report.status,
            residual=report.residual,
            passes=report.passes,
            millis=clock.elapsed_millis(),
            message="; ".join(notes),
        )
    return LaxResult(pair.name, degrees, report, reports, divided, shift=shift)


def _series_compatibility(
    pair: LaxPair,
    system: EquationSystem,
    rules: RuleSet,
    family: str | None,
    window: range,
    check_id: str,
    expected: Callable[[int], Expr] | None,
    seed: int,
    tolerance: float,
) -> LaxResult:
    if family is None or expected is None:
        raise EliminationFailure(
            f"{pair.name} involves '{pair.dparam}'; name the series family and the PDE "
            f"each member satisfies to check it."
        )
    reports = []
    induced: dict[int, Expr] = {}
    for n, bt in zip(window, series_extract(pair, system, window, family)):
        report_id = f"{check_id}:n={n}"
        try:
            induced[n] = eliminate(bt, system, bt.symbols[1], rules.pass_limit)
            report = bt_check(
                bt,
                system,
                bt.symbols[1],
                expected(n),
                seed=seed,
                tolerance=tolerance,
                check_id=report_id,
                induced=induced[n],
            )
        except JetcheckError as err:
            report = CheckReport(report_id, CheckStatus.ERROR, message=str(err))
        reports.append(report)
    report = combine_reports(check_id, reports)
    return LaxResult(pair.name, dict(induced), report, reports, True, induced)
