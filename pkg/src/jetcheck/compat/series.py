"""Laurent series reading of Lax pairs.

With ``aux = sum_m param^m Phi[m]`` the coefficient of one power of the
parameter in each relation relates consecutive family members; the two
coefficients at index ``n`` form a Bäcklund pair between ``Phi[n]`` and the
next member.
"""

from collections.abc import Iterable, Mapping

from src.jetcheck.compat.symmetry import combine_reports
from src.jetcheck.exceptions import NotLaurent, NotPolynomialInParameter
from src.jetcheck.expr.models import Expr
from src.jetcheck.expr.normalize import coefficients_in
from src.jetcheck.expr.substitute import substitute
from src.jetcheck.reduction.reduce import reduce_mod
from src.jetcheck.reduction.rules import RuleSet, orient
from src.jetcheck.system.models import BTSystem, CheckReport, EquationSystem, LaxPair

Piece = tuple[int, bool, Expr]


def _pieces(relation: Expr, pair: LaxPair) -> list[Piece]:
    """Split a relation into (effective degree, is parameter derivative, part)."""
    try:
        by_degree = coefficients_in(relation, pair.param)
    except NotPolynomialInParameter as err:
        raise NotLaurent(f"{pair.name}: {err}") from err
    pieces: list[Piece] = []
    for degree, coefficient in by_degree.items():
        plain = []
        derived = []
        for term in coefficient.terms:
            names = {s.name for s in Expr.from_term(term, coefficient.cls).symbols()}
            has_aux = pair.aux in names
            has_derived = pair.dparam is not None and pair.dparam in names
            if has_aux == has_derived:
                raise NotLaurent(
                    f"{pair.name}: every term must hold exactly one of '{pair.aux}' "
                    f"and its parameter derivative."
                )
            (derived if has_derived else plain).append(term)
        if plain:
            pieces.append((degree, False, Expr.collect(coefficient.cls, plain)))
        if derived:
            pieces.append((degree - 1, True, Expr.collect(coefficient.cls, derived)))
    return pieces


def series_extract(
    pair: LaxPair,
    system: EquationSystem,
    n_range: Iterable[int],
    family: str,
    support: set[int] | None = None,
) -> list[BTSystem]:
    """Return the relations between consecutive series members for each ``n``.

    Parameters
    ----------
    pair : LaxPair
        Pair, Laurent in its parameter.
    system : EquationSystem
        Ambient system; declares the family.
    n_range : iterable of int
        Series indices.
    family : str
        Family whose members replace the auxiliary symbol.
    support : set of int or None, optional
        Members allowed to be nonzero; all when omitted.

    Returns
    -------
    list of BTSystem
        One pair of relations per index, named ``<pair>[n]``.
    """
    if family not in system.families:
        raise KeyError(f"'{family}' is not a symbol family of {system.name}.")
    split = [_pieces(relation, pair) for relation in pair.relations]
    systems = []
    for n in n_range:
        relations = []
        members: set[int] = set()
        for pieces in split:
            top = max(degree for degree, _, _ in pieces)
            total = Expr.zero(pieces[0][2].cls)
            for degree, derived, part in pieces:
                m = n + top - degree
                members.add(m)
                if support is not None and m not in support:
                    continue
                member = system.family_member(family, m).expr()
                if derived:
                    total = total + substitute(part, {pair.dparam: member}).scale(m)
                else:
                    total = total + substitute(part, {pair.aux: member})
            relations.append(total)
        low, high = min(members), max(members)
        if low == high:
            high = low + 1
        symbols = (f"{family}[{low}]", f"{family}[{high}]")
        systems.append(BTSystem(f"{pair.name}[{n}]", symbols, tuple(relations)))
    return systems


def chain_check(
    pair: LaxPair,
    system: EquationSystem,
    family: str,
    members: Mapping[int, Expr],
    n: int,
    rules: RuleSet | None = None,
    check_id: str | None = None,
) -> CheckReport:
    """Check that explicit series members satisfy the relations at index ``n``.

    Parameters
    ----------
    pair : LaxPair
        Pair read as a series.
    system : EquationSystem
        Ambient system.
    family : str
        Series family.
    members : mapping of int to Expr
        Known members by index; every member the relations at ``n`` use.
    n : int
        Series index.
    rules : RuleSet or None, optional
        Oriented rules; built from ``system`` when omitted.
    check_id : str or None, optional
        Report id.

    Returns
    -------
    CheckReport
        Zero when both relations reduce to zero.
    """
    check_id = check_id or f"chain/{pair.name}:n={n}"
    rules = rules if rules is not None else orient(system)
    (bt,) = series_extract(pair, system, [n], family)
    reports = []
    for pos, relation in enumerate(bt.relations, start=1):
        present = {s.name for s in relation.symbols()}
        bindings = {f"{family}[{m}]": e for m, e in members.items() if f"{family}[{m}]" in present}
        missing = {s for s in present if s.startswith(f"{family}[")} - set(bindings)
        if missing:
            raise KeyError(f"No explicit value for {sorted(missing)}.")
        reports.append(reduce_mod(substitute(relation, bindings), rules, f"{check_id}:{pos}"))
    return combine_reports(check_id, reports)
