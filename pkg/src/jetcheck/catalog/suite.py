"""Catalog suites.

Every check kind of ``index.yaml`` has a runner that turns one declared check
into tasks, one task per report. A task that raises a domain error becomes an
error report, so a suite always finishes. Reports come back sorted by check
id, which is ``entry/kind/name``.
"""

from collections.abc import Callable, Iterator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from my_logger import check_logger, suite_logger
from src.func_libs.clock import RunClock
from src.jetcheck.algebra.linear import span_solve
from src.jetcheck.algebra.structure import (
    bracket_coefficients,
    jacobi_violations,
    structure_constants,
)
from src.jetcheck.catalog.index import Catalog, EntryContext
from src.jetcheck.compat.backlund import bt_check
from src.jetcheck.compat.conservation import conservation_check, divergence, triviality_classify
from src.jetcheck.compat.lax import LaxResult, lax_compatibility
from src.jetcheck.compat.series import chain_check, series_extract
from src.jetcheck.compat.symmetry import (
    combine_reports,
    condition_identity,
    symmetry_check,
    symmetry_condition,
    template_check,
)
from src.jetcheck.config import Settings
from src.jetcheck.enums import CheckStatus, NumericMode
from src.jetcheck.exceptions import JetcheckError, NoConvergence, UnboundSymbol
from src.jetcheck.expr.models import Expr
from src.jetcheck.numeric.evaluate import ClosedFormBinding, sample_points, sample_residual
from src.jetcheck.numeric.matrix_identities import random_matrix_check
from src.jetcheck.numeric.oracle import ernst_bridge, finite_difference_cross_check
from src.jetcheck.parser.expressions import parse_expression
from src.jetcheck.parser.render import render
from src.jetcheck.reduction.reduce import reduce_expression, reduce_mod
from src.jetcheck.system.models import CheckReport, EquationSystem


@dataclass(frozen=True)
class ClosedForm:
    """A closed-form solution declared by a numeric check of the entry."""

    name: str
    binding: ClosedFormBinding
    points: list[dict[str, Fraction | float]]
    mode: NumericMode
    tolerance: float


@dataclass(frozen=True)
class CheckTask:
    """One report to produce: its id and the call producing it.

    ``vanishing`` returns the expressions a zero report claims vanish on every
    solution; they are sampled on the closed forms ``solutions`` returns
    before the report is kept.
    """

    check_id: str
    run: Callable[[], CheckReport]
    vanishing: Callable[[], list[Expr]] | None = None
    solutions: Callable[[], list[ClosedForm]] = list


Runner = Callable[[EntryContext, dict], Iterator[CheckTask]]


def format_coefficients(values: tuple[Fraction, ...]) -> str:
    """Render coefficients as ``(-1, 0, 1/2)``."""
    return f"({', '.join(str(v) for v in values)})"


def _verdict(
    check_id: str, ok: bool, text: str, clock: RunClock, message: str = ""
) -> CheckReport:
    status = CheckStatus.ZERO if ok else CheckStatus.RESIDUAL
    return CheckReport(check_id, status, millis=clock.elapsed_millis(), message=message, text=text)


def _numeric_ok(value: float, mode: NumericMode, tolerance: float) -> bool:
    return value == 0 if mode is NumericMode.EXACT else value <= tolerance


def expand_template(template: str, n: int) -> str:
    """Fill ``{n}`` and ``{n1}`` (the next index) in a per-index expression."""
    return template.format(n=n, n1=n + 1)


def _id(ctx: EntryContext, kind: str, name: str) -> str:
    return f"{ctx.entry.name}/{kind}/{name}"


def expect_lowest_degree(result: LaxResult, expected: Expr) -> CheckReport:
    """Return the Lax verdict, turned residual unless the lowest degree equals ``expected``."""
    report = result.report
    if not report.is_zero or not result.degrees:
        return report
    lowest = result.degrees[min(result.degrees)]
    if lowest == expected:
        return report
    return CheckReport(
        report.check_id,
        CheckStatus.RESIDUAL,
        residual=lowest - expected,
        passes=report.passes,
        millis=report.millis,
        message="lowest parameter degree differs from the expected residual",
    )


# -- closed-form solutions -------------------------------------------------


def closed_form(ctx: EntryContext, check: dict) -> ClosedForm:
    """Build the closed form, sample points and tolerance of a numeric check."""
    system = ctx.system(check)
    settings = ctx.settings
    mode = NumericMode(check.get("mode", NumericMode.FLOAT.value))
    number = Fraction if mode is NumericMode.EXACT else float
    parameters = {k: number(str(v)) for k, v in (check.get("parameters") or {}).items()}
    solution = {k: str(v) for k, v in check["solution"].items()}
    binding = ClosedFormBinding.from_texts(system.variables, solution, parameters, mode)
    domain = {var: (float(lo), float(hi)) for var, (lo, hi) in check["domain"].items()}
    points = sample_points(domain, settings.points, settings.seed, mode)
    tolerance = float(check.get("tolerance", settings.tolerance))
    return ClosedForm(_id(ctx, "numeric", check["name"]), binding, points, mode, tolerance)


def _solves_system(system: EquationSystem, check: dict) -> bool:
    bound = set(check["solution"])
    solved = set(check.get("equations", ()))
    return bool(solved) and all(
        name in solved for name, eq in system.equations.items() if eq.lead.name in bound
    )


def solutions_of(ctx: EntryContext, check: dict) -> list[ClosedForm]:
    """Closed forms of the entry that solve every equation of the check's system they touch."""
    key = check.get("system") or ctx.entry.default_system
    if key not in ctx.memo:
        system = ctx.system(check)
        ctx.memo[key] = [
            closed_form(ctx, other)
            for other in ctx.entry.checks
            if other["kind"] == "numeric"
            and (other.get("system") or ctx.entry.default_system) == key
            and _solves_system(system, other)
        ]
    return ctx.memo[key]


def revalidate(
    report: CheckReport, vanishing: list[Expr], solutions: list[ClosedForm]
) -> CheckReport:
    """Sample expressions a zero report claims vanish on solutions.

    Closed forms that leave a symbol or parameter unbound are skipped. A zero
    report contradicted by a sample becomes an error.
    """
    confirmed = []
    for form in solutions:
        try:
            worst = max(
                (sample_residual(e, form.binding, form.points) for e in vanishing), default=0.0
            )
        except UnboundSymbol:
            continue
        if not _numeric_ok(worst, form.mode, form.tolerance):
            message = f"normal form is zero but max |r| = {worst:.3e} on {form.name}"
            check_logger.error(f"{report.check_id}: {message}")
            return CheckReport(
                report.check_id,
                CheckStatus.ERROR,
                passes=report.passes,
                millis=report.millis,
                message=message,
            )
        confirmed.append(form.name)
    if confirmed:
        check_logger.debug(f"{report.check_id}: confirmed on {', '.join(confirmed)}")
    return report


# -- symbolic checks -------------------------------------------------------


def run_symmetry(ctx: EntryContext, check: dict) -> Iterator[CheckTask]:
    for name in check["characteristics"]:
        cid = _id(ctx, "symmetry", name)

        def run(name: str = name, cid: str = cid) -> CheckReport:
            system = ctx.system(check)
            return symmetry_check(system.characteristic(name), system, ctx.rules(check), cid)

        def vanishing(name: str = name) -> list[Expr]:
            system = ctx.system(check)
            return list(symmetry_condition(system.characteristic(name), system).values())

        yield CheckTask(cid, run, vanishing, lambda: solutions_of(ctx, check))


def run_symmetry_template(ctx: EntryContext, check: dict) -> Iterator[CheckTask]:
    cid = _id(ctx, "symmetry_template", check.get("name", check["target"]))
    via = check.get("via")
    yield CheckTask(
        cid,
        lambda: template_check(
            ctx.system(check),
            check["target"],
            check["expect"],
            formal=check.get("formal", "Q"),
            via=tuple(via) if via else None,
            equation=check.get("equation"),
            check_id=cid,
        ),
    )


def run_identity(ctx: EntryContext, check: dict) -> Iterator[CheckTask]:
    name = check["characteristic"]
    cid = _id(ctx, "identity", name)

    def run() -> CheckReport:
        system = ctx.system(check)
        return condition_identity(system.characteristic(name), system, check["expect"], cid)

    yield CheckTask(cid, run)


def run_reduce(ctx: EntryContext, check: dict) -> Iterator[CheckTask]:
    cid = _id(ctx, "reduce", check["name"])

    def vanishing() -> list[Expr]:
        return [parse_expression(check["expr"], ctx.system(check))]

    def run() -> CheckReport:
        return reduce_mod(vanishing()[0], ctx.rules(check), cid)

    yield CheckTask(cid, run, vanishing, lambda: solutions_of(ctx, check))


def run_conservation(ctx: EntryContext, check: dict) -> Iterator[CheckTask]:
    for name in check["laws"]:
        cid = _id(ctx, "conservation", name)

        def run(name: str = name, cid: str = cid) -> CheckReport:
            system = ctx.system(check)
            return conservation_check(system.conservation_laws[name], system, ctx.rules(check), cid)

        def vanishing(name: str = name) -> list[Expr]:
            system = ctx.system(check)
            return [divergence(system.conservation_laws[name], system)]

        yield CheckTask(cid, run, vanishing, lambda: solutions_of(ctx, check))


def run_triviality(ctx: EntryContext, check: dict) -> Iterator[CheckTask]:
    cid = _id(ctx, "triviality", check["law"])

    def run() -> CheckReport:
        clock = RunClock()
        system = ctx.system(check)
        laws = system.conservation_laws
        known = [laws[name] for name in check.get("known", ())]
        result = triviality_classify(laws[check["law"]], system, known, ctx.rules(check))
        expected = str(check["expect"])
        message = "" if str(result) == expected else f"expected {expected}"
        return _verdict(cid, str(result) == expected, str(result), clock, message)

    yield CheckTask(cid, run)


def run_bt(ctx: EntryContext, check: dict) -> Iterator[CheckTask]:
    cid = _id(ctx, "bt", f"{check['bt']}:{check['eliminate']}")
    settings = ctx.settings

    def run() -> CheckReport:
        system = ctx.system(check)
        return bt_check(
            system.bts[check["bt"]],
            system,
            check["eliminate"],
            parse_expression(check["expect"], system),
            seed=settings.seed,
            tolerance=settings.tolerance,
            pass_limit=settings.pass_limit,
            check_id=cid,
        )

    yield CheckTask(cid, run)


def run_lax(ctx: EntryContext, check: dict) -> Iterator[CheckTask]:
    cid = _id(ctx, "lax", check.get("name", check["pair"]))

    def member_pde(n: int) -> Expr:
        return parse_expression(expand_template(check["expect"], n), ctx.system(check))

    def run() -> CheckReport:
        system = ctx.system(check)
        low, high = check.get("window", (-1, 1))
        pair = system.lax_pairs[check["pair"]]
        series = pair.dparam is not None and "expect" in check
        result = lax_compatibility(
            pair,
            system,
            ctx.rules(check),
            family=check.get("family"),
            window=range(low, high + 1),
            check_id=cid,
            expected=member_pde if series else None,
            seed=ctx.settings.seed,
            tolerance=ctx.settings.tolerance,
        )
        if "expect" not in check or series:
            return result.report
        return expect_lowest_degree(result, parse_expression(check["expect"], system))

    yield CheckTask(cid, run)


def run_series(ctx: EntryContext, check: dict) -> Iterator[CheckTask]:
    for n in check["n"]:
        cid = _id(ctx, "series", f"{check['pair']}:n={n}")

        def run(n: int = n, cid: str = cid) -> CheckReport:
            clock = RunClock()
            system = ctx.system(check)
            (bt,) = series_extract(system.lax_pairs[check["pair"]], system, [n], check["family"])
            for relation, template in zip(bt.relations, check["expect"]):
                expected = parse_expression(expand_template(template, n), system)
                if relation != expected:
                    return CheckReport(
                        cid,
                        CheckStatus.RESIDUAL,
                        residual=relation - expected,
                        millis=clock.elapsed_millis(),
                        message=f"relation differs from {render(expected)}",
                    )
            return CheckReport(cid, CheckStatus.ZERO, millis=clock.elapsed_millis())

        yield CheckTask(cid, run)


def run_series_bt(ctx: EntryContext, check: dict) -> Iterator[CheckTask]:
    settings = ctx.settings
    for n in check["n"]:
        cid = _id(ctx, "series_bt", f"{check['pair']}:n={n}")

        def run(n: int = n, cid: str = cid) -> CheckReport:
            system = ctx.system(check)
            (bt,) = series_extract(system.lax_pairs[check["pair"]], system, [n], check["family"])
            return bt_check(
                bt,
                system,
                bt.symbols[1],
                parse_expression(expand_template(check["expect"], n), system),
                seed=settings.seed,
                tolerance=settings.tolerance,
                pass_limit=settings.pass_limit,
                check_id=cid,
            )

        yield CheckTask(cid, run)


def run_chain(ctx: EntryContext, check: dict) -> Iterator[CheckTask]:
    for n in check["n"]:
        cid = _id(ctx, "chain", f"{check['pair']}:n={n}")

        def run(n: int = n, cid: str = cid) -> CheckReport:
            system = ctx.system(check)
            members = {
                int(k): parse_expression(str(text), system) for k, text in check["members"].items()
            }
            pair = system.lax_pairs[check["pair"]]
            return chain_check(pair, system, check["family"], members, n, ctx.rules(check), cid)

        yield CheckTask(cid, run)


# -- symmetry algebras -----------------------------------------------------


def run_bracket(ctx: EntryContext, check: dict) -> Iterator[CheckTask]:
    names = check["basis"]
    for item in check["pairs"]:
        i, j = item["pair"]
        cid = _id(ctx, "bracket", f"{names[i - 1]},{names[j - 1]}")

        def run(i: int = i, j: int = j, item: dict = item, cid: str = cid) -> CheckReport:
            clock = RunClock()
            system = ctx.system(check)
            basis = [system.characteristic(name) for name in names]
            c = bracket_coefficients(basis[i - 1], basis[j - 1], basis, system, ctx.rules(check))
            expected = tuple(Fraction(v) for v in item["expect"])
            message = "" if c == expected else f"expected {format_coefficients(expected)}"
            return _verdict(cid, c == expected, f"c = {format_coefficients(c)}", clock, message)

        yield CheckTask(cid, run)


def run_structure(ctx: EntryContext, check: dict) -> Iterator[CheckTask]:
    cid = _id(ctx, "structure", check.get("name", "basis"))

    def run() -> CheckReport:
        clock = RunClock()
        system = ctx.system(check)
        basis = [system.characteristic(name) for name in check["basis"]]
        constants = structure_constants(basis, system, ctx.rules(check))
        bad = jacobi_violations(constants, len(basis))
        if bad:
            return _verdict(cid, False, f"Jacobi identity fails at {bad}", clock)
        return _verdict(cid, True, f"{len(basis)}-dimensional algebra, Jacobi holds", clock)

    yield CheckTask(cid, run)


def run_span(ctx: EntryContext, check: dict) -> Iterator[CheckTask]:
    cid = _id(ctx, "span", check["name"])

    def run() -> CheckReport:
        clock = RunClock()
        system = ctx.system(check)
        rules = ctx.rules(check)
        target, _ = reduce_expression(parse_expression(check["target"], system), rules)
        basis = [
            reduce_expression(system.characteristic(name).expr, rules)[0]
            for name in check["basis"]
        ]
        c = span_solve(target, basis)
        expected = tuple(Fraction(v) for v in check["expect"])
        message = "" if c == expected else f"expected {format_coefficients(expected)}"
        return _verdict(cid, c == expected, f"c = {format_coefficients(c)}", clock, message)

    yield CheckTask(cid, run)


# -- numeric oracles -------------------------------------------------------


def _residual_exprs(system: EquationSystem, check: dict) -> list[Expr]:
    exprs = [system.equations[name].expr for name in check.get("equations", ())]
    if "bt" in check:
        exprs.extend(system.bts[check["bt"]].relations)
    if not exprs:
        raise KeyError("A numeric check names equations or a Backlund transformation.")
    return exprs


def run_numeric(ctx: EntryContext, check: dict) -> Iterator[CheckTask]:
    cid = _id(ctx, "numeric", check["name"])

    def run() -> CheckReport:
        clock = RunClock()
        form = closed_form(ctx, check)
        exprs = _residual_exprs(ctx.system(check), check)
        worst = max(sample_residual(e, form.binding, form.points) for e in exprs)
        text = f"max |r| = {worst:.3e} over {len(form.points)} points"
        return _verdict(cid, _numeric_ok(worst, form.mode, form.tolerance), text, clock)

    yield CheckTask(cid, run)


def run_matrix_identity(ctx: EntryContext, check: dict) -> Iterator[CheckTask]:
    settings = ctx.settings
    mode = NumericMode(check.get("mode", NumericMode.FLOAT.value))
    trials = int(check.get("trials", 100))
    for identity in check["identities"]:
        for size in check.get("sizes", (2,)):
            cid = _id(ctx, "matrix_identity", f"{identity}:{size}")

            def run(identity: str = identity, size: int = size, cid: str = cid) -> CheckReport:
                clock = RunClock()
                worst = random_matrix_check(identity, size, trials, settings.seed, mode)
                text = f"max deviation {worst:.3e} over {trials} trials"
                return _verdict(cid, _numeric_ok(worst, mode, settings.tolerance), text, clock)

            yield CheckTask(cid, run)


def run_ernst_bridge(ctx: EntryContext, check: dict) -> Iterator[CheckTask]:
    cid = _id(ctx, "ernst_bridge", check["name"])
    settings = ctx.settings

    def run() -> CheckReport:
        clock = RunClock()
        domain = {var: (float(lo), float(hi)) for var, (lo, hi) in check["domain"].items()}
        points = sample_points(domain, settings.points, settings.seed)
        result = ernst_bridge(
            ctx.system(check), str(check["f"]), str(check["omega"]), points, settings.tolerance
        )
        ok = result.consistent and result.solution == bool(check["solution"])
        text = f"matrix {result.matrix_residual:.3e}, scalar {result.scalar_residual:.3e}"
        return _verdict(cid, ok, text, clock)

    yield CheckTask(cid, run)


def run_derivative(ctx: EntryContext, check: dict) -> Iterator[CheckTask]:
    cid = _id(ctx, "derivative", check["name"])

    def run() -> CheckReport:
        clock = RunClock()
        system = ctx.system(check)
        binding = ClosedFormBinding.from_texts(system.variables, check["solution"])
        point = {k: float(v) for k, v in check["point"].items()}
        try:
            found = finite_difference_cross_check(
                parse_expression(check["expr"], system), check["var"], binding, system, point
            )
        except NoConvergence as err:
            return _verdict(cid, False, str(err), clock)
        text = "exact differences" if found.exact else f"observed order {found.order:.2f}"
        return _verdict(cid, True, text, clock)

    yield CheckTask(cid, run)


CHECK_RUNNERS: dict[str, Runner] = {
    "symmetry": run_symmetry,
    "symmetry_template": run_symmetry_template,
    "identity": run_identity,
    "reduce": run_reduce,
    "conservation": run_conservation,
    "triviality": run_triviality,
    "bt": run_bt,
    "lax": run_lax,
    "series": run_series,
    "series_bt": run_series_bt,
    "chain": run_chain,
    "bracket": run_bracket,
    "structure": run_structure,
    "span": run_span,
    "numeric": run_numeric,
    "matrix_identity": run_matrix_identity,
    "ernst_bridge": run_ernst_bridge,
    "derivative": run_derivative,
}


def open_catalog(settings: Settings) -> Catalog:
    """Load the catalog named by the settings, validating check kinds."""
    return Catalog(settings.catalog_dir, frozenset(CHECK_RUNNERS), settings.pass_limit)


def run_task(task: CheckTask) -> CheckReport:
    """Run one task, turning a domain error or an unknown name into an error report.

    A zero report whose task names vanishing expressions is resampled on the
    entry's closed-form solutions first.
    """
    try:
        report = task.run()
        if report.is_zero and task.vanishing is not None:
            report = revalidate(report, task.vanishing(), task.solutions())
    except (JetcheckError, KeyError) as err:
        check_logger.warning(f"{task.check_id}: {type(err).__name__}: {err}")
        return CheckReport(task.check_id, CheckStatus.ERROR, message=f"{type(err).__name__}: {err}")
    return report if report.check_id == task.check_id else report.with_id(task.check_id)


def run_entry(
    catalog: Catalog, name: str, settings: Settings, kinds: frozenset[str] | None = None
) -> list[CheckReport]:
    """Run the declared checks of one entry.

    Parameters
    ----------
    catalog : Catalog
        Loaded catalog.
    name : str
        Entry name.
    settings : Settings
        Seed, pass limit, sample count and tolerance.
    kinds : frozenset of str or None, optional
        Only run checks of these kinds; every check when omitted.

    Returns
    -------
    list of CheckReport
        One report per task, in declaration order.
    """
    clock = RunClock()
    ctx = EntryContext(catalog, catalog.entry(name), settings)
    reports = []
    for check in ctx.entry.checks:
        if kinds is not None and check["kind"] not in kinds:
            continue
        for task in CHECK_RUNNERS[check["kind"]](ctx, check):
            reports.append(run_task(task))
    zero = sum(r.is_zero for r in reports)
    suite_logger.info(f"{name}: {zero}/{len(reports)} zero in {clock.elapsed_millis()} ms")
    return reports


def run_suite(
    name: str = "all",
    settings: Settings | None = None,
    catalog: Catalog | None = None,
    workers: int = 1,
) -> list[CheckReport]:
    """Run a catalog entry, or every entry, and return the reports.

    Parameters
    ----------
    name : str, optional
        Entry name, or ``"all"``.
    settings : Settings or None, optional
        Run settings; defaults when omitted.
    catalog : Catalog or None, optional
        Already loaded catalog; read from ``settings.catalog_dir`` when omitted.
    workers : int, optional
        Entries run concurrently.

    Returns
    -------
    list of CheckReport
        Reports sorted by check id.

    Raises
    ------
    UnknownEntry
        When ``name`` is neither an entry nor ``"all"``.
    """
    settings = settings or Settings()
    catalog = catalog or open_catalog(settings)
    names = catalog.names() if name == "all" else [catalog.entry(name).name]
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        batches = list(pool.map(lambda entry: run_entry(catalog, entry, settings), names))
    reports = sorted((r for batch in batches for r in batch), key=lambda r: r.check_id)
    summary = combine_reports(name, reports)
    suite_logger.info(f"Suite {name}: {len(reports)} reports, overall {summary.status.value}")
    return reports
