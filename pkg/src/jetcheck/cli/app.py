"""The ``jetcheck`` command line.

Every subcommand returns its reports; the group prints nothing itself and
turns the reports into the exit code: 0 when all are zero, 1 with a residual,
2 for usage and input errors, 3 for error reports and internal failures.
"""

import json
from collections.abc import Sequence
from pathlib import Path

import click

from my_logger import check_logger
from src.jetcheck.algebra.structure import (
    bracket_coefficients,
    jacobi_violations,
    structure_constants,
)
from src.jetcheck.catalog.index import SYSTEMS_DIR
from src.jetcheck.catalog.suite import (
    expand_template,
    expect_lowest_degree,
    format_coefficients,
    open_catalog,
    run_entry,
    run_suite,
)
from src.jetcheck.cli.output import emit, emit_table, exit_code
from src.jetcheck.compat.backlund import bt_check, bt_compatibility
from src.jetcheck.compat.conservation import conservation_check, triviality_classify
from src.jetcheck.compat.lax import lax_compatibility
from src.jetcheck.compat.series import series_extract
from src.jetcheck.compat.symmetry import symmetry_check
from src.jetcheck.config import Settings, load_settings
from src.jetcheck.enums import CheckStatus, NumericMode, OutputFormat
from src.jetcheck.exceptions import InputError, JetcheckError, UnknownEntry
from src.jetcheck.numeric.evaluate import sample_points
from src.jetcheck.numeric.matrix_identities import IDENTITIES, random_matrix_check
from src.jetcheck.numeric.oracle import ernst_bridge
from src.jetcheck.parser.definitions import parse_definition_file
from src.jetcheck.parser.expressions import parse_expression
from src.jetcheck.parser.render import render
from src.jetcheck.reduction.rules import orient
from src.jetcheck.system.models import CheckReport, EquationSystem

NUMERIC_KINDS = frozenset({"numeric", "matrix_identity", "ernst_bridge", "derivative"})
ERNST_DOMAIN = {"rho": (0.5, 1.5), "z": (-1.0, 1.0)}


class InputFailure(click.ClickException):
    """Input the library rejected: unknown names, unreadable definitions."""

    exit_code = 2


class CheckFailure(click.ClickException):
    """A domain error outside any single check."""

    exit_code = 3


class JetcheckGroup(click.Group):
    """Group translating library errors into click exceptions carrying the exit codes."""

    def invoke(self, ctx: click.Context) -> object:
        try:
            return super().invoke(ctx)
        except InputError as err:
            raise InputFailure(str(err)) from err
        except KeyError as err:
            raise InputFailure(f"Unknown name {err}.") from err
        except JetcheckError as err:
            raise CheckFailure(f"{type(err).__name__}: {err}") from err


def resolve_definition(name: str, settings: Settings) -> Path:
    """Return a definition file: a path, or the file name of a bundled definition."""
    path = Path(name)
    if path.is_file():
        return path
    file_name = name if name.endswith(".def") else f"{name}.def"
    bundled = Path(settings.catalog_dir) / SYSTEMS_DIR / file_name
    if bundled.is_file():
        return bundled
    raise UnknownEntry(f"No definition file '{name}' here or in the catalog.")


def load_system(settings: Settings, system: str, overlays: Sequence[str] = ()) -> EquationSystem:
    """Parse ``--system`` and then every ``--basis`` overlay on top of it."""
    loaded: EquationSystem | None = None
    for name in (system, *overlays):
        text = resolve_definition(name, settings).read_text(encoding="utf-8")
        loaded = parse_definition_file(text, base=loaded)
    assert loaded is not None
    return loaded


def system_options(command: click.Command) -> click.Command:
    command = click.option(
        "--basis",
        "overlays",
        multiple=True,
        help="Overlay definition file (characteristics, laws) read after --system.",
    )(command)
    return click.option(
        "--system",
        "system_name",
        required=True,
        help="Definition file path, or the name of a bundled definition such as kdv.def.",
    )(command)


@click.group(cls=JetcheckGroup, name="jetcheck")
@click.option(
    "--format",
    "output_format",
    type=click.Choice([f.value for f in OutputFormat]),
    default=None,
    help="Report format.",
)
@click.option("--seed", type=int, default=None, help="Seed of every random draw.")
@click.option("--pass-limit", type=int, default=None, help="Rewriting passes per reduction.")
@click.option("--points", type=int, default=None, help="Sample points of closed-form checks.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Report file.")
@click.pass_context
def cli(
    ctx: click.Context,
    output_format: str | None,
    seed: int | None,
    pass_limit: int | None,
    points: int | None,
    out: str | None,
) -> None:
    """Verify symmetries, conservation laws, Backlund transformations and Lax pairs."""
    try:
        ctx.obj = load_settings(
            output_format=output_format, seed=seed, pass_limit=pass_limit, points=points, out=out
        )
    except ValueError as err:
        raise click.UsageError(str(err), ctx) from err


@cli.result_callback()
@click.pass_context
def finish(ctx: click.Context, reports: list[CheckReport] | None, **_: object) -> None:
    ctx.exit(exit_code(reports or []))


# -- catalog ---------------------------------------------------------------


@cli.group(cls=JetcheckGroup)
def catalog() -> None:
    """List and run the bundled catalog."""


@catalog.command(name="list")
@click.pass_obj
def catalog_list(settings: Settings) -> list[CheckReport]:
    """List the catalog entries."""
    found = open_catalog(settings)
    if settings.output_format is OutputFormat.JSON:
        listing = [
            {"name": e.name, "title": e.title, "systems": list(e.systems), "checks": len(e.checks)}
            for e in found.entries.values()
        ]
        click.echo(json.dumps(listing, indent=2))
    else:
        rows = [(e.name, e.title, len(e.checks)) for e in found.entries.values()]
        emit_table(rows, ("entry", "title", "checks"))
    return []


@catalog.command(name="run")
@click.argument("name")
@click.option("--workers", type=int, default=1, show_default=True, help="Entries run at once.")
@click.pass_obj
def catalog_run(settings: Settings, name: str, workers: int) -> list[CheckReport]:
    """Run the checks of catalog entry NAME, or of every entry with 'all'."""
    reports = run_suite(name, settings, workers=workers)
    emit(reports, settings)
    return reports


# -- symbolic checks -------------------------------------------------------


@cli.command()
@system_options
@click.option("--char", "chars", multiple=True, help="Characteristic expression.")
@click.option("--name", "names", multiple=True, help="Declared characteristic.")
@click.option("--target", default=None, help="Symbol a --char acts on; the primary lead's.")
@click.pass_obj
def symmetry(
    settings: Settings,
    system_name: str,
    overlays: tuple[str, ...],
    chars: tuple[str, ...],
    names: tuple[str, ...],
    target: str | None,
) -> list[CheckReport]:
    """Check characteristics against the symmetry condition (all declared ones by default)."""
    system = load_system(settings, system_name, overlays)
    rules = orient(system, settings.pass_limit)
    target = target or system.primary_equation().lead.name
    chosen = [system.characteristic(n) for n in names]
    chosen += [system.make_characteristic(target, parse_expression(c, system), c) for c in chars]
    if not chosen:
        chosen = list(system.characteristics.values())
    reports = [symmetry_check(q, system, rules, f"symmetry/{q.name}") for q in chosen]
    emit(reports, settings)
    return reports


@cli.command()
@system_options
@click.option("--law", "laws", multiple=True, help="Declared law; all by default.")
@click.option("--classify", is_flag=True, help="Classify triviality instead of checking.")
@click.option("--known", multiple=True, help="Laws already known, for the Type3 test.")
@click.pass_obj
def conslaw(
    settings: Settings,
    system_name: str,
    overlays: tuple[str, ...],
    laws: tuple[str, ...],
    classify: bool,
    known: tuple[str, ...],
) -> list[CheckReport]:
    """Check conservation laws, or classify their triviality."""
    system = load_system(settings, system_name, overlays)
    rules = orient(system, settings.pass_limit)
    declared = system.conservation_laws
    chosen = [declared[n] for n in laws] if laws else list(declared.values())
    if classify:
        basis = [declared[n] for n in known]
        reports = [
            CheckReport(
                f"triviality/{law.name}",
                CheckStatus.ZERO,
                text=str(triviality_classify(law, system, basis, rules)),
            )
            for law in chosen
        ]
    else:
        reports = [
            conservation_check(law, system, rules, f"conservation/{law.name}") for law in chosen
        ]
    emit(reports, settings)
    return reports


@cli.command()
@system_options
@click.option("--bt", "bt_name", default=None, help="Transformation; the only one by default.")
@click.option("--eliminate", default=None, help="Symbol to eliminate; both by default.")
@click.option("--expect", default=None, help="PDE the other symbol should satisfy.")
@click.pass_obj
def bt(
    settings: Settings,
    system_name: str,
    overlays: tuple[str, ...],
    bt_name: str | None,
    eliminate: str | None,
    expect: str | None,
) -> list[CheckReport]:
    """Eliminate a symbol from a Backlund transformation and show or check the induced PDE."""
    system = load_system(settings, system_name, overlays)
    if bt_name is None:
        if len(system.bts) != 1:
            raise click.UsageError(f"{system.name} declares {len(system.bts)} transformations.")
        bt_name = next(iter(system.bts))
    transformation = system.bts[bt_name]
    if expect is not None:
        if eliminate is None:
            raise click.UsageError("--expect needs --eliminate.")
        expected = parse_expression(expect, system)
        reports = [
            bt_check(
                transformation,
                system,
                eliminate,
                expected,
                seed=settings.seed,
                tolerance=settings.tolerance,
                pass_limit=settings.pass_limit,
            )
        ]
    else:
        induced = bt_compatibility(transformation, system, eliminate, settings.pass_limit)
        reports = [
            CheckReport(f"bt/{bt_name}:{symbol}", CheckStatus.ZERO, text=render(pde))
            for symbol, pde in induced.items()
        ]
    emit(reports, settings)
    return reports


@cli.command()
@system_options
@click.option("--pair", "pair_name", required=True, help="Lax pair.")
@click.option("--family", default=None, help="Series family of a parameter-derivative pair.")
@click.option("--window", nargs=2, type=int, default=(-1, 1), help="Series indices LOW HIGH.")
@click.option(
    "--expect",
    default=None,
    help="Expected lowest-degree residual (F*psi), or for series pairs the PDE of member {n}.",
)
@click.pass_obj
def lax(
    settings: Settings,
    system_name: str,
    overlays: tuple[str, ...],
    pair_name: str,
    family: str | None,
    window: tuple[int, int],
    expect: str | None,
) -> list[CheckReport]:
    """Check that a Lax pair is compatible on solutions, degree by degree."""
    system = load_system(settings, system_name, overlays)
    pair = system.lax_pairs[pair_name]
    series = pair.dparam is not None
    result = lax_compatibility(
        pair,
        system,
        orient(system, settings.pass_limit),
        family=family,
        window=range(window[0], window[1] + 1),
        expected=(
            (lambda n: parse_expression(expand_template(expect, n), system))
            if series and expect is not None
            else None
        ),
        seed=settings.seed,
        tolerance=settings.tolerance,
    )
    combined = result.report
    if expect is not None and not series:
        combined = expect_lowest_degree(result, parse_expression(expect, system))
    reports = [*result.reports, combined]
    emit(reports, settings)
    return reports


@cli.command()
@system_options
@click.option("--pair", "pair_name", required=True, help="Lax pair.")
@click.option("--family", required=True, help="Family replacing the auxiliary symbol.")
@click.option("-n", "indices", multiple=True, type=int, default=(0,), help="Series index.")
@click.pass_obj
def series(
    settings: Settings,
    system_name: str,
    overlays: tuple[str, ...],
    pair_name: str,
    family: str,
    indices: tuple[int, ...],
) -> list[CheckReport]:
    """Show the relations between consecutive members of a Lax pair's series."""
    system = load_system(settings, system_name, overlays)
    extracted = series_extract(system.lax_pairs[pair_name], system, indices, family)
    reports = [
        CheckReport(f"series/{pair_name}:n={n}:{pos}", CheckStatus.ZERO, text=render(relation))
        for n, relations in zip(indices, extracted)
        for pos, relation in enumerate(relations.relations, start=1)
    ]
    emit(reports, settings)
    return reports


# -- symmetry algebras -----------------------------------------------------


def _basis(system: EquationSystem, names: tuple[str, ...]) -> list:
    if names:
        return [system.characteristic(n) for n in names]
    return list(system.characteristics.values())


@cli.command()
@system_options
@click.option("--pair", "pair", nargs=2, type=int, required=True, help="1-based indices I J.")
@click.option("--name", "names", multiple=True, help="Basis characteristic; all by default.")
@click.pass_obj
def bracket(
    settings: Settings,
    system_name: str,
    overlays: tuple[str, ...],
    pair: tuple[int, int],
    names: tuple[str, ...],
) -> list[CheckReport]:
    """Expand the bracket of two basis characteristics in the basis."""
    system = load_system(settings, system_name, overlays)
    basis = _basis(system, names)
    i, j = pair
    if not (1 <= i <= len(basis) and 1 <= j <= len(basis)):
        raise click.BadParameter(f"indices run from 1 to {len(basis)}", param_hint="--pair")
    rules = orient(system, settings.pass_limit)
    c = bracket_coefficients(basis[i - 1], basis[j - 1], basis, system, rules)
    check_id = f"bracket/{basis[i - 1].name},{basis[j - 1].name}"
    reports = [CheckReport(check_id, CheckStatus.ZERO, text=f"c = {format_coefficients(c)}")]
    emit(reports, settings)
    return reports


@cli.command()
@system_options
@click.option("--name", "names", multiple=True, help="Basis characteristic; all by default.")
@click.pass_obj
def structure(
    settings: Settings, system_name: str, overlays: tuple[str, ...], names: tuple[str, ...]
) -> list[CheckReport]:
    """Compute the structure constants of a symmetry basis and test the Jacobi identity."""
    system = load_system(settings, system_name, overlays)
    basis = _basis(system, names)
    constants = structure_constants(basis, system, orient(system, settings.pass_limit))
    reports = [
        CheckReport(
            f"structure/{basis[i - 1].name},{basis[j - 1].name}",
            CheckStatus.ZERO,
            text=f"c = {format_coefficients(c)}",
        )
        for (i, j), c in constants.items()
        if i < j
    ]
    bad = jacobi_violations(constants, len(basis))
    reports.append(
        CheckReport(
            "structure/jacobi",
            CheckStatus.RESIDUAL if bad else CheckStatus.ZERO,
            text=f"fails at {bad}" if bad else None,
        )
    )
    emit(reports, settings)
    return reports


# -- numeric oracles -------------------------------------------------------


@cli.command()
@click.option("--entry", default=None, help="Run the numeric checks of a catalog entry.")
@click.option(
    "--identity",
    "identities",
    multiple=True,
    type=click.Choice(sorted(IDENTITIES)),
    help="Matrix identity to sample.",
)
@click.option("--size", type=int, default=2, show_default=True, help="Matrix size.")
@click.option("--trials", type=int, default=100, show_default=True, help="Random samples.")
@click.option(
    "--mode",
    type=click.Choice([m.value for m in NumericMode]),
    default=NumericMode.FLOAT.value,
    show_default=True,
    help="Float samples or exact rationals.",
)
@click.option("--ernst", nargs=2, default=None, help="Ernst potentials F OMEGA in rho and z.")
@click.pass_obj
def numeric(
    settings: Settings,
    entry: str | None,
    identities: tuple[str, ...],
    size: int,
    trials: int,
    mode: str,
    ernst: tuple[str, str] | None,
) -> list[CheckReport]:
    """Run numeric oracles: matrix identities, closed-form samples, the Ernst bridge."""
    if not (entry or identities or ernst):
        raise click.UsageError("Give --entry, --identity or --ernst.")
    reports: list[CheckReport] = []
    if entry:
        reports += run_entry(open_catalog(settings), entry, settings, NUMERIC_KINDS)
    numeric_mode = NumericMode(mode)
    for identity in identities:
        worst = random_matrix_check(identity, size, trials, settings.seed, numeric_mode)
        ok = worst == 0 if numeric_mode is NumericMode.EXACT else worst <= settings.tolerance
        reports.append(
            CheckReport(
                f"matrix_identity/{identity}:{size}",
                CheckStatus.ZERO if ok else CheckStatus.RESIDUAL,
                text=f"max deviation {worst:.3e} over {trials} trials",
            )
        )
    if ernst:
        system = load_system(settings, "ernst.def")
        points = sample_points(ERNST_DOMAIN, settings.points, settings.seed)
        result = ernst_bridge(system, ernst[0], ernst[1], points, settings.tolerance)
        verdict = "solution" if result.solution else "not a solution"
        reports.append(
            CheckReport(
                "ernst_bridge",
                CheckStatus.ZERO if result.consistent else CheckStatus.RESIDUAL,
                text=f"{verdict}: matrix {result.matrix_residual:.3e}, "
                f"scalar {result.scalar_residual:.3e}",
            )
        )
    emit(reports, settings)
    return reports


@cli.command()
@system_options
@click.argument("expression", required=False)
@click.pass_obj
def parse(
    settings: Settings, system_name: str, overlays: tuple[str, ...], expression: str | None
) -> list[CheckReport]:
    """Echo the normal form of EXPRESSION, or summarize the definition file."""
    system = load_system(settings, system_name, overlays)
    if expression is None:
        text = (
            f"{len(system.equations)} equations, {len(system.characteristics)} characteristics, "
            f"{len(system.conservation_laws)} laws, {len(system.lax_pairs)} Lax pairs, "
            f"{len(system.bts)} transformations"
        )
        reports = [CheckReport(f"parse/{system.name}", CheckStatus.ZERO, text=text)]
    else:
        normal = parse_expression(expression, system)
        reports = [CheckReport("parse", CheckStatus.ZERO, text=render(normal))]
    emit(reports, settings)
    return reports


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command line and return its exit code.

    Parameters
    ----------
    argv : sequence of str or None, optional
        Arguments without the program name; ``sys.argv[1:]`` when None.

    Returns
    -------
    int
        0, 1, 2 or 3 as described in the module docstring.
    """
    try:
        code = cli.main(
            args=list(argv) if argv is not None else None,
            prog_name="jetcheck",
            standalone_mode=False,
        )
    except click.ClickException as err:
        err.show()
        return err.exit_code if isinstance(err, (InputFailure, CheckFailure)) else 2
    except click.Abort:
        return 2
    except Exception:
        check_logger.exception("Unexpected failure")
        return 3
    return code if isinstance(code, int) else 0
