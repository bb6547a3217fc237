"""Unit tests for the bundled catalog and its suites."""

import shutil
import tempfile
import unittest
from collections import Counter
from fractions import Fraction
from pathlib import Path

from src.jetcheck.catalog.index import Catalog, EntryContext
from src.jetcheck.catalog.suite import (
    CHECK_RUNNERS,
    CheckTask,
    format_coefficients,
    run_entry,
    run_suite,
    run_task,
    solutions_of,
)
from src.jetcheck.compat.conservation import divergence
from src.jetcheck.config import CATALOG_DIR, Settings
from src.jetcheck.enums import CheckStatus
from src.jetcheck.exceptions import DefinitionFormatError, UnknownEntry
from src.jetcheck.numeric.evaluate import sample_residual
from src.jetcheck.parser.expressions import parse_expression
from src.jetcheck.system.models import CheckReport

ENTRIES = (
    "laplace",
    "liouville",
    "sine-gordon",
    "kdv",
    "heat",
    "burgers",
    "wave",
    "sigma-model",
    "zero-curvature",
    "sdym",
    "ernst",
    "appendix",
)


def _kinds(reports) -> Counter:
    return Counter(r.check_id.split("/")[1] for r in reports)


class TestCatalogIndex(unittest.TestCase):
    """Loading the index."""

    def setUp(self):
        self.catalog = Catalog(kinds=frozenset(CHECK_RUNNERS))

    def test_entries(self):
        self.assertEqual(tuple(self.catalog.names()), ENTRIES)
        self.assertEqual(self.catalog.entry("kdv").default_system, "kdv")
        self.assertEqual(
            self.catalog.entry("kdv").systems["kdv-symmetry"],
            ("kdv-symmetry.def", "kdv-basis.def"),
        )

    def test_every_entry_has_a_page(self):
        for name in ENTRIES:
            self.assertTrue(self.catalog.page_path(name).is_file(), name)

    def test_unknown_entry(self):
        with self.assertRaises(UnknownEntry):
            self.catalog.entry("toda")

    def test_systems_are_cached(self):
        self.assertIs(self.catalog.system("kdv"), self.catalog.system("kdv"))
        self.assertIs(self.catalog.rules("kdv"), self.catalog.rules("kdv"))

    def test_format_coefficients(self):
        self.assertEqual(format_coefficients((Fraction(-1), Fraction(1, 2))), "(-1, 1/2)")


class TestUserCatalog(unittest.TestCase):
    """A catalog in a temporary directory."""

    def setUp(self):
        self.directory = Path(tempfile.mkdtemp())
        (self.directory / "systems").mkdir()
        shutil.copy(CATALOG_DIR / "systems" / "heat.def", self.directory / "systems")

    def tearDown(self):
        shutil.rmtree(self.directory)

    def write_index(self, text: str) -> None:
        (self.directory / "index.yaml").write_text(text, encoding="utf-8")

    def test_failing_check_does_not_stop_the_entry(self):
        self.write_index(
            "entries:\n"
            "  heat:\n"
            "    title: Heat\n"
            "    systems: {heat: [heat.def]}\n"
            "    checks:\n"
            "      - {kind: symmetry, characteristics: [Q1, Q9]}\n"
            "      - {kind: identity, characteristic: Q3, expect: 2*F}\n"
        )
        catalog = Catalog(self.directory, frozenset(CHECK_RUNNERS))
        reports = {r.check_id: r for r in run_entry(catalog, "heat", Settings())}
        self.assertIs(reports["heat/symmetry/Q1"].status, CheckStatus.ZERO)
        self.assertIs(reports["heat/symmetry/Q9"].status, CheckStatus.ERROR)
        self.assertIs(reports["heat/identity/Q3"].status, CheckStatus.RESIDUAL)

    def test_unknown_kind(self):
        self.write_index(
            "entries:\n"
            "  heat:\n"
            "    systems: {heat: [heat.def]}\n"
            "    checks:\n"
            "      - {kind: telepathy}\n"
        )
        with self.assertRaises(DefinitionFormatError):
            Catalog(self.directory, frozenset(CHECK_RUNNERS))


class TestSuites(unittest.TestCase):
    """Bundled entries verify completely."""

    def assert_all_zero(self, reports) -> None:
        bad = [r for r in reports if not r.is_zero]
        self.assertEqual(bad, [], f"{len(bad)} checks did not reduce to zero")

    def test_sine_gordon(self):
        reports = run_suite("sine-gordon")
        self.assertEqual(len(reports), 12)
        self.assert_all_zero(reports)

    def test_kdv(self):
        reports = run_suite("kdv")
        kinds = _kinds(reports)
        self.assertEqual(kinds["conservation"], 3)
        self.assertEqual(kinds["bracket"], 6)
        self.assertEqual(kinds["symmetry"], 4)
        self.assertEqual(kinds["triviality"], 4)
        self.assert_all_zero(reports)
        texts = {r.check_id: r.residual_text for r in reports}
        self.assertEqual(texts["kdv/bracket/Q2,Q3"], "c = (-1, 0, 0, 0)")
        self.assertEqual(texts["kdv/triviality/T3"], "Type3(2, 0)")

    def test_sdym(self):
        reports = run_suite("sdym")
        self.assertGreaterEqual(_kinds(reports)["symmetry"], 12)
        self.assert_all_zero(reports)

    def test_ernst(self):
        reports = run_suite("ernst")
        self.assertEqual(len(reports), 14)
        self.assert_all_zero(reports)

    def test_reports_are_sorted(self):
        reports = run_suite("heat")
        ids = [r.check_id for r in reports]
        self.assertEqual(ids, sorted(ids))

    def test_seed_makes_runs_repeatable(self):
        settings = Settings(seed=11)
        first = [(r.check_id, r.residual_text) for r in run_suite("laplace", settings)]
        second = [(r.check_id, r.residual_text) for r in run_suite("laplace", settings)]
        self.assertEqual(first, second)

    def test_unknown_entry(self):
        with self.assertRaises(UnknownEntry):
            run_suite("toda")


class TestClosedFormRevalidation(unittest.TestCase):
    """Zero verdicts resampled on the closed-form solutions of their entry."""

    def setUp(self):
        self.catalog = Catalog(kinds=frozenset(CHECK_RUNNERS))

    def context(self, name: str) -> EntryContext:
        return EntryContext(self.catalog, self.catalog.entry(name), Settings())

    def zero_task(self, name: str, text: str) -> CheckTask:
        ctx = self.context(name)
        system = self.catalog.system(name)
        check_id = f"{name}/reduce/claimed"
        return CheckTask(
            check_id,
            lambda: CheckReport(check_id, CheckStatus.ZERO),
            lambda: [parse_expression(text, system)],
            lambda: solutions_of(ctx, {"kind": "reduce"}),
        )

    def test_conservation_laws_vanish_on_solitons_and_kinks(self):
        for name, solution in (("kdv", "soliton"), ("sine-gordon", "kink")):
            system = self.catalog.system(name)
            (form,) = solutions_of(self.context(name), {"kind": "conservation"})
            self.assertEqual(form.name, f"{name}/numeric/{solution}")
            for law in ("C1", "C2", "C3"):
                with self.subTest(entry=name, law=law):
                    flux = divergence(system.conservation_laws[law], system)
                    self.assertLessEqual(sample_residual(flux, form.binding, form.points), 1e-9)

    def test_systems_without_closed_forms(self):
        ctx = self.context("kdv")
        self.assertEqual(solutions_of(ctx, {"kind": "symmetry", "system": "kdv-symmetry"}), [])

    def test_contradicted_zero_becomes_an_error(self):
        report = run_task(self.zero_task("sine-gordon", "u_xt"))
        self.assertIs(report.status, CheckStatus.ERROR)
        self.assertIn("sine-gordon/numeric/kink", report.message)

    def test_consequence_of_the_equation_is_kept(self):
        text = "u_x*(u_xt - sin(u)) + D[u_xt - sin(u); t]"
        report = run_task(self.zero_task("sine-gordon", text))
        self.assertIs(report.status, CheckStatus.ZERO)

    def test_unbound_symbols_are_skipped(self):
        report = run_task(self.zero_task("sine-gordon", "v_xt"))
        self.assertIs(report.status, CheckStatus.ZERO)

    def test_revalidated_kinds_stay_zero(self):
        reports = run_entry(
            self.catalog, "sine-gordon", Settings(), frozenset({"symmetry", "conservation"})
        )
        self.assertEqual(len(reports), 7)
        self.assertTrue(all(r.is_zero for r in reports))


if __name__ == "__main__":
    unittest.main()
