"""Unit tests for definition files and report documents."""

import json
import unittest

from src.jetcheck.catalog.index import Catalog
from src.jetcheck.enums import CheckStatus, ExprClass
from src.jetcheck.exceptions import (
    DefinitionFormatError,
    DuplicateName,
    MissingOrientation,
    UndeclaredSymbol,
)
from src.jetcheck.parser.definitions import parse_definition_file
from src.jetcheck.parser.expressions import parse_expression
from src.jetcheck.parser.reports import reports_from_json, reports_to_json, validate_document
from src.jetcheck.system.models import CheckReport

BURGERS = """\
# potential Burgers
[system]
name = pburgers
title = Potential Burgers equation

[variables]
x t

[dependents]
u scalar

[equations]
F @ u_t : u_t - u_xx \\
        - u_x^2

[characteristics]
Q1 (u) : u_x
Q2 (u) : 1
"""


class TestDefinitionFile(unittest.TestCase):
    """Reading section-headed definition files."""

    def test_read_system(self):
        system = parse_definition_file(BURGERS)
        self.assertEqual(system.name, "pburgers")
        self.assertEqual(system.variables, ("x", "t"))
        self.assertEqual(list(system.characteristics), ["Q1", "Q2"])
        self.assertEqual(system.primary_equation().lead.text(), "u_t")
        self.assertEqual(
            system.equations["F"].expr, parse_expression("u_t - u_xx - u_x^2", system)
        )

    def test_sections_in_any_order(self):
        shuffled = "[dependents]\nu scalar\n[variables]\nx t\n[equations]\nF @ u_t : u_t - u_xx\n"
        system = parse_definition_file(shuffled)
        self.assertEqual(system.variables, ("x", "t"))
        self.assertIn("F", system.equations)

    def test_matrix_properties(self):
        system = Catalog().load_files(("sdym.def",))
        self.assertIs(system.symbol("J").cls, ExprClass.MATRIX)
        self.assertIs(system.symbol("eps").cls, ExprClass.SCALAR)

    def test_overlay_adds_characteristics(self):
        system = Catalog().load_files(("kdv-symmetry.def", "kdv-basis.def"))
        self.assertEqual(list(system.characteristics), ["Q1", "Q2", "Q3", "Q4"])

    def test_missing_orientation(self):
        text = BURGERS.replace("F @ u_t :", "F :")
        with self.assertRaises(MissingOrientation) as caught:
            parse_definition_file(text)
        self.assertIsNotNone(caught.exception.line)

    def test_duplicate_name(self):
        text = BURGERS + "Q1 (u) : u_t\n"
        with self.assertRaises(DuplicateName):
            parse_definition_file(text)

    def test_undeclared_symbol_reports_line(self):
        text = BURGERS + "Q3 (u) : w_x\n"
        with self.assertRaises(UndeclaredSymbol) as caught:
            parse_definition_file(text)
        self.assertEqual(caught.exception.line, BURGERS.count("\n") + 1)

    def test_unknown_section(self):
        with self.assertRaises(DefinitionFormatError):
            parse_definition_file(BURGERS + "[symmetries]\nQ3 (u) : u\n")

    def test_dangling_continuation(self):
        with self.assertRaises(DefinitionFormatError):
            parse_definition_file(BURGERS + "Q3 (u) : u \\\n")


class TestReportDocument(unittest.TestCase):
    """The JSON report document."""

    def setUp(self):
        self.reports = [
            CheckReport("kdv/symmetry/Q2", CheckStatus.ZERO, passes=2, millis=5),
            CheckReport("kdv/symmetry/Q1", CheckStatus.RESIDUAL, text="u_x", passes=1),
            CheckReport("kdv/lax/L", CheckStatus.ERROR, message="NotLaurent: psi"),
        ]

    def test_document_is_sorted_and_valid(self):
        document = json.loads(reports_to_json(self.reports, seed=7))
        validate_document(document)
        self.assertEqual(document["seed"], 7)
        ids = [item["check_id"] for item in document["reports"]]
        self.assertEqual(ids, sorted(ids))
        self.assertEqual(document["reports"][0]["residual_text"], "NotLaurent: psi")

    def test_read_back(self):
        seed, reports = reports_from_json(reports_to_json(self.reports, seed=7))
        self.assertEqual(seed, 7)
        statuses = {r.check_id: r.status for r in reports}
        self.assertIs(statuses["kdv/symmetry/Q1"], CheckStatus.RESIDUAL)
        self.assertEqual(reports[1].residual_text, "u_x")

    def test_rejects_unknown_status(self):
        document = json.loads(reports_to_json(self.reports, seed=7))
        document["reports"][0]["status"] = "maybe"
        with self.assertRaises(ValueError):
            validate_document(document)

    def test_rejects_extra_keys(self):
        with self.assertRaises(ValueError):
            validate_document({"seed": 1, "reports": [], "extra": True})


if __name__ == "__main__":
    unittest.main()
