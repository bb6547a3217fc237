"""Unit tests for the jetcheck command line."""

import json
import unittest
from pathlib import Path

from click.testing import CliRunner

from src.jetcheck.cli.app import cli, main
from src.jetcheck.parser.reports import validate_document


class TestExitCodes(unittest.TestCase):
    """Exit codes of ``main``."""

    def test_all_zero(self):
        argv = ["bracket", "--system", "kdv-symmetry.def", "--basis", "kdv-basis.def"]
        self.assertEqual(main([*argv, "--pair", "2", "3"]), 0)

    def test_residual(self):
        argv = ["symmetry", "--system", "sine-gordon.def", "--char", "u_x + u"]
        self.assertEqual(main(argv), 1)

    def test_unknown_entry(self):
        self.assertEqual(main(["catalog", "run", "toda"]), 2)

    def test_unknown_definition_file(self):
        self.assertEqual(main(["symmetry", "--system", "toda.def"]), 2)

    def test_syntax_error(self):
        self.assertEqual(main(["parse", "--system", "sine-gordon.def", "u_x +"]), 2)

    def test_usage_errors(self):
        self.assertEqual(main(["numeric"]), 2)
        self.assertEqual(main(["--pass-limit", "0", "catalog", "list"]), 2)
        self.assertEqual(main(["bracket", "--system", "kdv.def", "--pair", "1"]), 2)


class TestOutput(unittest.TestCase):
    """Printed tables, JSON documents and report files."""

    def setUp(self):
        self.runner = CliRunner()

    def test_bracket_table(self):
        argv = ["bracket", "--system", "kdv-symmetry.def", "--basis", "kdv-basis.def"]
        result = self.runner.invoke(cli, [*argv, "--pair", "2", "3"])
        self.assertEqual(result.exit_code, 0)
        self.assertIn("c = (-1, 0, 0, 0)", result.output)
        self.assertIn("summary: 1 zero, 0 residual, 0 error; seed 1729", result.output)

    def test_induced_equations(self):
        result = self.runner.invoke(cli, ["bt", "--system", "laplace.def"])
        self.assertEqual(result.exit_code, 0)
        self.assertIn("bt/CR:u", result.output)
        self.assertIn("bt/CR:v", result.output)

    def test_json_document(self):
        result = self.runner.invoke(cli, ["--format", "json", "conslaw", "--system", "kdv.def"])
        self.assertEqual(result.exit_code, 0)
        document = json.loads(result.stdout)
        validate_document(document)
        ids = [item["check_id"] for item in document["reports"]]
        self.assertIn("conservation/T2", ids)
        self.assertEqual(document["seed"], 1729)

    def test_report_file(self):
        with self.runner.isolated_filesystem():
            result = self.runner.invoke(
                cli,
                ["--out", "reports.json", "--format", "json", "conslaw", "--system", "kdv.def"],
            )
            self.assertEqual(result.exit_code, 0)
            self.assertIn("reports written to reports.json", result.output)
            validate_document(json.loads(Path("reports.json").read_text(encoding="utf-8")))

    def test_seed_from_environment(self):
        argv = ["numeric", "--identity", "inverse-derivative", "--mode", "exact"]
        result = self.runner.invoke(cli, argv, env={"JETCHECK_SEED": "5"})
        self.assertEqual(result.exit_code, 0)
        self.assertIn("seed 5", result.output)

    def test_classification(self):
        result = self.runner.invoke(
            cli, ["conslaw", "--system", "kdv.def", "--classify", "--law", "T3", "--known", "C1"]
        )
        self.assertEqual(result.exit_code, 0)
        self.assertIn("Type3(2, 0)", result.output)

    def test_catalog_listing(self):
        result = self.runner.invoke(cli, ["catalog", "list"])
        self.assertEqual(result.exit_code, 0)
        for name in ("sine-gordon", "kdv", "sdym", "ernst"):
            self.assertIn(name, result.output)

    def test_parse_summary(self):
        result = self.runner.invoke(cli, ["parse", "--system", "sine-gordon.def"])
        self.assertEqual(result.exit_code, 0)
        self.assertIn("2 equations, 4 characteristics, 3 laws", result.output)


if __name__ == "__main__":
    unittest.main()
