"""Unit tests for symmetries, conservation laws, Backlund transformations and Lax pairs."""

import unittest

from src.jetcheck.catalog.index import Catalog
from src.jetcheck.catalog.suite import expect_lowest_degree
from src.jetcheck.compat.backlund import bt_check, bt_compatibility, proportional
from src.jetcheck.compat.conservation import (
    conservation_check,
    divergence,
    triviality_classify,
)
from src.jetcheck.compat.lax import lax_compatibility
from src.jetcheck.compat.series import series_extract
from src.jetcheck.compat.symmetry import (
    TemplateCache,
    condition_identity,
    symmetry_check,
    template_check,
)
from src.jetcheck.enums import CheckStatus, Triviality
from src.jetcheck.exceptions import EliminationFailure
from src.jetcheck.parser.definitions import parse_definition_file
from src.jetcheck.parser.expressions import parse_expression
from src.jetcheck.reduction.rules import orient


class TestSymmetries(unittest.TestCase):
    """Symmetry conditions reduced modulo the sine-Gordon equation."""

    def setUp(self):
        self.system = Catalog().load_files(("sine-gordon.def",))
        self.rules = orient(self.system)

    def test_declared_characteristics(self):
        for name in ("Q1", "Q2", "Q3", "Q4"):
            q = self.system.characteristic(name)
            report = symmetry_check(q, self.system, self.rules)
            self.assertIs(report.status, CheckStatus.ZERO, name)
            self.assertEqual(report.check_id, f"symmetry/{name}")

    def test_not_a_symmetry(self):
        q = self.system.make_characteristic(
            "u", parse_expression("u_x + u", self.system), "u_x + u"
        )
        report = symmetry_check(q, self.system, self.rules)
        self.assertIs(report.status, CheckStatus.RESIDUAL)
        self.assertFalse(report.residual.is_zero)

    def test_generated_condition(self):
        report = template_check(self.system, "u", "Q_xt - cos(u)*Q")
        self.assertTrue(report.is_zero)
        report = template_check(self.system, "u", "Q_xt - sin(u)*Q")
        self.assertIs(report.status, CheckStatus.RESIDUAL)

    def test_condition_as_identity(self):
        system = Catalog().load_files(("heat.def",))
        report = condition_identity(system.characteristic("Q3"), system, "F")
        self.assertTrue(report.is_zero)

    def test_templates_are_keyed_on_content(self):
        cache = TemplateCache(maxsize=2)
        first = Catalog().load_files(("sine-gordon.def",))
        again = Catalog().load_files(("sine-gordon.def",))
        heat = Catalog().load_files(("heat.def",))
        _, template = cache.get(first, first.equations["F"], "u")
        _, repeated = cache.get(again, again.equations["F"], "u")
        self.assertEqual(repeated, template)
        self.assertEqual(len(cache), 1)
        cache.get(heat, heat.equations["F"], "u")
        cache.get(first, first.equations["F"], "u", "R")
        self.assertEqual(len(cache), 2)
        _, regenerated = cache.get(again, again.equations["F"], "u")
        self.assertEqual(regenerated, template)
        self.assertEqual(len(cache), 2)


class TestConservationLaws(unittest.TestCase):
    """KdV conservation laws and their triviality."""

    def setUp(self):
        self.system = Catalog().load_files(("kdv.def",))
        self.rules = orient(self.system)
        self.laws = self.system.conservation_laws

    def test_declared_laws(self):
        for name in ("C1", "C2", "C3"):
            report = conservation_check(self.laws[name], self.system, self.rules)
            self.assertTrue(report.is_zero, name)

    def test_non_law(self):
        text = (
            "[variables]\nx t\n[dependents]\nu scalar\n"
            "[equations]\nF @ u_t : u_t - 6*u*u_x + u_xxx\n"
            "[conservation_laws]\nW : t = u^3 | x = 0\n"
        )
        system = parse_definition_file(text)
        report = conservation_check(system.conservation_laws["W"], system, orient(system))
        self.assertIs(report.status, CheckStatus.RESIDUAL)

    def test_potential_rules_apply_while_differentiating(self):
        text = (
            "[variables]\nx t\n[dependents]\nu scalar\nv scalar\n"
            "[equations]\nF @ u_t : u_t - u_xx\n"
            "[rules]\nv_x := u\nv_t := u_x\n"
            "[conservation_laws]\nP : t = v_x | x = -u_x\n"
        )
        system = parse_definition_file(text)
        rules = orient(system)
        law = system.conservation_laws["P"]
        self.assertEqual(divergence(law, system), parse_expression("v_xt - u_xx", system))
        self.assertEqual(
            divergence(law, system, rules.potential_rewrite),
            parse_expression("u_t - u_xx", system),
        )
        self.assertTrue(conservation_check(law, system, rules).is_zero)

    def test_triviality_types(self):
        classify = triviality_classify
        self.assertIs(classify(self.laws["T1"], self.system).kind, Triviality.TYPE1)
        self.assertIs(classify(self.laws["T2"], self.system).kind, Triviality.TYPE2)
        known = [self.laws["C1"]]
        self.assertEqual(str(classify(self.laws["T3"], self.system, known)), "Type3(2, 0)")
        self.assertIs(classify(self.laws["T4"], self.system, known).kind, Triviality.TYPE4)

    def test_nontrivial_law(self):
        result = triviality_classify(self.laws["C2"], self.system, [self.laws["C1"]], self.rules)
        self.assertIs(result.kind, Triviality.NONTRIVIAL_SO_FAR)


class TestBacklund(unittest.TestCase):
    """Eliminating one side of a Backlund transformation."""

    def test_cauchy_riemann(self):
        system = Catalog().load_files(("laplace.def",))
        induced = bt_compatibility(system.bts["CR"], system)
        self.assertEqual(set(induced), {"u", "v"})
        expected = parse_expression("u_xx + u_yy", system)
        self.assertIsNotNone(proportional(induced["v"], expected))

    def test_sine_gordon_auto_transformation(self):
        system = Catalog().load_files(("sine-gordon.def",))
        bt = system.bts["B"]
        report = bt_check(bt, system, "v", parse_expression("u_xt - sin(u)", system))
        self.assertTrue(report.is_zero)
        self.assertEqual(report.check_id, "bt/B:v")

    def test_sine_gordon_needs_numeric_fallback(self):
        system = Catalog().load_files(("sine-gordon.def",))
        report = bt_check(
            system.bts["B"], system, "u", parse_expression("v_xt - sin(v)", system)
        )
        self.assertTrue(report.is_zero)
        self.assertIn("numeric", report.message)

    def test_liouville_to_wave_equation(self):
        system = Catalog().load_files(("liouville.def",))
        induced = bt_compatibility(system.bts["B"], system)
        self.assertEqual(proportional(induced["v"], parse_expression("u_xt - exp(u)", system)), -2)
        self.assertEqual(proportional(induced["u"], parse_expression("v_xt", system)), -2)

    def test_sine_gordon_elimination_is_orientable(self):
        system = Catalog().load_files(("sine-gordon.def",))
        induced = bt_compatibility(system.bts["B"], system)
        self.assertEqual(set(induced), {"u", "v"})
        self.assertFalse(induced["v"].is_zero)

    def test_wrong_expectation(self):
        system = Catalog().load_files(("laplace.def",))
        report = bt_check(
            system.bts["CR"], system, "v", parse_expression("u_xx - u_yy", system)
        )
        self.assertIs(report.status, CheckStatus.RESIDUAL)

    def test_proportional(self):
        system = Catalog().load_files(("laplace.def",))
        a = parse_expression("2*u_xx + 2*u_yy", system)
        b = parse_expression("u_xx + u_yy", system)
        self.assertEqual(proportional(a, b), 2)
        self.assertIsNone(proportional(a, parse_expression("u_xx", system)))


class TestLaxPairs(unittest.TestCase):
    """Compatibility of Lax pairs."""

    def test_schroedinger_pair(self):
        system = Catalog().load_files(("kdv.def",))
        result = lax_compatibility(system.lax_pairs["L"], system, orient(system))
        self.assertTrue(result.report.is_zero)
        report = expect_lowest_degree(result, parse_expression("F*psi", system))
        self.assertTrue(report.is_zero)

    def test_lowest_degree_mismatch(self):
        system = Catalog().load_files(("kdv.def",))
        result = lax_compatibility(system.lax_pairs["L"], system, orient(system))
        report = expect_lowest_degree(result, parse_expression("u*psi", system))
        self.assertIs(report.status, CheckStatus.RESIDUAL)

    def test_lowest_degree_is_compared_exactly(self):
        system = Catalog().load_files(("kdv.def",))
        result = lax_compatibility(system.lax_pairs["L"], system, orient(system))
        report = expect_lowest_degree(result, parse_expression("2*F*psi", system))
        self.assertIs(report.status, CheckStatus.RESIDUAL)
        self.assertEqual(result.shift, 0)
        self.assertEqual([r.check_id for r in result.reports], ["lax/L:lam^0"])

    def test_stripped_parameter_power_is_reported(self):
        system = Catalog().load_files(("sdym.def",))
        result = lax_compatibility(system.lax_pairs["L"], system, orient(system))
        self.assertTrue(result.report.is_zero)
        self.assertEqual(result.shift, 1)
        self.assertEqual(list(result.degrees), [0])
        self.assertEqual([r.check_id for r in result.reports], ["lax/L:lam^1"])
        self.assertIn("lam^1 stripped", result.report.message)
        self.assertEqual(result.degrees[0], parse_expression("F*Psi", system))

    def test_zero_curvature(self):
        system = Catalog().load_files(("zero-curvature.def",))
        result = lax_compatibility(system.lax_pairs["Z"], system, orient(system))
        self.assertTrue(result.report.is_zero)

    def test_series_relations(self):
        system = Catalog().load_files(("ernst.def",))
        (bt,) = series_extract(system.lax_pairs["S"], system, [0], "Phi")
        self.assertEqual(len(bt.relations), 2)
        second = parse_expression("Az(Phi[0]) + Phi[1]_rho", system)
        self.assertEqual(bt.relations[1], second)

    def test_series_pair_against_member_equations(self):
        system = Catalog().load_files(("ernst.def",))
        pair = system.lax_pairs["S"]
        right = "D[Arho(Phi[{n}]) - 2*{n}*Phi[{n}]; rho] + D[Az(Phi[{n}]); z]"
        wrong = "D[Arho(Phi[{n}]); rho] + D[Az(Phi[{n}]); z]"

        def member(template):
            return lambda n: parse_expression(template.format(n=n), system)

        result = lax_compatibility(
            pair, system, family="Phi", window=range(0, 2), expected=member(right)
        )
        self.assertTrue(result.report.is_zero)
        self.assertEqual(set(result.induced), {0, 1})
        result = lax_compatibility(
            pair, system, family="Phi", window=range(0, 2), expected=member(wrong)
        )
        statuses = [r.status for r in result.reports]
        self.assertEqual(statuses, [CheckStatus.ZERO, CheckStatus.RESIDUAL])

    def test_series_pair_needs_member_equations(self):
        system = Catalog().load_files(("ernst.def",))
        with self.assertRaises(EliminationFailure):
            lax_compatibility(system.lax_pairs["S"], system, family="Phi")


if __name__ == "__main__":
    unittest.main()
