"""Unit tests for total derivatives, the Euler operator and reduction modulo a system."""

import unittest

from src.jetcheck.algebra.euler import euler_test
from src.jetcheck.catalog.index import Catalog
from src.jetcheck.enums import CheckStatus
from src.jetcheck.expr.normalize import replace_symbols
from src.jetcheck.exceptions import NonlinearInLeading, UndeclaredLieAction
from src.jetcheck.jet.derivations import lie_apply, lie_bracket, total_derivative
from src.jetcheck.parser.expressions import parse_expression
from src.jetcheck.reduction.reduce import reduce_expression, reduce_mod
from src.jetcheck.reduction.rules import orient, orient_expression
from src.jetcheck.system.models import Characteristic


class TestTotalDerivative(unittest.TestCase):
    """Total derivatives on the KdV jet space."""

    def setUp(self):
        self.system = Catalog().load_files(("kdv.def",))

    def parse(self, text: str):
        return parse_expression(text, self.system)

    def test_product_rule(self):
        result = total_derivative(self.parse("u*u_x"), "x", self.system)
        self.assertEqual(result, self.parse("u_x^2 + u*u_xx"))

    def test_explicit_variable(self):
        result = total_derivative(self.parse("t*u"), "t", self.system)
        self.assertEqual(result, self.parse("u + t*u_t"))

    def test_constants_and_parameters(self):
        self.assertTrue(total_derivative(self.parse("3*lam"), "x", self.system).is_zero)

    def test_derivatives_commute(self):
        e = self.parse("u^2*u_xx")
        xt = total_derivative(total_derivative(e, "x", self.system), "t", self.system)
        tx = total_derivative(total_derivative(e, "t", self.system), "x", self.system)
        self.assertEqual(xt, tx)


class TestEulerOperator(unittest.TestCase):
    """The variational derivative detects total x-derivatives."""

    def setUp(self):
        self.system = Catalog().load_files(("kdv.def",))
        self.u = self.system.symbol("u")

    def parse(self, text: str):
        return parse_expression(text, self.system)

    def test_total_derivative_is_annihilated(self):
        for text in ("u*u_x", "u_xx", "u_x*u_xx + u^2*u_x"):
            self.assertTrue(euler_test(self.parse(text), self.u, "x", self.system).is_zero, text)

    def test_nontrivial_density(self):
        result = euler_test(self.parse("u_x^2"), self.u, "x", self.system)
        self.assertEqual(result, self.parse("-2*u_xx"))

    def test_rejects_other_variables(self):
        with self.assertRaises(ValueError):
            euler_test(self.parse("u_t"), self.u, "x", self.system)


class TestReduction(unittest.TestCase):
    """Rewriting modulo the oriented KdV equation."""

    def setUp(self):
        self.system = Catalog().load_files(("kdv.def",))
        self.rules = orient(self.system)

    def parse(self, text: str):
        return parse_expression(text, self.system)

    def test_leading_derivative_is_replaced(self):
        result, passes = reduce_expression(self.parse("u_t"), self.rules)
        self.assertEqual(result, self.parse("6*u*u_x - u_xxx"))
        self.assertGreaterEqual(passes, 1)

    def test_prolonged_rules(self):
        for text in ("F", "D[F; x]", "D[F; x, t]", "u*D[F; x] - u_x*F"):
            self.assertTrue(reduce_mod(self.parse(text), self.rules).is_zero, text)

    def test_residual_is_in_normal_form(self):
        report = reduce_mod(self.parse("u_t + u_xxx"), self.rules, "kdv/reduce")
        self.assertIs(report.status, CheckStatus.RESIDUAL)
        self.assertEqual(report.residual, self.parse("6*u*u_x"))
        self.assertEqual(report.check_id, "kdv/reduce")

    def test_free_expressions_are_untouched(self):
        result, _ = reduce_expression(self.parse("u_xxx + x*u"), self.rules)
        self.assertEqual(result, self.parse("u_xxx + x*u"))

    def test_simultaneous_passes_match_highest_first_rewriting(self):
        def one_at_a_time(e):
            while True:
                reducible = [s for s in e.symbols() if self.rules.rule_for(s)]
                if not reducible:
                    return e
                target = max(reducible, key=lambda s: (s.index.rank_key(), s.text()))
                replacement = self.rules.rewrite_symbol(target)
                e = replace_symbols(e, lambda atom: replacement if atom == target else None)

        for text in ("u_t*u_xt + u_tt", "u_xxt*exp(u_t) - u*u_txx", "D[F; t, t]*u_t"):
            e = self.parse(text)
            with self.subTest(text=text):
                self.assertEqual(reduce_expression(e, self.rules)[0], one_at_a_time(e))


class TestOrientation(unittest.TestCase):
    """Orienting equations whose remainder is a function of lower derivatives."""

    def test_function_of_lower_derivatives(self):
        for file_name, remainder in (("sine-gordon.def", "sin(u)"), ("liouville.def", "exp(u)")):
            system = Catalog().load_files((file_name,))
            rule = orient(system).rules[0]
            with self.subTest(system=system.name):
                self.assertEqual(rule.lead, system.equations["F"].lead)
                self.assertEqual(rule.remainder, parse_expression(remainder, system))

    def test_function_of_the_lead_is_rejected(self):
        system = Catalog().load_files(("sine-gordon.def",))
        lead = system.equations["F"].lead
        for text in ("u_xt - sin(u_xt)", "u_xt - exp(u_xxt)"):
            with self.assertRaises(NonlinearInLeading, msg=text):
                orient_expression("bad", parse_expression(text, system), lead)


class TestLieBracket(unittest.TestCase):
    """Brackets of KdV point symmetries."""

    def setUp(self):
        self.system = Catalog().load_files(("kdv-symmetry.def", "kdv-basis.def"))
        self.rules = orient(self.system)

    def test_translations_commute(self):
        q1 = self.system.characteristic("Q1")
        q2 = self.system.characteristic("Q2")
        bracket = lie_bracket(q1, q2, self.system)
        self.assertTrue(reduce_expression(bracket.expr, self.rules)[0].is_zero)

    def test_bracket_is_antisymmetric(self):
        q2 = self.system.characteristic("Q2")
        q3 = self.system.characteristic("Q3")
        forward = reduce_expression(lie_bracket(q2, q3, self.system).expr, self.rules)[0]
        backward = reduce_expression(lie_bracket(q3, q2, self.system).expr, self.rules)[0]
        self.assertEqual(forward, -backward)


class TestLieDerivative(unittest.TestCase):
    """The Lie action of characteristics on scalar and matrix jets."""

    def setUp(self):
        self.kdv = Catalog().load_files(("kdv.def",))
        self.matrices = Catalog().load_files(("appendix.def",))
        self.sine_gordon = Catalog().load_files(("sine-gordon.def",))

    def test_prolonged_action(self):
        q = Characteristic("u", parse_expression("u^2", self.kdv), name="Q")
        result = lie_apply(q, parse_expression("u_x", self.kdv), self.kdv)
        self.assertEqual(result, parse_expression("2*u*u_x", self.kdv))

    def test_explicit_functions_are_constant(self):
        q = Characteristic("u", parse_expression("u_x", self.kdv))
        self.assertTrue(lie_apply(q, parse_expression("x*t + lam", self.kdv), self.kdv).is_zero)

    def test_matrix_leibniz_keeps_order(self):
        q = Characteristic("A", parse_expression("A_y", self.matrices))
        e = parse_expression("x*y*A_x*A_x", self.matrices)
        expected = parse_expression("x*y*(A_xy*A_x + A_x*A_xy)", self.matrices)
        self.assertEqual(lie_apply(q, e, self.matrices), expected)

    def test_inverse_rule(self):
        q = Characteristic("A", parse_expression("A_y", self.matrices))
        result = lie_apply(q, parse_expression("inv(A)", self.matrices), self.matrices)
        self.assertEqual(result, parse_expression("-inv(A)*A_y*inv(A)", self.matrices))

    def test_components_act_additively(self):
        q = Characteristic(
            "u",
            parse_expression("u_x", self.sine_gordon),
            extra=(("v", parse_expression("v_x", self.sine_gordon)),),
        )
        result = lie_apply(q, parse_expression("u*v", self.sine_gordon), self.sine_gordon)
        self.assertEqual(result, parse_expression("u_x*v + u*v_x", self.sine_gordon))

    def test_symbol_without_component(self):
        q = Characteristic("u", parse_expression("u_x", self.sine_gordon))
        with self.assertRaises(UndeclaredLieAction):
            lie_apply(q, parse_expression("v_t", self.sine_gordon), self.sine_gordon)


if __name__ == "__main__":
    unittest.main()
