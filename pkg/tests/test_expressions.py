"""Unit tests for expression parsing, normal forms and rendering."""

import unittest

from src.jetcheck.catalog.index import Catalog
from src.jetcheck.enums import ExprClass
from src.jetcheck.exceptions import (
    ExpressionSyntaxError,
    NotPolynomialInParameter,
    UndeclaredSymbol,
    UnknownSymbol,
)
from src.jetcheck.expr.models import Expr
from src.jetcheck.expr.normalize import coefficients_in, from_coefficients, normalize
from src.jetcheck.expr.substitute import substitute
from src.jetcheck.parser.expressions import parse_expression
from src.jetcheck.parser.render import render
from src.jetcheck.reduction.reduce import reduce_mod
from src.jetcheck.reduction.rules import orient


class TestScalarExpressions(unittest.TestCase):
    """Scalar expressions on the sine-Gordon system."""

    def setUp(self):
        self.system = Catalog().load_files(("sine-gordon.def",))

    def parse(self, text: str) -> Expr:
        return parse_expression(text, self.system)

    def test_sum_order_does_not_matter(self):
        self.assertEqual(self.parse("u_x + u"), self.parse("u + u_x"))

    def test_like_terms_cancel(self):
        self.assertTrue(self.parse("u_x*u - u*u_x").is_zero)
        self.assertEqual(render(self.parse("u - u")), "0")

    def test_rational_coefficients_are_exact(self):
        self.assertEqual(self.parse("1/2*u + 1/2*u"), self.parse("u"))
        self.assertEqual(self.parse("u/3 + u/6"), self.parse("1/2*u"))

    def test_mixed_derivatives_commute(self):
        self.assertEqual(self.parse("u_xt"), self.parse("u_tx"))

    def test_total_derivative_operator(self):
        self.assertEqual(self.parse("D[u^2; x]"), self.parse("2*u*u_x"))
        self.assertEqual(self.parse("D[sin(u); t]"), self.parse("cos(u)*u_t"))
        self.assertEqual(self.parse("D[x*u; x]"), self.parse("u + x*u_x"))

    def test_equation_name_stands_for_its_expression(self):
        self.assertEqual(self.parse("F"), self.parse("u_xt - sin(u)"))

    def test_rendered_text_parses_back(self):
        for text in (
            "u_xt - sin(u)",
            "1/4*u_x^4 - u_xx^2",
            "x*u_x - t*u_t",
            "a*sin(1/2*u - 1/2*v)",
        ):
            e = self.parse(text)
            self.assertEqual(self.parse(render(e)), e, text)

    def test_scalar_class(self):
        self.assertIs(self.parse("u_x*cos(u)").cls, ExprClass.SCALAR)

    def test_incomplete_expression(self):
        with self.assertRaises(ExpressionSyntaxError):
            self.parse("u_x +")

    def test_division_by_zero(self):
        with self.assertRaises(ExpressionSyntaxError):
            self.parse("u/0")

    def test_undeclared_symbol_carries_its_span(self):
        with self.assertRaises(UndeclaredSymbol) as caught:
            self.parse("w + u")
        self.assertIsNotNone(caught.exception.span)
        self.assertEqual(caught.exception.span.start, 0)


class TestCoreOperations(unittest.TestCase):
    """Normalization, substitution and parameter coefficients."""

    def setUp(self):
        self.sine_gordon = Catalog().load_files(("sine-gordon.def",))
        self.kdv = Catalog().load_files(("kdv.def",))

    def test_normalize_is_idempotent(self):
        for text in ("2*u*3*u", "sin(u)*cos(u) - u_xt", "exp(u)*exp(-u) + a^2"):
            e = parse_expression(text, self.sine_gordon)
            self.assertEqual(normalize(normalize(e)), normalize(e), text)
        product = parse_expression("2*u*3*u", self.sine_gordon)
        self.assertEqual(product, parse_expression("6*u^2", self.sine_gordon))

    def test_substitute_differentiates_the_replacement(self):
        e = parse_expression("u_x", self.sine_gordon)
        result = substitute(e, {"u": parse_expression("x*t", self.sine_gordon)})
        self.assertEqual(result, parse_expression("t", self.sine_gordon))

    def test_substitute_variation(self):
        e = parse_expression("u^2", self.sine_gordon)
        shifted = substitute(e, {"u": parse_expression("u + v", self.sine_gordon)})
        rest = shifted - parse_expression("u^2 + 2*u*v", self.sine_gordon)
        self.assertEqual(rest, parse_expression("v^2", self.sine_gordon))

    def test_substitute_unknown_name(self):
        with self.assertRaises(UnknownSymbol):
            substitute(parse_expression("u", self.sine_gordon), {"w": Expr.constant(1)})

    def test_coefficients_in_parameter(self):
        e = parse_expression("lam*u_x + lam^2*u + u_t", self.kdv)
        self.assertEqual(
            coefficients_in(e, "lam"),
            {
                0: parse_expression("u_t", self.kdv),
                1: parse_expression("u_x", self.kdv),
                2: parse_expression("u", self.kdv),
            },
        )
        self.assertEqual(from_coefficients(coefficients_in(e, "lam"), "lam"), e)

    def test_coefficients_of_a_distributed_product(self):
        e = parse_expression("(1 - lam)*u_x", self.kdv)
        u_x = parse_expression("u_x", self.kdv)
        self.assertEqual(coefficients_in(e, "lam"), {0: u_x, 1: -u_x})

    def test_parameter_inside_a_function(self):
        with self.assertRaises(NotPolynomialInParameter):
            coefficients_in(parse_expression("sin(lam*u)", self.kdv), "lam")


class TestMatrixExpressions(unittest.TestCase):
    """Noncommutative expressions on the matrix calculus system."""

    def setUp(self):
        self.system = Catalog().load_files(("appendix.def",))
        self.rules = orient(self.system)

    def parse(self, text: str) -> Expr:
        return parse_expression(text, self.system)

    def test_products_do_not_commute(self):
        self.assertFalse(self.parse("A*B - B*A").is_zero)
        self.assertIs(self.parse("A*B").cls, ExprClass.MATRIX)

    def test_commutator(self):
        self.assertEqual(self.parse("comm(A, B)"), self.parse("A*B - B*A"))
        self.assertEqual(self.parse("comm(A, B)"), -self.parse("comm(B, A)"))

    def test_inverse_cancels(self):
        self.assertEqual(self.parse("inv(A)*A"), self.parse("Id"))
        self.assertEqual(self.parse("A*inv(A)*B"), self.parse("B"))

    def test_derivative_of_inverse(self):
        report = reduce_mod(self.parse("D[inv(A); x] + inv(A)*A_x*inv(A)"), self.rules)
        self.assertTrue(report.is_zero)

    def test_product_rule_keeps_order(self):
        report = reduce_mod(self.parse("D[A*B; y] - A_y*B - A*B_y"), self.rules)
        self.assertTrue(report.is_zero)
        report = reduce_mod(self.parse("D[A*B; y] - B*A_y - A*B_y"), self.rules)
        self.assertFalse(report.is_zero)


if __name__ == "__main__":
    unittest.main()
