"""Unit tests for span solving and structure constants."""

import unittest
from fractions import Fraction

from src.jetcheck.algebra.linear import span_solve
from src.jetcheck.algebra.structure import (
    bracket_coefficients,
    jacobi_violations,
    structure_constants,
)
from src.jetcheck.catalog.index import Catalog
from src.jetcheck.exceptions import NotClosed, NotInSpan, RankDeficientBasis
from src.jetcheck.parser.expressions import parse_expression
from src.jetcheck.reduction.rules import orient


def _fractions(*values) -> tuple[Fraction, ...]:
    return tuple(Fraction(v) for v in values)


class TestSpanSolve(unittest.TestCase):
    """Rational coefficients of a target in a basis."""

    def setUp(self):
        self.system = Catalog().load_files(("heat.def",))

    def parse(self, text: str):
        return parse_expression(text, self.system)

    def test_combination(self):
        basis = [self.parse("u_x"), self.parse("x*u + u_t")]
        target = self.parse("2*u_x - 1/2*x*u - 1/2*u_t")
        self.assertEqual(span_solve(target, basis), _fractions(2, Fraction(-1, 2)))

    def test_zero_target(self):
        basis = [self.parse("u_x"), self.parse("u_t")]
        self.assertEqual(span_solve(self.parse("0"), basis), _fractions(0, 0))

    def test_outside_span(self):
        with self.assertRaises(NotInSpan):
            span_solve(self.parse("u_xx"), [self.parse("u_x"), self.parse("u_t")])

    def test_dependent_basis(self):
        basis = [self.parse("u_x"), self.parse("2*u_x")]
        with self.assertRaises(RankDeficientBasis):
            span_solve(self.parse("u_x"), basis)
        c = span_solve(self.parse("u_x"), basis, allow_dependent=True)
        self.assertEqual(c, _fractions(1, 0))

    def test_vector_targets(self):
        target = (self.parse("u"), self.parse("3*u_x"))
        basis = [(self.parse("u"), self.parse("u_x")), (self.parse("0"), self.parse("u_x"))]
        self.assertEqual(span_solve(target, basis), _fractions(1, 2))


class TestStructureConstants(unittest.TestCase):
    """The four-dimensional point symmetry algebra of KdV."""

    def setUp(self):
        self.system = Catalog().load_files(("kdv-symmetry.def", "kdv-basis.def"))
        self.rules = orient(self.system)
        self.basis = [self.system.characteristic(f"Q{i}") for i in range(1, 5)]

    def test_bracket_coefficients(self):
        q = self.basis
        c = bracket_coefficients(q[1], q[2], q, self.system, self.rules)
        self.assertEqual(c, _fractions(-1, 0, 0, 0))
        c = bracket_coefficients(q[2], q[3], q, self.system, self.rules)
        self.assertEqual(c, _fractions(0, 0, 2, 0))

    def test_table(self):
        constants = structure_constants(self.basis, self.system, self.rules)
        self.assertEqual(constants[(1, 2)], _fractions(0, 0, 0, 0))
        self.assertEqual(constants[(1, 4)], _fractions(-1, 0, 0, 0))
        self.assertEqual(constants[(2, 4)], _fractions(0, -3, 0, 0))
        self.assertEqual(constants[(4, 2)], _fractions(0, 3, 0, 0))
        self.assertEqual(constants[(3, 3)], _fractions(0, 0, 0, 0))
        self.assertEqual(jacobi_violations(constants, 4), [])

    def test_subset_not_closed(self):
        with self.assertRaises(NotClosed):
            structure_constants(self.basis[1:3], self.system, self.rules)


if __name__ == "__main__":
    unittest.main()
