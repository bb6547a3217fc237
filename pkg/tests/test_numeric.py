"""Unit tests for the numeric oracles."""

import unittest
from fractions import Fraction

from src.jetcheck.catalog.index import Catalog
from src.jetcheck.enums import NumericMode
from src.jetcheck.exceptions import UnboundSymbol
from src.jetcheck.numeric.evaluate import (
    ClosedFormBinding,
    RandomJetValuation,
    max_abs,
    sample_points,
    sample_residual,
)
from src.jetcheck.numeric.matrix_identities import IDENTITIES, random_matrix_check
from src.jetcheck.numeric.oracle import ernst_bridge, finite_difference_cross_check
from src.jetcheck.parser.expressions import parse_expression

BOX = {"x": (-2.0, 2.0), "t": (-2.0, 2.0)}


class TestSamplePoints(unittest.TestCase):
    """Seeded sample points."""

    def test_same_seed_same_points(self):
        self.assertEqual(sample_points(BOX, 5, seed=3), sample_points(BOX, 5, seed=3))
        self.assertNotEqual(sample_points(BOX, 5, seed=3), sample_points(BOX, 5, seed=4))

    def test_points_inside_the_box(self):
        for point in sample_points(BOX, 50):
            self.assertTrue(all(-2.0 <= point[var] <= 2.0 for var in BOX))

    def test_exact_points_are_rational(self):
        for point in sample_points(BOX, 10, mode=NumericMode.EXACT):
            for value in point.values():
                self.assertIsInstance(value, Fraction)
                self.assertEqual(64 % value.denominator, 0)


class TestClosedForms(unittest.TestCase):
    """Residuals of equations on closed-form solutions."""

    def setUp(self):
        self.system = Catalog().load_files(("sine-gordon.def",))
        self.equation = self.system.equations["F"].expr
        self.points = sample_points(BOX, 20)

    def test_kink(self):
        binding = ClosedFormBinding.from_texts(
            self.system.variables, {"u": "4*atan(exp(a*x + t/a))"}, {"a": 1.0}
        )
        self.assertLess(sample_residual(self.equation, binding, self.points), 1e-10)

    def test_non_solution(self):
        binding = ClosedFormBinding.from_texts(self.system.variables, {"u": "sin(x + t)"})
        self.assertGreater(sample_residual(self.equation, binding, self.points), 0.1)

    def test_unbound_symbol(self):
        binding = ClosedFormBinding.from_texts(self.system.variables, {"u": "x*t"})
        with self.assertRaises(UnboundSymbol):
            sample_residual(self.system.equations["G"].expr, binding, self.points)

    def test_exact_mode(self):
        system = Catalog().load_files(("laplace.def",))
        binding = ClosedFormBinding.from_texts(
            system.variables,
            {"u": "(x**2 - y**2)/2 + 3", "v": "x*y"},
            mode=NumericMode.EXACT,
        )
        points = sample_points({"x": (-2, 2), "y": (-2, 2)}, 10, mode=NumericMode.EXACT)
        for relation in system.bts["CR"].relations:
            self.assertEqual(sample_residual(relation, binding, points), 0.0)

    def test_finite_differences_agree(self):
        e = parse_expression("3*x*t*u^2", self.system)
        binding = ClosedFormBinding.from_texts(self.system.variables, {"u": "sin(x + t)"})
        report = finite_difference_cross_check(
            e, "x", binding, self.system, {"x": 0.3, "t": 0.7}
        )
        self.assertFalse(report.exact)
        self.assertGreaterEqual(report.order, 1.8)
        self.assertLess(report.errors[-1], report.errors[0])


class TestMatrixIdentities(unittest.TestCase):
    """Random matrix jets."""

    def test_exact_samples(self):
        for identity in IDENTITIES:
            for size in (2, 3):
                worst = random_matrix_check(identity, size, trials=20, mode=NumericMode.EXACT)
                self.assertEqual(worst, 0.0, f"{identity}:{size}")

    def test_float_samples(self):
        for identity in IDENTITIES:
            self.assertLess(random_matrix_check(identity, 3, trials=50), 1e-6, identity)

    def test_invalid_requests(self):
        with self.assertRaises(KeyError):
            random_matrix_check("no-such-identity", 2)
        with self.assertRaises(ValueError):
            random_matrix_check("inverse-derivative", 1)


class TestSelfDualYangMills(unittest.TestCase):
    """The self-dual Yang-Mills residual on matrices that do and do not solve it."""

    def setUp(self):
        self.system = Catalog().load_files(("sdym.def",))
        self.equation = self.system.equations["F"].expr
        box = {var: (-0.5, 0.5) for var in self.system.variables}
        self.points = sample_points(box, 10, seed=7)

    def test_random_jets_are_not_solutions(self):
        for seed in range(5):
            valuation = RandomJetValuation(self.system, seed=seed)
            self.assertGreater(max_abs(self.equation, valuation), 0.1, seed)

    def test_closed_form_non_solution(self):
        binding = ClosedFormBinding.from_texts(
            self.system.variables, {"J": "Matrix([[1 + y*yb, z], [zb, 2 + y*z*zb]])"}
        )
        self.assertGreater(sample_residual(self.equation, binding, self.points), 0.1)

    def test_unbarred_matrix_solves_it(self):
        binding = ClosedFormBinding.from_texts(
            self.system.variables, {"J": "Matrix([[exp(y), z], [0, 1 + y**2]])"}
        )
        self.assertLess(sample_residual(self.equation, binding, self.points), 1e-12)


class TestErnstBridge(unittest.TestCase):
    """Matrix and scalar Ernst equations agree."""

    def setUp(self):
        self.system = Catalog().load_files(("ernst.def",))
        self.points = sample_points({"rho": (0.5, 1.5), "z": (-1.0, 1.0)}, 10)

    def test_solution(self):
        result = ernst_bridge(self.system, "exp(z**2 - rho**2/2)", "0", self.points)
        self.assertTrue(result.consistent)
        self.assertTrue(result.solution)

    def test_non_solution(self):
        result = ernst_bridge(self.system, "exp(z**2)", "z", self.points)
        self.assertTrue(result.consistent)
        self.assertFalse(result.solution)

    def test_scalar_equation_is_evaluated_beyond_double_precision(self):
        result = ernst_bridge(self.system, "exp(z**2 - rho**2/2)", "0", self.points)
        self.assertLess(result.scalar_residual, 1e-20)


if __name__ == "__main__":
    unittest.main()
