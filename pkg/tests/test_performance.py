"""Simple performance tests for catalog suites and reductions."""

import timeit
import unittest

from my_logger import check_logger
from src.jetcheck.catalog.index import Catalog
from src.jetcheck.catalog.suite import run_suite
from src.jetcheck.parser.expressions import parse_expression
from src.jetcheck.reduction.reduce import reduce_mod


class TestSuitePerformance(unittest.TestCase):
    """Performance tests for the bundled catalog."""

    def setUp(self) -> None:
        self.catalog = Catalog()
        self.system = self.catalog.system("kdv")
        self.rules = self.catalog.rules("kdv")

    def test_reduction_performance(self):
        """Test performance of reducing a high prolongation of KdV."""
        expr = parse_expression("D[F; x, x, x, t]", self.system)

        def reduce_prolongation() -> None:
            """Reduce the prolongation modulo KdV."""
            reduce_mod(expr, self.rules)

        duration = timeit.timeit(reduce_prolongation, number=10)
        check_logger.info(f"Reducing D[F; x, x, x, t] ten times took {duration:.4f} seconds.")

        self.assertLess(duration, 5.0, "Reduction took too long.")

    def test_full_suite_performance(self):
        """Test performance of running every catalog entry."""
        reports = []

        def run_all() -> None:
            """Run the whole catalog on two workers."""
            reports.extend(run_suite("all", catalog=self.catalog, workers=2))

        duration = timeit.timeit(run_all, number=1)
        check_logger.info(f"Running {len(reports)} catalog checks took {duration:.4f} seconds.")

        self.assertLess(duration, 60.0, "The catalog suite took too long.")
        self.assertTrue(all(r.is_zero for r in reports))
