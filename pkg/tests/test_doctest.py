"""Unit tests for runnable walkthrough pages."""

import tempfile
import unittest
from pathlib import Path

from src.jetcheck.catalog.index import Catalog
from src.jetcheck.docs.doctest import check_invocation, doctest_extract, run_page
from src.jetcheck.exceptions import DocDrift

PAGE = """\
# Example

```console
$ jetcheck symmetry --system sine-gordon.def --char "u_x"
symmetry/u_x    zero   0
# exit 0
$ jetcheck catalog run toda
# exit 2
```

```text
$ jetcheck catalog run kdv
```
"""


class TestExtraction(unittest.TestCase):
    """Reading invocations from markdown."""

    def test_empty_page(self):
        self.assertEqual(doctest_extract(""), [])
        self.assertEqual(doctest_extract("# Title\n\nNo commands here.\n"), [])

    def test_console_blocks_only(self):
        invocations = doctest_extract(PAGE)
        self.assertEqual(len(invocations), 2)
        first, second = invocations
        self.assertEqual(first.argv, ("symmetry", "--system", "sine-gordon.def", "--char", "u_x"))
        self.assertEqual(first.expected, ("symmetry/u_x zero 0",))
        self.assertEqual(first.exit_code, 0)
        self.assertEqual(first.line, 4)
        self.assertEqual(second.exit_code, 2)
        self.assertEqual(second.expected, ())

    def test_command_text(self):
        (invocation,) = doctest_extract(PAGE)[:1]
        self.assertEqual(
            invocation.command, "jetcheck symmetry --system sine-gordon.def --char u_x"
        )


class TestDrift(unittest.TestCase):
    """Pages that no longer match the program."""

    def setUp(self):
        self.directory = Path(tempfile.mkdtemp())

    def write_page(self, text: str) -> Path:
        path = self.directory / "page.md"
        path.write_text(text, encoding="utf-8")
        return path

    def test_matching_page(self):
        self.assertEqual(run_page(self.write_page(PAGE)), 2)

    def test_stale_output(self):
        (invocation,) = doctest_extract(PAGE.replace("zero   0", "residual   u_x"))[:1]
        with self.assertRaises(DocDrift):
            check_invocation(invocation)

    def test_stale_exit_code(self):
        with self.assertRaises(DocDrift):
            run_page(self.write_page(PAGE.replace("# exit 2", "# exit 0")))


class TestBundledPages(unittest.TestCase):
    """Every walkthrough page of the catalog runs as written."""

    def test_sine_gordon_page(self):
        self.assertEqual(run_page(Catalog().page_path("sine-gordon")), 7)

    def test_all_pages(self):
        catalog = Catalog()
        for name in catalog.names():
            if name == "sine-gordon":
                continue
            with self.subTest(entry=name):
                self.assertGreater(run_page(catalog.page_path(name)), 0)


if __name__ == "__main__":
    unittest.main()
