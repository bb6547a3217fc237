"""Runnable walkthrough pages.

A page is markdown. Fenced blocks tagged ``console`` hold invocations:

    $ jetcheck symmetry --system kdv.def --char "u_x"
    symmetry/u_x  zero  0
    # exit 0

Lines after a ``$ jetcheck`` line are expected output, compared in order after
whitespace normalization; a ``# exit N`` line gives the expected exit code
(default 0).
"""

import re
import shlex
from dataclasses import dataclass
from pathlib import Path

from click.testing import CliRunner

from my_logger import check_logger
from src.jetcheck.cli.app import cli
from src.jetcheck.exceptions import DocDrift

FENCE_RE = re.compile(r"^```(\w*)\s*$")
EXIT_RE = re.compile(r"^#\s*exit\s+(\d+)\s*$")
PROMPT = "$ jetcheck"


@dataclass(frozen=True)
class CommandInvocation:
    """One documented command.

    Parameters
    ----------
    argv : tuple of str
        Arguments after ``jetcheck``.
    expected : tuple of str
        Expected output lines, whitespace-normalized.
    exit_code : int
        Expected exit code.
    line : int
        1-based page line of the command.
    """

    argv: tuple[str, ...]
    expected: tuple[str, ...]
    exit_code: int
    line: int

    @property
    def command(self) -> str:
        return f"jetcheck {shlex.join(self.argv)}"


def _normalized(line: str) -> str:
    return " ".join(line.split())


def doctest_extract(page: str) -> list[CommandInvocation]:
    """Return the invocations of the ``console`` blocks of a page.

    Parameters
    ----------
    page : str
        Markdown text.

    Returns
    -------
    list of CommandInvocation
        In page order; empty for a page without runnable blocks.
    """
    invocations: list[CommandInvocation] = []
    in_block = False
    current: dict | None = None

    def close() -> None:
        if current is not None:
            invocations.append(
                CommandInvocation(
                    tuple(current["argv"]),
                    tuple(current["expected"]),
                    current["exit"],
                    current["line"],
                )
            )

    for number, raw in enumerate(page.splitlines(), start=1):
        fence = FENCE_RE.match(raw.strip())
        if fence:
            if in_block:
                close()
                current = None
            in_block = not in_block and fence.group(1) == "console"
            continue
        if not in_block:
            continue
        line = raw.strip()
        if line.startswith(PROMPT):
            close()
            current = {
                "argv": shlex.split(line[len(PROMPT) :]),
                "expected": [],
                "exit": 0,
                "line": number,
            }
        elif current is not None and (match := EXIT_RE.match(line)):
            current["exit"] = int(match.group(1))
        elif current is not None and line:
            current["expected"].append(_normalized(line))
    close()
    return invocations


def check_invocation(invocation: CommandInvocation, runner: CliRunner | None = None) -> str:
    """Run one invocation and return its output.

    Raises
    ------
    DocDrift
        When the exit code differs or an expected line is missing.
    """
    runner = runner or CliRunner()
    result = runner.invoke(cli, list(invocation.argv))
    if result.exit_code != invocation.exit_code:
        raise DocDrift(
            f"line {invocation.line}: `{invocation.command}` exited {result.exit_code}, "
            f"expected {invocation.exit_code}\n{result.output}"
        )
    remaining = iter(_normalized(line) for line in result.output.splitlines())
    for expected in invocation.expected:
        if not any(line == expected for line in remaining):
            raise DocDrift(
                f"line {invocation.line}: `{invocation.command}` did not print {expected!r}\n"
                f"{result.output}"
            )
    return result.output


def run_page(path: Path) -> int:
    """Run every invocation of a page; return how many ran.

    Raises
    ------
    DocDrift
        On the first invocation that no longer matches the page.
    """
    invocations = doctest_extract(Path(path).read_text(encoding="utf-8"))
    runner = CliRunner()
    for invocation in invocations:
        check_logger.debug(f"{Path(path).name}:{invocation.line}: {invocation.command}")
        check_invocation(invocation, runner)
    return len(invocations)
