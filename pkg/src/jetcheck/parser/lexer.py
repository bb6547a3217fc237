"""Tokenizer for the expression grammar."""

import re
from dataclasses import dataclass

from src.jetcheck.exceptions import ExpressionSyntaxError, SourceSpan

TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<family>[A-Za-z][A-Za-z0-9]*\[-?\d+\])
  | (?P<name>[A-Za-z][A-Za-z0-9]*)
  | (?P<suffix>_[A-Za-z]+)
  | (?P<int>\d+)
  | (?P<op>[-+*/^()\[\],;])
    """,
    re.VERBOSE,
)

RESERVED = frozenset(
    {"sin", "cos", "exp", "ln", "arctan", "sqrt", "inv", "tr", "tp", "comm", "D", "Id"}
)


@dataclass(frozen=True)
class Token:
    """One lexical token with its character span."""

    kind: str
    text: str
    start: int
    end: int

    @property
    def span(self) -> SourceSpan:
        return SourceSpan(self.start, self.end)


def tokenize(text: str) -> list[Token]:
    """Split ``text`` into tokens; derivative suffixes are kept as separate tokens.

    Parameters
    ----------
    text : str
        Expression source.

    Returns
    -------
    list of Token
        Tokens without whitespace, ending with an ``end`` token.
    """
    tokens: list[Token] = []
    pos = 0
    while pos < len(text):
        match = TOKEN_RE.match(text, pos)
        if match is None:
            raise ExpressionSyntaxError(
                f"Unexpected character {text[pos]!r}", SourceSpan(pos, pos + 1)
            )
        kind = match.lastgroup or ""
        if kind == "suffix":
            prev = tokens[-1] if tokens else None
            if prev is None or prev.kind not in ("name", "family") or prev.end != pos:
                raise ExpressionSyntaxError(
                    "A derivative suffix must follow a symbol name directly",
                    SourceSpan(pos, match.end()),
                )
        if kind != "ws":
            tokens.append(Token(kind, match.group(), pos, match.end()))
        pos = match.end()
    tokens.append(Token("end", "", len(text), len(text)))
    return tokens


def split_suffix(suffix: str, variables: tuple[str, ...], span: SourceSpan) -> list[str]:
    """Split a suffix such as ``yyb`` into variables by greedy longest match.

    Parameters
    ----------
    suffix : str
        Letters after the underscore.
    variables : tuple of str
        Declared independent variables.
    span : SourceSpan
        Location used in errors.

    Returns
    -------
    list of str
        The variables in order of appearance.
    """
    by_length = sorted(variables, key=len, reverse=True)
    steps: list[str] = []
    pos = 0
    while pos < len(suffix):
        for var in by_length:
            if suffix.startswith(var, pos):
                steps.append(var)
                pos += len(var)
                break
        else:
            raise ExpressionSyntaxError(
                f"Cannot read derivative suffix '_{suffix}' over variables {', '.join(variables)}",
                span,
            )
    return steps
