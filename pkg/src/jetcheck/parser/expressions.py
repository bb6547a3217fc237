"""Pratt parser for the expression grammar.

Binding powers: ``+``/``-`` 10, ``*``/``/`` 20, prefix ``-`` 25, ``^`` 30.
Names resolve, in order, to reserved operators, local formal symbols, the
system's dependent symbols, parameters, independent variables, macros and
equation names.
"""

from src.jetcheck.exceptions import ExpressionSyntaxError, UndeclaredSymbol
from src.jetcheck.expr.models import Expr, IndependentVar, MultiIndex, Parameter
from src.jetcheck.expr.normalize import (
    apply_function,
    commutator,
    divide,
    inverse,
    power,
    trace,
    transpose,
)
from src.jetcheck.expr.substitute import substitute
from src.jetcheck.jet.derivations import apply_index
from src.jetcheck.parser.lexer import RESERVED, Token, split_suffix, tokenize
from src.jetcheck.system.models import DependentSymbol, EquationSystem

FUNCTIONS = ("sin", "cos", "exp", "ln", "arctan", "sqrt")
BINDING_POWER = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 30}
PREFIX_MINUS_POWER = 25


class ExpressionParser:
    """Parser bound to one system and an optional set of local symbols.

    Parameters
    ----------
    text : str
        Expression source.
    system : EquationSystem
        Declarations used for name resolution.
    local : dict of str to DependentSymbol, optional
        Formal symbols visible only in this expression (macro parameters).
    """

    def __init__(
        self,
        text: str,
        system: EquationSystem,
        local: dict[str, DependentSymbol] | None = None,
    ) -> None:
        self.text = text
        self.system = system
        self.local = local or {}
        self.tokens = tokenize(text)
        self.pos = 0

    # token stream

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        if token.kind != "end":
            self.pos += 1
        return token

    def expect(self, text: str) -> Token:
        token = self.advance()
        if token.text != text:
            found = repr(token.text) if token.kind != "end" else "end of input"
            raise ExpressionSyntaxError(f"Expected '{text}' but found {found}", token.span)
        return token

    # grammar

    def parse(self) -> Expr:
        """Parse the whole text."""
        result = self.expression()
        token = self.peek()
        if token.kind != "end":
            raise ExpressionSyntaxError(f"Unexpected {token.text!r}", token.span)
        return result

    def expression(self, rbp: int = 0) -> Expr:
        left = self.nud(self.advance())
        while rbp < self._lbp(self.peek()):
            left = self.led(self.advance(), left)
        return left

    def _lbp(self, token: Token) -> int:
        if token.kind != "op":
            return 0
        return BINDING_POWER.get(token.text, 0)

    def led(self, token: Token, left: Expr) -> Expr:
        if token.text == "+":
            return left + self.expression(10)
        if token.text == "-":
            return left - self.expression(10)
        if token.text == "*":
            return left * self.expression(20)
        if token.text == "/":
            right = self.expression(20)
            if right.is_zero:
                raise ExpressionSyntaxError("Division by zero", token.span)
            return divide(left, right)
        if token.text == "^":
            negative = False
            if self.peek().text == "-":
                self.advance()
                negative = True
            exponent = self.advance()
            if exponent.kind != "int":
                raise ExpressionSyntaxError("Exponent must be an integer", exponent.span)
            k = int(exponent.text)
            return power(left, -k if negative else k)
        raise ExpressionSyntaxError(f"Unexpected {token.text!r}", token.span)

    def nud(self, token: Token) -> Expr:
        if token.kind == "int":
            return Expr.constant(int(token.text))
        if token.kind == "op":
            if token.text == "-":
                return -self.expression(PREFIX_MINUS_POWER)
            if token.text == "(":
                inner = self.expression()
                self.expect(")")
                return inner
        if token.kind == "end":
            raise ExpressionSyntaxError("Unexpected end of input", token.span)
        if token.kind in ("name", "family"):
            return self.name(token)
        raise ExpressionSyntaxError(f"Unexpected {token.text!r}", token.span)

    # names

    def _suffix(self) -> Token | None:
        if self.peek().kind == "suffix":
            return self.advance()
        return None

    def _call_args(self, count: int) -> list[Expr]:
        self.expect("(")
        args = [self.expression()]
        while len(args) < count:
            self.expect(",")
            args.append(self.expression())
        self.expect(")")
        return args

    def name(self, token: Token) -> Expr:
        text = token.text
        if text in RESERVED:
            return self.reserved(token)
        symbol = self._dependent(text)
        if symbol is not None:
            suffix = self._suffix()
            index = MultiIndex.zero(self.system.variables)
            if suffix is not None:
                for var in split_suffix(suffix.text[1:], self.system.variables, suffix.span):
                    index = index.bump(var)
            return Expr.symbol(symbol.jet(index))
        suffix = self._suffix()
        if suffix is not None:
            raise UndeclaredSymbol(
                f"'{text}' is not a dependent symbol and cannot carry a derivative suffix",
                token.span,
            )
        if text in self.system.parameters:
            return Expr.atom(Parameter(text))
        if text in self.system.variables:
            return Expr.atom(IndependentVar(text))
        if text in self.system.macros:
            macro = self.system.macros[text]
            args = self._call_args(len(macro.params))
            bindings = {}
            for param, arg in zip(macro.params, args):
                if not arg.is_zero and arg.cls is not param.cls:
                    raise ExpressionSyntaxError(
                        f"Argument of {text} must be {param.cls.value}-class", token.span
                    )
                bindings[param.name] = arg
            return substitute(macro.body, bindings, known={p.name for p in macro.params})
        if text in self.system.equations:
            return self.system.equations[text].expr
        raise UndeclaredSymbol(f"Undeclared symbol '{text}'", token.span)

    def _dependent(self, text: str) -> DependentSymbol | None:
        if text in self.local:
            return self.local[text]
        if self.system.has_symbol(text):
            return self.system.symbol(text)
        return None

    def reserved(self, token: Token) -> Expr:
        text = token.text
        if text == "Id":
            return Expr.identity()
        if text in FUNCTIONS:
            (arg,) = self._call_args(1)
            return apply_function(text, arg)
        if text == "inv":
            (arg,) = self._call_args(1)
            return inverse(arg)
        if text == "tr":
            (arg,) = self._call_args(1)
            return trace(arg)
        if text == "tp":
            (arg,) = self._call_args(1)
            return transpose(arg)
        if text == "comm":
            first, second = self._call_args(2)
            return commutator(first, second)
        return self.derivative(token)

    def derivative(self, token: Token) -> Expr:
        """Parse ``D[expr; x, y]`` (a comma may replace the semicolon)."""
        self.expect("[")
        body = self.expression()
        separator = self.advance()
        if separator.text not in (";", ","):
            raise ExpressionSyntaxError("Expected ';' after the D[...] body", separator.span)
        index = MultiIndex.zero(self.system.variables)
        while True:
            var = self.advance()
            if var.kind != "name" or var.text not in self.system.variables:
                raise UndeclaredSymbol(f"'{var.text}' is not an independent variable", var.span)
            index = index.bump(var.text)
            closing = self.advance()
            if closing.text == "]":
                break
            if closing.text != ",":
                raise ExpressionSyntaxError("Expected ',' or ']' in D[...]", closing.span)
        return apply_index(body, index, self.system.variables)


def parse_expression(
    text: str,
    system: EquationSystem,
    local: dict[str, DependentSymbol] | None = None,
) -> Expr:
    """Parse an expression against a system's declarations.

    Parameters
    ----------
    text : str
        Source such as ``"u_xt - sin(u)"``.
    system : EquationSystem
        Declared variables, symbols, parameters, macros and equations.
    local : dict of str to DependentSymbol, optional
        Extra formal symbols.

    Returns
    -------
    Expr
        The normal form.
    """
    return ExpressionParser(text, system, local).parse()

