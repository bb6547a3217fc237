"""Capture-free substitution of symbols and parameters."""

from typing import Mapping

from src.jetcheck.enums import ExprClass
from src.jetcheck.exceptions import ClassMismatch, UnknownSymbol
from src.jetcheck.expr.models import Expr, JetSymbol, Parameter
from src.jetcheck.expr.normalize import replace_symbols
from src.jetcheck.jet.derivations import apply_index

BindingKey = str | JetSymbol


def _check_class(name: str, expected: ExprClass, replacement: Expr) -> None:
    if not replacement.is_zero and replacement.cls is not expected:
        raise ClassMismatch(
            f"'{name}' is {expected.value}-class but its replacement is "
            f"{replacement.cls.value}-class."
        )


def substitute(e: Expr, bindings: Mapping[BindingKey, Expr], known: set[str] | None = None) -> Expr:
    """Replace symbols and parameters, then normalize.

    A binding keyed by a name or by a jet coordinate also rewrites every
    derivative of it: ``u_xt`` under ``{u: r}`` becomes ``D_x D_t r``.

    Parameters
    ----------
    e : Expr
        Expression to rewrite.
    bindings : mapping
        Symbol name, parameter name or jet coordinate to replacement.
    known : set of str, optional
        Further names that may be bound without occurring in ``e``.

    Returns
    -------
    Expr
        The normalized result.
    """
    present = {s.name for s in e.symbols()} | e.parameters() | (known or set())
    by_name: dict[str, list[tuple[JetSymbol | None, Expr]]] = {}
    for key, replacement in bindings.items():
        name = key.name if isinstance(key, JetSymbol) else key
        if name not in present:
            raise UnknownSymbol(f"Cannot bind '{name}': no such symbol or parameter.")
        symbol = key if isinstance(key, JetSymbol) else None
        by_name.setdefault(name, []).append((symbol, replacement))

    def replace(atom: object) -> Expr | None:
        if isinstance(atom, Parameter):
            for _, replacement in by_name.get(atom.name, []):
                _check_class(atom.name, ExprClass.SCALAR, replacement)
                return replacement
            return None
        if not isinstance(atom, JetSymbol):
            return None
        for key, replacement in by_name.get(atom.name, []):
            if key is None:
                _check_class(atom.name, atom.cls, replacement)
                return apply_index(replacement, atom.index, atom.index.variables).as_class(atom.cls)
            if atom.index.dominates(key.index):
                _check_class(atom.name, atom.cls, replacement)
                extra = atom.index.minus(key.index)
                return apply_index(replacement, extra, atom.index.variables).as_class(atom.cls)
        return None

    return replace_symbols(e, replace)
