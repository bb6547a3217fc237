"""Variational derivative in one spatial variable."""

from src.jetcheck.enums import ExprClass
from src.jetcheck.exceptions import MatrixClassUnsupported
from src.jetcheck.expr.models import Expr
from src.jetcheck.jet.derivations import PartialDerivative, total_derivative
from src.jetcheck.system.models import DependentSymbol, EquationSystem


def euler_test(p: Expr, u: DependentSymbol, v: str, system: EquationSystem) -> Expr:
    """Return ``E_u(P) = sum_k (-D_v)^k dP/du_{v^k}``.

    ``P`` is a total ``v``-derivative exactly when the result vanishes.

    Parameters
    ----------
    p : Expr
        Scalar expression in ``u`` and its ``v``-derivatives.
    u : DependentSymbol
        The dependent symbol.
    v : str
        The differentiation variable.
    system : EquationSystem
        Ambient system.

    Returns
    -------
    Expr
        The variational derivative, normalized.
    """
    if p.cls is ExprClass.MATRIX and not p.is_zero:
        raise MatrixClassUnsupported("The Euler operator is defined for scalar expressions only.")
    if u.cls is ExprClass.MATRIX:
        raise MatrixClassUnsupported(f"'{u.name}' is matrix-class.")
    order = 0
    for s in p.symbols():
        if s.name != u.name:
            continue
        if s.index.order != s.index.count(v):
            raise ValueError(f"'{s.text()}' involves variables other than '{v}'.")
        order = max(order, s.index.order)
    result = Expr.zero()
    for k in range(order, -1, -1):
        # Horner form
        coordinate = u.jet(u.jet().index.bump(v, k))
        result = PartialDerivative(coordinate).apply(p) - total_derivative(result, v, system)
    return result
