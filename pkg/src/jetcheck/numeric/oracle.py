"""Independent numeric oracles: finite differences and the Ernst potential bridge."""

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

import mpmath
import sympy as sp

from my_logger import check_logger
from src.jetcheck.enums import NumericMode
from src.jetcheck.exceptions import NoConvergence
from src.jetcheck.expr.models import Expr
from src.jetcheck.jet.derivations import total_derivative
from src.jetcheck.numeric.evaluate import (
    ClosedFormBinding,
    evaluate,
    parse_closed_form,
    sample_residual,
)
from src.jetcheck.system.models import EquationSystem

DEFAULT_STEPS = (0.1, 0.05, 0.025, 0.0125)
EXACT_BELOW = 1e-12
MIN_ORDER = 1.8
SCALAR_DIGITS = 30


@dataclass(frozen=True)
class ConvergenceReport:
    """Agreement of a symbolic derivative with central differences.

    Parameters
    ----------
    symbolic : float
        Magnitude of the symbolic derivative at the point.
    errors : tuple of float
        Finite-difference error per step size.
    order : float or None
        Smallest observed order; None when the differences are exact.
    """

    symbolic: float
    errors: tuple[float, ...]
    order: float | None

    @property
    def exact(self) -> bool:
        return self.order is None


def finite_difference_cross_check(
    e: Expr,
    var: str,
    binding: ClosedFormBinding,
    system: EquationSystem,
    point: Mapping[str, float],
    steps: Sequence[float] = DEFAULT_STEPS,
) -> ConvergenceReport:
    """Compare ``D_var e`` on a closed form with central differences of ``e``.

    Parameters
    ----------
    e : Expr
        Expression in the bound symbols.
    var : str
        Differentiation variable.
    binding : ClosedFormBinding
        Closed forms, float mode.
    system : EquationSystem
        Ambient system.
    point : mapping of str to float
        Evaluation point.
    steps : sequence of float, optional
        Decreasing step sizes.

    Returns
    -------
    ConvergenceReport
        The errors and the observed order.

    Raises
    ------
    NoConvergence
        When the observed order stays below second order.
    """
    if binding.mode is not NumericMode.FLOAT:
        raise ValueError("Finite differences need a float-mode binding.")
    backend = binding.at(point).backend
    symbolic = evaluate(total_derivative(e, var, system), binding.at(point))
    errors = []
    for h in steps:
        ahead = dict(point, **{var: point[var] + h})
        behind = dict(point, **{var: point[var] - h})
        central = (evaluate(e, binding.at(ahead)) - evaluate(e, binding.at(behind))) / (2 * h)
        errors.append(backend.magnitude(central - symbolic))
    scale = max(1.0, backend.magnitude(symbolic))
    if max(errors) <= EXACT_BELOW * scale:
        return ConvergenceReport(backend.magnitude(symbolic), tuple(errors), None)
    orders = [
        math.log2(coarse / fine)
        for coarse, fine in zip(errors, errors[1:])
        if fine > EXACT_BELOW * scale
    ]
    order = min(orders) if orders else 2.0
    check_logger.debug(f"D_{var}: finite-difference errors {errors}, order {order:.2f}")
    if order < MIN_ORDER:
        raise NoConvergence(f"Observed order {order:.2f} for D_{var}; errors {errors}.")
    return ConvergenceReport(backend.magnitude(symbolic), tuple(errors), order)


@dataclass(frozen=True)
class ErnstBridgeResult:
    """Residuals of the matrix and scalar Ernst equations on one potential pair."""

    matrix_residual: float
    scalar_residual: float
    tolerance: float

    @property
    def consistent(self) -> bool:
        """Both residuals vanish, or neither does."""
        return (self.matrix_residual <= self.tolerance) == (self.scalar_residual <= self.tolerance)

    @property
    def solution(self) -> bool:
        return self.matrix_residual <= self.tolerance and self.scalar_residual <= self.tolerance


def ernst_matrix(f: sp.Expr, omega: sp.Expr) -> sp.Matrix:
    """Symmetric unimodular matrix ``(1/f) [[1, w], [w, f^2 + w^2]]`` of potentials."""
    return sp.Matrix([[1, omega], [omega, f**2 + omega**2]]) / f


def scalar_ernst_residual(f: sp.Expr, omega: sp.Expr, rho: sp.Symbol, z: sp.Symbol) -> sp.Expr:
    """``Re(E) (E_rr + E_r / r + E_zz) - (E_r^2 + E_z^2)`` with ``E = f + i w``."""
    e = f + sp.I * omega
    laplacian = sp.diff(e, rho, 2) + sp.diff(e, rho) / rho + sp.diff(e, z, 2)
    return f * laplacian - (sp.diff(e, rho) ** 2 + sp.diff(e, z) ** 2)


def ernst_bridge(
    system: EquationSystem,
    f_text: str,
    omega_text: str,
    points: Iterable[Mapping[str, float]],
    tolerance: float = 1e-9,
    matrix_symbol: str = "g",
) -> ErnstBridgeResult:
    """Evaluate the matrix Ernst equation and the scalar one on the same potentials.

    The scalar equation is evaluated through mpmath at ``SCALAR_DIGITS`` significant digits.

    Parameters
    ----------
    system : EquationSystem
        The matrix Ernst system; its primary equation is evaluated.
    f_text, omega_text : str
        Scalar potentials in the system's variables (``rho``, ``z``).
    points : iterable of mapping
        Sample points.
    tolerance : float, optional
        Vanishing threshold.
    matrix_symbol : str, optional
        Name of the matrix unknown.

    Returns
    -------
    ErnstBridgeResult
        Both residual maxima.
    """
    rho_name, z_name = system.variables
    f = parse_closed_form(f_text, system.variables)
    omega = parse_closed_form(omega_text, system.variables)
    binding = ClosedFormBinding(system.variables, {matrix_symbol: ernst_matrix(f, omega)})
    points = list(points)
    matrix_residual = sample_residual(system.primary_equation().expr, binding, points)
    rho, z = sp.Symbol(rho_name, real=True), sp.Symbol(z_name, real=True)
    scalar_at = sp.lambdify((rho, z), scalar_ernst_residual(f, omega, rho, z), modules="mpmath")
    with mpmath.workdps(SCALAR_DIGITS):
        scalar_residual = max(
            (float(abs(scalar_at(float(p[rho_name]), float(p[z_name])))) for p in points),
            default=0.0,
        )
    check_logger.debug(
        f"Ernst bridge: matrix {matrix_residual:.3e}, scalar {scalar_residual:.3e}"
    )
    return ErnstBridgeResult(matrix_residual, scalar_residual, tolerance)
