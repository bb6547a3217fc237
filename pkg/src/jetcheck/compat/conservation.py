"""Conservation laws: divergence checks and triviality classification."""

from dataclasses import dataclass
from fractions import Fraction

from my_logger import check_logger
from src.jetcheck.algebra.euler import euler_test
from src.jetcheck.algebra.linear import span_solve
from src.jetcheck.enums import ExprClass, Triviality
from src.jetcheck.exceptions import NotInSpan, Type4Unsupported
from src.jetcheck.expr.models import Expr
from src.jetcheck.jet.derivations import Rewrite, total_derivative
from src.jetcheck.reduction.reduce import reduce_expression, reduce_mod
from src.jetcheck.reduction.rules import RuleSet, orient
from src.jetcheck.system.models import CheckReport, ConservationLaw, EquationSystem


@dataclass(frozen=True)
class TrivialityResult:
    """Classification of a conservation law, with Type3 coefficients when found."""

    kind: Triviality
    coefficients: tuple[Fraction, ...] = ()

    def __str__(self) -> str:
        if self.kind is Triviality.TYPE3:
            return f"{self.kind.value}({', '.join(str(c) for c in self.coefficients)})"
        return self.kind.value


def divergence(
    law: ConservationLaw, system: EquationSystem, rewrite: Rewrite | None = None
) -> Expr:
    """Return ``sum_v D_v(component_v)``, with ``rewrite`` applied to produced jet symbols."""
    total = Expr.zero(law.density.cls)
    for var, component in law.components:
        total = total + total_derivative(component, var, system, rewrite)
    return total


def conservation_check(
    law: ConservationLaw,
    system: EquationSystem,
    rules: RuleSet | None = None,
    check_id: str | None = None,
) -> CheckReport:
    """Reduce the divergence of a law modulo the system.

    Parameters
    ----------
    law : ConservationLaw
        Density and fluxes.
    system : EquationSystem
        Ambient system, potential rules included.
    rules : RuleSet or None, optional
        Oriented rules; built from ``system`` when omitted.
    check_id : str or None, optional
        Report id.

    Returns
    -------
    CheckReport
        Zero when the divergence vanishes on solutions.
    """
    rules = rules if rules is not None else orient(system)
    flux = divergence(law, system, rules.potential_rewrite)
    return reduce_mod(flux, rules, check_id or f"conservation/{law.name}")


def _vector(law: ConservationLaw, variables: list[str], rules: RuleSet) -> list[Expr]:
    vector = []
    for var in variables:
        component = law.component(var)
        if component is None:
            vector.append(Expr.zero(law.density.cls))
            continue
        vector.append(reduce_expression(component, rules)[0])
    return vector


def _differentiated(law: ConservationLaw, var: str, system: EquationSystem) -> ConservationLaw:
    return ConservationLaw(
        f"D_{var}({law.name})",
        tuple((v, total_derivative(c, var, system)) for v, c in law.components),
    )


def triviality_classify(
    law: ConservationLaw,
    system: EquationSystem,
    known: list[ConservationLaw] | tuple[ConservationLaw, ...] = (),
    rules: RuleSet | None = None,
) -> TrivialityResult:
    """Classify a conservation law by the first triviality test it meets.

    Parameters
    ----------
    law : ConservationLaw
        Law to classify.
    system : EquationSystem
        Ambient system.
    known : sequence of ConservationLaw, optional
        Laws already known; the law and its spatial derivatives are tested for
        membership in their rational span.
    rules : RuleSet or None, optional
        Oriented rules; built from ``system`` when omitted.

    Returns
    -------
    TrivialityResult
        Type1 (components vanish on solutions), Type2 (the divergence vanishes
        identically), Type3 (combination of known laws), Type4 (the density is
        a total derivative) or NontrivialSoFar.
    """
    rules = rules if rules is not None else orient(system)
    variables = [var for var, _ in law.components]
    reduced = _vector(law, variables, rules)
    if all(c.is_zero for c in reduced):
        return TrivialityResult(Triviality.TYPE1)
    if divergence(law, system).is_zero:
        return TrivialityResult(Triviality.TYPE2)
    space = [v for v in variables if v != law.density_var]
    if known:
        basis = []
        for other in known:
            basis.append(_vector(other, variables, rules))
            for var in space:
                basis.append(_vector(_differentiated(other, var, system), variables, rules))
        try:
            coefficients = span_solve(reduced, basis, allow_dependent=True)
        except NotInSpan:
            check_logger.debug(f"{law.name} is not a combination of {len(known)} known laws")
        else:
            return TrivialityResult(Triviality.TYPE3, coefficients)
    density = reduced[0]
    if density.cls is ExprClass.MATRIX and not density.is_zero:
        raise Type4Unsupported(f"The density of {law.name} is matrix-class.")
    names = {s.name for s in density.symbols()}
    if len(space) == 1 and len(names) == 1:
        try:
            euler = euler_test(density, system.symbol(names.pop()), space[0], system)
        except ValueError as err:
            check_logger.debug(f"Euler test skipped for {law.name}: {err}")
        else:
            if euler.is_zero:
                return TrivialityResult(Triviality.TYPE4)
    return TrivialityResult(Triviality.NONTRIVIAL_SO_FAR)
