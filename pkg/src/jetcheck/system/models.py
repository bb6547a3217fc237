"""Models for equation systems and the objects checked against them.

This module defines `DependentSymbol` and `EquationSystem`, the declared
content of a definition file (equations, potential rules, characteristics,
conservation laws, Lax pairs and Bäcklund transformations), and the
`CheckReport` every verification returns.
"""

from dataclasses import dataclass, field, replace
from typing import Iterator

from src.jetcheck.enums import CheckStatus, ExprClass
from src.jetcheck.exceptions import ClassMismatch, UnknownVariable
from src.jetcheck.expr.models import Expr, IndependentVar, JetSymbol, MultiIndex, Parameter


@dataclass(frozen=True)
class DependentSymbol:
    """A declared dependent variable of a system.

    Parameters
    ----------
    name : str
        Symbol name (``u``, ``J``, ``Phi[2]``).
    cls : ExprClass
        Scalar or matrix.
    variables : tuple of str
        Independent variables of the owning system, in declared order.
    invertible : bool
        Declared invertible.
    symmetric : bool
        Declared symmetric.
    constant_in : frozenset of str
        Variables the symbol does not depend on.
    """

    name: str
    cls: ExprClass
    variables: tuple[str, ...]
    invertible: bool = False
    symmetric: bool = False
    constant_in: frozenset[str] = field(default_factory=frozenset)

    def jet(self, index: MultiIndex | None = None) -> JetSymbol:
        """Return the jet coordinate of this symbol with the given multi-index."""
        return JetSymbol(
            name=self.name,
            index=index or MultiIndex.zero(self.variables),
            cls=self.cls,
            invertible=self.invertible,
            symmetric=self.symmetric,
            constant_in=self.constant_in,
        )

    def derivative(self, *steps: str) -> JetSymbol:
        """Return the jet coordinate after differentiating in ``steps``."""
        index = MultiIndex.zero(self.variables)
        for var in steps:
            index = index.bump(var)
        return self.jet(index)

    def expr(self) -> Expr:
        """Return the underived symbol as an expression."""
        return Expr.symbol(self.jet())


@dataclass(frozen=True)
class Macro:
    """A named expression with formal symbol parameters, expanded by substitution."""

    name: str
    params: tuple[DependentSymbol, ...]
    body: Expr


@dataclass(frozen=True)
class Equation:
    """An equation ``expr = 0`` oriented on its leading derivative."""

    name: str
    expr: Expr
    lead: JetSymbol

    def __repr__(self) -> str:
        return f"Equation(name={self.name}, lead={self.lead.text()})"


@dataclass(frozen=True)
class PotentialRule:
    """A substitution rule ``lhs := rhs`` defining derivatives of a potential."""

    name: str
    lhs: JetSymbol
    rhs: Expr


@dataclass(frozen=True)
class Characteristic:
    """The characteristic ``Q[u]`` of an infinitesimal symmetry.

    Parameters
    ----------
    target : str
        Name of the dependent symbol the characteristic acts on.
    expr : Expr
        The characteristic; its class matches the target's class.
    name : str, optional
        Label used in reports.
    extra : tuple of (str, Expr), optional
        Components on further dependent symbols; the Lie derivative is additive over them.
    """

    target: str
    expr: Expr
    name: str = ""
    extra: tuple[tuple[str, Expr], ...] = ()

    def components(self) -> dict[str, Expr]:
        """Return symbol name to characteristic component."""
        return {self.target: self.expr, **dict(self.extra)}

    def __repr__(self) -> str:
        return f"Characteristic(name={self.name or '?'}, target={self.target})"


@dataclass(frozen=True)
class ConservationLaw:
    """A divergence expression: one component per independent variable.

    The first component is the density; the rest are the fluxes.
    """

    name: str
    components: tuple[tuple[str, Expr], ...]

    @property
    def density(self) -> Expr:
        return self.components[0][1]

    @property
    def density_var(self) -> str:
        return self.components[0][0]

    def component(self, var: str) -> Expr | None:
        """Return the component of ``var`` or None."""
        return dict(self.components).get(var)

    def scaled(self, factor: int) -> "ConservationLaw":
        """Return the law multiplied by a rational constant."""
        return replace(
            self,
            name=f"{factor}*{self.name}",
            components=tuple((v, e.scale(factor)) for v, e in self.components),
        )


@dataclass(frozen=True)
class LaxPair:
    """Two relations linear and homogeneous in an auxiliary symbol.

    Parameters
    ----------
    name : str
        Label.
    aux : str
        Auxiliary symbol (``psi``, ``Psi``).
    param : str
        Spectral parameter (``lam``).
    relations : tuple of Expr
        The two relations, each equal to zero.
    leads : tuple of JetSymbol or None
        Declared highest auxiliary derivative of each relation.
    dparam : str or None
        Symbol standing for the parameter derivative of ``aux``, if the pair uses one.
    """

    name: str
    aux: str
    param: str
    relations: tuple[Expr, Expr]
    leads: tuple[JetSymbol, JetSymbol] | None = None
    dparam: str | None = None


@dataclass(frozen=True)
class BTSystem:
    """Bäcklund relations ``B_i = 0`` between two dependent symbols."""

    name: str
    symbols: tuple[str, str]
    relations: tuple[Expr, ...]


@dataclass
class EquationSystem:
    """A fully linked equation system read from a definition file.

    Parameters
    ----------
    name : str
        Short system name.
    variables : tuple of str
        Independent variables in declared order.
    title : str, optional
        Human readable title.
    """

    name: str
    variables: tuple[str, ...]
    title: str = ""
    dependents: dict[str, DependentSymbol] = field(default_factory=dict)
    families: dict[str, DependentSymbol] = field(default_factory=dict)
    parameters: list[str] = field(default_factory=list)
    macros: dict[str, Macro] = field(default_factory=dict)
    equations: dict[str, Equation] = field(default_factory=dict)
    rules: list[PotentialRule] = field(default_factory=list)
    characteristics: dict[str, Characteristic] = field(default_factory=dict)
    conservation_laws: dict[str, ConservationLaw] = field(default_factory=dict)
    lax_pairs: dict[str, LaxPair] = field(default_factory=dict)
    bts: dict[str, BTSystem] = field(default_factory=dict)

    def variable(self, name: str) -> IndependentVar:
        """Return a declared independent variable."""
        if name not in self.variables:
            raise UnknownVariable(f"'{name}' is not an independent variable of {self.name}.")
        return IndependentVar(name)

    def parameter(self, name: str) -> Parameter:
        """Return a declared parameter."""
        if name not in self.parameters:
            raise KeyError(f"'{name}' is not a parameter of {self.name}.")
        return Parameter(name)

    def family_member(self, family: str, n: int) -> DependentSymbol:
        """Return member ``n`` of a declared symbol family."""
        base = self.families[family]
        return replace(base, name=f"{family}[{n}]")

    def symbol(self, name: str) -> DependentSymbol:
        """Return a dependent symbol, resolving family members such as ``Phi[2]``."""
        if name in self.dependents:
            return self.dependents[name]
        if name.endswith("]") and "[" in name:
            family, _, index = name[:-1].partition("[")
            if family in self.families:
                return self.family_member(family, int(index))
        raise KeyError(f"'{name}' is not a dependent symbol of {self.name}.")

    def has_symbol(self, name: str) -> bool:
        """True when ``name`` resolves to a dependent symbol."""
        try:
            self.symbol(name)
        except (KeyError, ValueError):
            return False
        return True

    def primary_equation(self) -> Equation:
        """Return the first declared equation."""
        if not self.equations:
            raise KeyError(f"{self.name} declares no equations.")
        return next(iter(self.equations.values()))

    def characteristic(self, name: str) -> Characteristic:
        """Return a declared characteristic by name."""
        return self.characteristics[name]

    def iter_symbols(self) -> Iterator[DependentSymbol]:
        yield from self.dependents.values()

    def make_characteristic(self, target: str, expr: Expr, name: str = "") -> Characteristic:
        """Build a characteristic, checking its class against the target."""
        symbol = self.symbol(target)
        if not expr.is_zero and expr.cls is not symbol.cls:
            raise ClassMismatch(
                f"Characteristic for {symbol.cls.value} '{target}' has class {expr.cls.value}."
            )
        return Characteristic(target=target, expr=expr.as_class(symbol.cls), name=name)

    def __repr__(self) -> str:
        return (
            f"EquationSystem(name={self.name}, variables={self.variables}, "
            f"dependents={list(self.dependents)}, equations={list(self.equations)})"
        )


@dataclass(frozen=True)
class CheckReport:
    """The outcome of one verification.

    Parameters
    ----------
    check_id : str
        Stable identifier, ``entry/kind/name`` for catalog checks.
    status : CheckStatus
        Zero, residual or error.
    residual : Expr or None
        Irreducible residual (None when zero or on error).
    passes : int
        Rewriting passes used.
    millis : int
        Wall time in milliseconds.
    message : str
        Diagnostic text for errors and notes.
    """

    check_id: str
    status: CheckStatus
    residual: Expr | None = None
    passes: int = 0
    millis: int = 0
    message: str = ""
    text: str | None = None

    @property
    def residual_text(self) -> str:
        """Rendered residual, ``0`` for zero status, the message on error."""
        if self.text is not None:
            return self.text
        if self.status is CheckStatus.ERROR:
            return self.message
        if self.residual is None:
            return "0"
        from src.jetcheck.parser.render import render

        return render(self.residual)

    @property
    def is_zero(self) -> bool:
        return self.status is CheckStatus.ZERO

    def with_id(self, check_id: str) -> "CheckReport":
        """Return the same report under another id."""
        return replace(self, check_id=check_id)

    def __repr__(self) -> str:
        return (
            f"CheckReport(check_id={self.check_id}, status={self.status.value}, "
            f"residual={self.residual_text!r}, passes={self.passes})"
        )
