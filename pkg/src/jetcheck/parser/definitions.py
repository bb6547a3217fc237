"""Reader for line-oriented, section-headed definition files.

A file looks like::

    [system]
    name = kdv
    [variables]
    x t
    [dependents]
    u scalar
    [equations]
    F @ u_t : u_t - 6*u*u_x + u_xxx

Sections are collected first and processed in dependency order, so they
may appear in any order. ``#`` starts a comment and a trailing ``\\``
continues a line. Every error carries the 1-based line it came from.
"""

import re
from dataclasses import dataclass, replace

from my_logger import check_logger
from src.jetcheck.enums import ExprClass
from src.jetcheck.exceptions import (
    DefinitionFormatError,
    DuplicateName,
    MissingOrientation,
    ParseError,
    UndeclaredSymbol,
)
from src.jetcheck.expr.models import Expr, JetSymbol
from src.jetcheck.parser.expressions import parse_expression
from src.jetcheck.system.models import (
    BTSystem,
    Characteristic,
    ConservationLaw,
    DependentSymbol,
    Equation,
    EquationSystem,
    LaxPair,
    Macro,
    PotentialRule,
)

SECTION_ORDER = (
    "system",
    "variables",
    "dependents",
    "parameters",
    "macros",
    "equations",
    "rules",
    "characteristics",
    "conservation_laws",
    "lax_pairs",
    "bts",
)

NAME = r"[A-Za-z][A-Za-z0-9]*"
MACRO_RE = re.compile(rf"^({NAME})\s*\(([^)]*)\)\s*=\s*(.+)$")
EQUATION_RE = re.compile(rf"^({NAME})\s*(?:@\s*([^:]+?))?\s*:\s*(.+)$")
TARGETS_RE = re.compile(rf"^({NAME})\s*\(([^)]*)\)\s*(?:@\s*([^:]+?))?\s*:\s*(.+)$")
LAW_RE = re.compile(rf"^({NAME})\s*:\s*(.+)$")


@dataclass(frozen=True)
class SourceLine:
    """A logical line of a definition file."""

    number: int
    text: str


def _logical_lines(text: str) -> dict[str, list[SourceLine]]:
    sections: dict[str, list[SourceLine]] = {}
    current: str | None = None
    pending = ""
    pending_line = 0
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if pending:
            line = pending + " " + line.strip()
            number = pending_line
        if line.endswith("\\"):
            pending = line[:-1].rstrip()
            pending_line = number
            continue
        pending = ""
        stripped = line.strip()
        if not stripped:
            continue
        header = re.fullmatch(r"\[([a-z_]+)\]", stripped)
        if header:
            current = header.group(1)
            if current not in SECTION_ORDER:
                raise DefinitionFormatError(f"Unknown section [{current}]", line=number)
            if current in sections:
                raise DuplicateName(f"Section [{current}] appears twice", line=number)
            sections[current] = []
            continue
        if current is None:
            raise DefinitionFormatError("Content before the first section header", line=number)
        sections[current].append(SourceLine(number, stripped))
    if pending:
        raise DefinitionFormatError("File ends with a line continuation", line=pending_line)
    return sections


def _split_names(text: str) -> list[str]:
    return [part for part in re.split(r"[\s,]+", text.strip()) if part]


class DefinitionReader:
    """Builds an `EquationSystem` from definition-file text.

    Parameters
    ----------
    text : str
        Definition file contents.
    base : EquationSystem or None, optional
        System to extend; the file may then omit ``[variables]`` and ``[dependents]``.
    """

    def __init__(self, text: str, base: EquationSystem | None = None) -> None:
        self.sections = _logical_lines(text)
        self.base = base
        self.system: EquationSystem | None = None
        if base is not None:
            self.system = replace(
                base,
                dependents=dict(base.dependents),
                families=dict(base.families),
                parameters=list(base.parameters),
                macros=dict(base.macros),
                equations=dict(base.equations),
                rules=list(base.rules),
                characteristics=dict(base.characteristics),
                conservation_laws=dict(base.conservation_laws),
                lax_pairs=dict(base.lax_pairs),
                bts=dict(base.bts),
            )

    def read(self) -> EquationSystem:
        """Process every section in dependency order."""
        for section in SECTION_ORDER:
            lines = self.sections.get(section, [])
            if section == "variables" and self.system is None:
                self._start(lines)
                continue
            if not lines:
                continue
            handler = getattr(self, f"_section_{section}")
            for line in lines:
                try:
                    handler(line.text)
                except ParseError as err:
                    if err.line is None:
                        err.line = line.number
                    raise
        if self.system is None:
            raise DefinitionFormatError("Missing [variables] section")
        check_logger.debug(f"Read definition file for {self.system!r}")
        return self.system

    # helpers

    def _start(self, lines: list[SourceLine]) -> None:
        if not lines:
            raise DefinitionFormatError("Missing [variables] section")
        variables: list[str] = []
        for line in lines:
            for name in _split_names(line.text):
                if name in variables:
                    raise DuplicateName(f"Variable '{name}' declared twice", line=line.number)
                variables.append(name)
        header = self._header()
        self.system = EquationSystem(
            name=header.get("name", "unnamed"),
            title=header.get("title", ""),
            variables=tuple(variables),
        )

    def _header(self) -> dict[str, str]:
        header: dict[str, str] = {}
        for line in self.sections.get("system", []):
            key, sep, value = line.text.partition("=")
            if not sep:
                raise DefinitionFormatError("Expected 'key = value'", line=line.number)
            header[key.strip()] = value.strip()
        return header

    @property
    def _sys(self) -> EquationSystem:
        assert self.system is not None
        return self.system

    def _taken(self) -> set[str]:
        s = self._sys
        return (
            set(s.variables)
            | set(s.dependents)
            | set(s.families)
            | set(s.parameters)
            | set(s.macros)
            | set(s.equations)
        )

    def _claim(self, name: str, namespace: dict | set | None = None) -> None:
        pool = self._taken() if namespace is None else set(namespace)
        if name in pool:
            raise DuplicateName(f"'{name}' is declared twice")

    def _expr(self, text: str, local: dict[str, DependentSymbol] | None = None) -> Expr:
        return parse_expression(text.strip(), self._sys, local)

    def _jet(self, text: str) -> JetSymbol:
        e = self._expr(text)
        if e.is_single_term and e.terms[0].coeff == 1:
            term = e.terms[0]
            if not term.word and len(term.monomial) == 1:
                atom, k = term.monomial[0]
                if isinstance(atom, JetSymbol) and k == 1:
                    return atom
            if not term.monomial and len(term.word) == 1:
                factor = term.word[0]
                if not factor.inverted and not factor.transposed:
                    return factor.symbol
        raise DefinitionFormatError(f"'{text.strip()}' is not a derivative of a dependent symbol")

    def _symbol_name(self, text: str) -> str:
        name = text.strip()
        if not self._sys.has_symbol(name):
            raise UndeclaredSymbol(f"Undeclared symbol '{name}'")
        return name

    # sections

    def _section_system(self, text: str) -> None:
        """Header keys are read together with [variables]."""

    def _section_variables(self, text: str) -> None:
        raise DefinitionFormatError("An overlay file cannot redeclare [variables]")

    def _section_dependents(self, text: str) -> None:
        parts = text.split()
        if len(parts) < 2:
            raise DefinitionFormatError("Expected 'NAME scalar|matrix [properties]'")
        name, cls_text, *props = parts
        try:
            cls = ExprClass(cls_text)
        except ValueError:
            raise DefinitionFormatError(f"Unknown class '{cls_text}'") from None
        invertible = symmetric = False
        constant_in: frozenset[str] = frozenset()
        for prop in props:
            if prop == "invertible":
                invertible = True
            elif prop == "symmetric":
                symmetric = True
            elif prop.startswith("constant-in:"):
                constant_in = frozenset(_split_names(prop.split(":", 1)[1]))
                unknown = constant_in - set(self._sys.variables)
                if unknown:
                    raise UndeclaredSymbol(f"Unknown variables {sorted(unknown)} in '{prop}'")
            else:
                raise DefinitionFormatError(f"Unknown property '{prop}'")
        if (invertible or symmetric) and cls is not ExprClass.MATRIX:
            raise DefinitionFormatError("Only matrix symbols can be invertible or symmetric")
        family = name.endswith("[]")
        base_name = name[:-2] if family else name
        if not re.fullmatch(NAME, base_name):
            raise DefinitionFormatError(f"Invalid symbol name '{name}'")
        self._claim(base_name)
        symbol = DependentSymbol(
            name=base_name,
            cls=cls,
            variables=self._sys.variables,
            invertible=invertible,
            symmetric=symmetric,
            constant_in=constant_in,
        )
        if family:
            self._sys.families[base_name] = symbol
        else:
            self._sys.dependents[base_name] = symbol

    def _section_parameters(self, text: str) -> None:
        for name in _split_names(text):
            self._claim(name)
            self._sys.parameters.append(name)

    def _section_macros(self, text: str) -> None:
        match = MACRO_RE.match(text)
        if not match:
            raise DefinitionFormatError("Expected 'Name(P: class, ...) = body'")
        name, params_text, body = match.groups()
        self._claim(name)
        params: list[DependentSymbol] = []
        for declared in filter(None, (p.strip() for p in params_text.split(","))):
            pname, _, cls_text = (part.strip() for part in declared.partition(":"))
            try:
                cls = ExprClass(cls_text or "scalar")
            except ValueError:
                raise DefinitionFormatError(f"Unknown class '{cls_text}'") from None
            params.append(DependentSymbol(pname, cls, self._sys.variables))
        local = {p.name: p for p in params}
        self._sys.macros[name] = Macro(name, tuple(params), self._expr(body, local))

    def _section_equations(self, text: str) -> None:
        match = EQUATION_RE.match(text)
        if not match:
            raise DefinitionFormatError("Expected 'NAME @ LEAD : EXPR'")
        name, lead_text, body = match.groups()
        if lead_text is None:
            raise MissingOrientation(f"Equation '{name}' has no '@ LEAD' orientation")
        self._claim(name)
        lead = self._jet(lead_text)
        self._sys.equations[name] = Equation(name, self._expr(body), lead)

    def _section_rules(self, text: str) -> None:
        lhs, sep, rhs = text.partition(":=")
        if not sep:
            raise DefinitionFormatError("Expected 'LHS := RHS'")
        jet = self._jet(lhs)
        if any(r.lhs == jet for r in self._sys.rules):
            raise DuplicateName(f"Rule for '{jet.text()}' declared twice")
        value = self._expr(rhs)
        self._sys.rules.append(PotentialRule(jet.text(), jet, value.as_class(jet.cls)))

    def _section_characteristics(self, text: str) -> None:
        match = TARGETS_RE.match(text)
        if not match or match.group(3):
            raise DefinitionFormatError("Expected 'NAME (TARGET[, OTHER]) : Q [| Q2]'")
        name, targets_text, _, body = match.groups()
        self._claim(name, self._sys.characteristics)
        targets = [self._symbol_name(t) for t in targets_text.split(",")]
        parts = body.split("|")
        if len(parts) != len(targets):
            raise DefinitionFormatError(f"'{name}' needs one component per target")
        first = self._sys.make_characteristic(targets[0], self._expr(parts[0]), name)
        extra = tuple(
            (t, self._sys.make_characteristic(t, self._expr(p)).expr)
            for t, p in zip(targets[1:], parts[1:])
        )
        self._sys.characteristics[name] = Characteristic(first.target, first.expr, name, extra)

    def _section_conservation_laws(self, text: str) -> None:
        match = LAW_RE.match(text)
        if not match:
            raise DefinitionFormatError("Expected 'NAME : t = P | x = FLUX'")
        name, body = match.groups()
        self._claim(name, self._sys.conservation_laws)
        components = []
        for part in body.split("|"):
            var, sep, value = part.partition("=")
            var = var.strip()
            if not sep or var not in self._sys.variables:
                raise DefinitionFormatError(f"Component '{part.strip()}' must read 'VAR = EXPR'")
            components.append((var, self._expr(value)))
        self._sys.conservation_laws[name] = ConservationLaw(name, tuple(components))

    def _section_lax_pairs(self, text: str) -> None:
        match = TARGETS_RE.match(text)
        if not match:
            raise DefinitionFormatError("Expected 'NAME (AUX; PARAM[; DLAM]) [@ L1, L2] : R1 | R2'")
        name, head, leads_text, body = match.groups()
        self._claim(name, self._sys.lax_pairs)
        head_parts = [p.strip() for p in head.split(";")]
        if len(head_parts) not in (2, 3):
            raise DefinitionFormatError("Lax pair head is '(AUX; PARAM[; DLAM])'")
        aux = self._symbol_name(head_parts[0])
        param = head_parts[1]
        if param not in self._sys.parameters:
            raise UndeclaredSymbol(f"'{param}' is not a declared parameter")
        dparam = self._symbol_name(head_parts[2]) if len(head_parts) == 3 else None
        relations = [self._expr(p) for p in body.split("|")]
        if len(relations) != 2:
            raise DefinitionFormatError(f"Lax pair '{name}' needs exactly two relations")
        leads = None
        if leads_text:
            lead_parts = leads_text.split(",")
            if len(lead_parts) != 2:
                raise DefinitionFormatError("Give one leading derivative per relation")
            leads = (self._jet(lead_parts[0]), self._jet(lead_parts[1]))
        self._sys.lax_pairs[name] = LaxPair(
            name, aux, param, (relations[0], relations[1]), leads, dparam
        )

    def _section_bts(self, text: str) -> None:
        match = TARGETS_RE.match(text)
        if not match or match.group(3):
            raise DefinitionFormatError("Expected 'NAME (u, v) : B1 | B2'")
        name, symbols_text, _, body = match.groups()
        self._claim(name, self._sys.bts)
        symbols = [self._symbol_name(s) for s in symbols_text.split(",")]
        if len(symbols) != 2:
            raise DefinitionFormatError("A Bäcklund transformation relates two symbols")
        relations = tuple(self._expr(p) for p in body.split("|"))
        self._sys.bts[name] = BTSystem(name, (symbols[0], symbols[1]), relations)


def parse_definition_file(text: str, base: EquationSystem | None = None) -> EquationSystem:
    """Parse a definition file into a linked equation system.

    Parameters
    ----------
    text : str
        File contents.
    base : EquationSystem or None, optional
        Existing system the file extends (basis files, overlays).

    Returns
    -------
    EquationSystem
        The system with every declaration checked.
    """
    return DefinitionReader(text, base).read()
