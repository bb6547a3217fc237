"""Module for loading the catalog index and the systems its entries name."""

import threading
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from my_logger import suite_logger
from src.jetcheck.config import CATALOG_DIR, Settings
from src.jetcheck.exceptions import DefinitionFormatError, UnknownEntry
from src.jetcheck.parser.definitions import parse_definition_file
from src.jetcheck.reduction.rules import DEFAULT_PASS_LIMIT, RuleSet, orient
from src.jetcheck.system.models import EquationSystem

INDEX_FILE = "index.yaml"
SYSTEMS_DIR = "systems"
PAGES_DIR = "pages"


@dataclass(frozen=True)
class CatalogEntry:
    """One catalog entry.

    Parameters
    ----------
    name : str
        Entry name, the first part of every check id.
    title : str
        Human readable title.
    systems : dict of str to tuple of str
        System name to its definition files; later files are overlays.
    checks : tuple of dict
        Declared checks, each with a ``kind``.
    notes : str, optional
        Remarks on printed forms and conventions.
    """

    name: str
    title: str
    systems: dict[str, tuple[str, ...]]
    checks: tuple[dict, ...]
    notes: str = ""

    @property
    def default_system(self) -> str:
        return next(iter(self.systems))


def _entry(name: str, raw: dict, kinds: frozenset[str] | None) -> CatalogEntry:
    if not isinstance(raw, dict) or not raw.get("systems"):
        raise DefinitionFormatError(f"Catalog entry '{name}' names no systems.")
    checks = tuple(raw.get("checks") or ())
    for check in checks:
        kind = check.get("kind") if isinstance(check, dict) else None
        if kind is None or (kinds is not None and kind not in kinds):
            raise DefinitionFormatError(f"Catalog entry '{name}' has a check of kind {kind!r}.")
        system = check.get("system")
        if system is not None and system not in raw["systems"]:
            raise DefinitionFormatError(f"Catalog entry '{name}' has no system '{system}'.")
    return CatalogEntry(
        name=name,
        title=str(raw.get("title", name)),
        systems={key: tuple(files) for key, files in raw["systems"].items()},
        checks=checks,
        notes=str(raw.get("notes", "")).strip(),
    )


class Catalog:
    """The bundled (or a user supplied) catalog of equation systems.

    Systems are parsed on first use and cached, together with their oriented
    rules; the cache is shared by concurrently running entries.

    Parameters
    ----------
    directory : Path, optional
        Directory holding ``index.yaml``, ``systems/`` and ``pages/``.
    kinds : frozenset of str or None, optional
        Check kinds the index may use; not validated when omitted.
    pass_limit : int, optional
        Pass limit of the cached rule sets.
    """

    def __init__(
        self,
        directory: Path = CATALOG_DIR,
        kinds: frozenset[str] | None = None,
        pass_limit: int = DEFAULT_PASS_LIMIT,
    ) -> None:
        self.directory = Path(directory)
        self.pass_limit = pass_limit
        with open(self.directory / INDEX_FILE, encoding="utf-8") as handle:
            document = yaml.safe_load(handle) or {}
        raw_entries = document.get("entries") or {}
        self.entries = {name: _entry(name, raw, kinds) for name, raw in raw_entries.items()}
        self._systems: dict[tuple[str, str], EquationSystem] = {}
        self._rules: dict[tuple[str, str], RuleSet] = {}
        self._lock = threading.Lock()
        suite_logger.debug(f"Loaded catalog index with {len(self.entries)} entries.")

    def names(self) -> list[str]:
        """Return the entry names in index order."""
        return list(self.entries)

    def entry(self, name: str) -> CatalogEntry:
        """Retrieve an entry by name.

        Raises
        ------
        UnknownEntry
            When the index has no such entry.
        """
        if name not in self.entries:
            raise UnknownEntry(f"No catalog entry '{name}'; known: {', '.join(self.entries)}.")
        return self.entries[name]

    def definition_path(self, file_name: str) -> Path:
        return self.directory / SYSTEMS_DIR / file_name

    def page_path(self, name: str) -> Path:
        return self.directory / PAGES_DIR / f"{self.entry(name).name}.md"

    def load_files(self, files: tuple[str, ...]) -> EquationSystem:
        """Parse a definition file followed by its overlays."""
        system: EquationSystem | None = None
        for file_name in files:
            text = self.definition_path(file_name).read_text(encoding="utf-8")
            system = parse_definition_file(text, base=system)
        if system is None:
            raise DefinitionFormatError("A catalog system needs at least one definition file.")
        return system

    def system(self, entry: str, name: str | None = None) -> EquationSystem:
        """Return a system of an entry, parsing it on first use."""
        found = self.entry(entry)
        name = name or found.default_system
        key = (entry, name)
        with self._lock:
            if key not in self._systems:
                self._systems[key] = self.load_files(found.systems[name])
            return self._systems[key]

    def rules(self, entry: str, name: str | None = None) -> RuleSet:
        """Return the oriented rules of an entry's system."""
        system = self.system(entry, name)
        key = (entry, name or self.entry(entry).default_system)
        with self._lock:
            if key not in self._rules:
                self._rules[key] = orient(system, self.pass_limit)
            return self._rules[key]


@dataclass
class EntryContext:
    """An entry with its catalog and the run settings, as seen by check runners.

    ``memo`` holds values the runners share within one run of the entry.
    """

    catalog: Catalog
    entry: CatalogEntry
    settings: Settings
    memo: dict = field(default_factory=dict)

    def system(self, check: dict) -> EquationSystem:
        return self.catalog.system(self.entry.name, check.get("system"))

    def rules(self, check: dict) -> RuleSet:
        return self.catalog.rules(self.entry.name, check.get("system"))
