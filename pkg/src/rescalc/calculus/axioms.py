"""The shipped database of resource inequalities."""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from importlib import resources
from typing import Iterator, Optional

from .parser import ParseError, parse_inequality
from .resources import Inequality


@dataclass(frozen=True)
class Axiom:
    name: str
    title: str
    notation: str
    statement: Inequality
    group: str = "quantum"
    kind: str = "proved"
    note: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "title": self.title, "notation": self.notation,
                "statement": self.statement.to_text(), "group": self.group, "kind": self.kind, "note": self.note}


class AxiomDB:
    """Immutable name -> :class:`Axiom` mapping, in file order."""

    def __init__(self, axioms: list[Axiom]):
        self._items = {a.name: a for a in axioms}
        if len(self._items) != len(axioms):
            raise ValueError("duplicate axiom names")

    @classmethod
    def from_text(cls, text: str, source: str = "<axioms>") -> "AxiomDB":
        cp = configparser.ConfigParser(interpolation=None)
        cp.read_string(text, source=source)
        out = []
        for name in cp.sections():
            sec = cp[name]
            try:
                stmt = parse_inequality(sec["statement"], name=name)
            except ParseError as e:
                raise ValueError(f"{source} [{name}]: {e}") from e
            out.append(Axiom(name, sec.get("title", name), sec.get("notation", ""),
                             stmt, sec.get("group", "quantum"), sec.get("kind", "proved"),
                             sec.get("note", "")))
        return cls(out)

    @classmethod
    def load(cls, path: Optional[str] = None) -> "AxiomDB":
        if path is None:
            text = resources.files("rescalc.data").joinpath("axioms.txt").read_text(encoding="utf-8")
            return cls.from_text(text, "axioms.txt")
        with open(path, encoding="utf-8") as f:
            return cls.from_text(f.read(), str(path))

    def __contains__(self, name: str) -> bool:
        return name in self._items

    def __iter__(self) -> Iterator[Axiom]:
        return iter(self._items.values())

    def __len__(self) -> int:
        return len(self._items)

    def get(self, name: str) -> Axiom:
        try:
            return self._items[name]
        except KeyError:
            raise KeyError(f"unknown axiom {name!r}") from None

    def names(self) -> list[str]:
        return list(self._items)

    def group(self, group: str) -> list[Axiom]:
        return [a for a in self if a.group == group]

    def matches(self, ineq: Inequality, group: Optional[str] = None) -> list[str]:
        """Names of axioms canonically equivalent to ``ineq``."""
        pool = self.group(group) if group else list(self)
        return [a.name for a in pool if a.statement.equivalent(ineq)]


_DEFAULT: Optional[AxiomDB] = None


def axioms() -> AxiomDB:
    """The shipped database (loaded once)."""
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = AxiomDB.load()
    return _DEFAULT
