"""Exchange-format parsing and pre-normalization of libraries.

Document grammar, one declaration per line::

    const <qname> <type>
    thm   <qname> <term>

Lines starting with ``#`` and blank lines are ignored.  A qualified name is
``<category>.<library>.<theory>.<name>`` with category ``c`` or ``t``; the
dot after the category may be omitted (``cHOL4.bool.!``), as in the
exporters' output.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

from .term import (
    AND, BOOL, EQ, EXISTS, FORALL, FUN, IMP, LOGIC, LOGIC_SIGNATURES, NOT, OR,
    App, Const, ConstSignature, FreeVariableError, Term, TermSyntaxError,
    Theorem, canonicalize, iter_consts, parse_term, parse_type, rename_consts,
    rename_tycons,
)

log = logging.getLogger(__name__)

_QNAME = re.compile(r"^[ct]\.?[^.\s()]+\.[^.\s()]+\.[^\s()]+$")


class ParseError(ValueError):
    def __init__(self, msg: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {msg}")
        self.line = line
        self.column = column


class UnknownConstantError(ParseError):
    pass


class UnboundVariableError(ParseError):
    pass


@dataclass
class Library:
    name: str
    theorems: tuple[Theorem, ...] = ()
    constants: dict[str, ConstSignature] = field(default_factory=dict)
    defined_constants: frozenset[str] = LOGIC
    defined_types: frozenset[str] = frozenset({BOOL, FUN})

    def constants_used(self) -> set[str]:
        used: set[str] = set()
        for thm in self.theorems:
            used.update(iter_consts(thm.statement))
        return used


# Canonical targets a basis file may name.
BASIS_TARGETS = {
    "forall": FORALL, "exists": EXISTS, "and": AND, "or": OR, "imp": IMP,
    "not": NOT, "eq": EQ, "iff": EQ, "bool": BOOL, "fun": FUN,
}


@dataclass(frozen=True)
class BasisMap:
    """Source name -> canonical logical name, for constants and types."""

    entries: Mapping[str, str] = field(default_factory=dict)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str]]) -> "BasisMap":
        out = {}
        for src, tgt in pairs:
            out[src] = BASIS_TARGETS.get(tgt, tgt)
        return cls(out)

    @classmethod
    def parse(cls, text: str) -> "BasisMap":
        pairs = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParseError("basis line needs '<source> <target>'", lineno)
            if parts[1] not in BASIS_TARGETS:
                raise ParseError(f"unknown basis target {parts[1]!r}", lineno)
            pairs.append((parts[0], parts[1]))
        return cls.from_pairs(pairs)


HOL4_BASIS = BasisMap.from_pairs([
    ("cHOL4.bool.!", "forall"), ("cHOL4.bool.?", "exists"),
    ("cHOL4.bool./\\", "and"), ("cHOL4.bool.\\/", "or"),
    ("cHOL4.min.==>", "imp"), ("cHOL4.bool.~", "not"),
    ("cHOL4.min.=", "eq"), ("tHOL4.min.bool", "bool"), ("tHOL4.min.fun", "fun"),
])
HOLLIGHT_BASIS = BasisMap.from_pairs([
    ("cHOLLight.bool.!", "forall"), ("cHOLLight.bool.?", "exists"),
    ("cHOLLight.bool./\\", "and"), ("cHOLLight.bool.\\/", "or"),
    ("cHOLLight.bool.==>", "imp"), ("cHOLLight.bool.~", "not"),
    ("cHOLLight.bool.=", "eq"), ("tHOLLight.bool.bool", "bool"),
    ("tHOLLight.bool.fun", "fun"),
])
ISABELLE_BASIS = BasisMap.from_pairs([
    ("cIsabelle.HOL.All", "forall"), ("cIsabelle.HOL.Ex", "exists"),
    ("cIsabelle.HOL.conj", "and"), ("cIsabelle.HOL.disj", "or"),
    ("cIsabelle.HOL.implies", "imp"), ("cIsabelle.HOL.Not", "not"),
    ("cIsabelle.HOL.eq", "eq"), ("cIsabelle.HOL.iff", "iff"),
    ("tIsabelle.HOL.bool", "bool"), ("tIsabelle.HOL.fun", "fun"),
])
BUILTIN_BASES = {
    "canonical": BasisMap(),
    "hol4": HOL4_BASIS,
    "hollight": HOLLIGHT_BASIS,
    "isabelle": ISABELLE_BASIS,
}


def parse_library(text: str, name: str = "lib") -> Library:
    constants: dict[str, ConstSignature] = {}
    raw_thms: list[tuple[int, int, str, Term]] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        indent = len(line) - len(line.lstrip())
        parts = stripped.split(" ", 2)
        if len(parts) != 3:
            raise ParseError("expected '<kind> <qname> <body>'", lineno, indent + 1)
        kind, qname, body = parts
        body_col = indent + len(kind) + len(qname) + 3
        if kind not in ("const", "thm"):
            raise ParseError(f"unknown declaration {kind!r}", lineno, indent + 1)
        if kind == "const":
            if not _QNAME.match(qname):
                raise ParseError(f"malformed constant name {qname!r}", lineno, indent + len(kind) + 2)
            try:
                ty = parse_type(body.strip())
            except TermSyntaxError as e:
                raise ParseError(str(e), lineno, body_col + e.pos) from None
            if qname in constants:
                raise ParseError(f"duplicate signature for {qname}", lineno)
            constants[qname] = ConstSignature(qname, ty)
        else:
            try:
                t = parse_term(body)
            except FreeVariableError as e:
                raise UnboundVariableError(str(e), lineno, body_col) from None
            except TermSyntaxError as e:
                raise ParseError(str(e), lineno, body_col + e.pos) from None
            raw_thms.append((lineno, body_col, qname, t))

    theorems = []
    for lineno, col, qname, t in raw_thms:
        for c in iter_consts(t):
            if c not in constants and c not in LOGIC_SIGNATURES:
                raise UnknownConstantError(f"constant {c} has no signature", lineno, col)
        theorems.append(Theorem(qname, t))
    used = set()
    for thm in theorems:
        used.update(iter_consts(thm.statement))
    for c in sorted(used & LOGIC):
        constants.setdefault(c, LOGIC_SIGNATURES[c])
    return Library(name, tuple(theorems), constants)


def serialize_library(lib: Library) -> str:
    lines = [f"const {c.name} {c.ty}" for c in lib.constants.values()]
    lines += [f"thm {t.name} {canonicalize(t.statement)}" for t in lib.theorems]
    return "".join(line + "\n" for line in lines)


def apply_basis(lib: Library, basis: BasisMap) -> Library:
    if not basis.entries:
        return lib
    cmap = {s: t for s, t in basis.entries.items() if t not in (BOOL, FUN)}
    tmap = {s: t for s, t in basis.entries.items() if t in (BOOL, FUN)}
    theorems = tuple(Theorem(t.name, rename_consts(t.statement, cmap)) for t in lib.theorems)
    constants: dict[str, ConstSignature] = {}
    for name, sig in lib.constants.items():
        if name in cmap:
            continue
        constants[name] = ConstSignature(name, rename_tycons(sig.ty, tmap))
    used = set()
    for t in theorems:
        used.update(iter_consts(t.statement))
    for name in sorted(used & LOGIC):
        constants.setdefault(name, LOGIC_SIGNATURES[name])
    return replace(lib, theorems=theorems, constants=constants,
                   defined_constants=lib.defined_constants | LOGIC)


def _const_equality(t: Term) -> tuple[str, str] | None:
    if (isinstance(t, App) and isinstance(t.arg, Const) and isinstance(t.fun, App)
            and t.fun.fun == Const(EQ) and isinstance(t.fun.arg, Const)):
        lhs, rhs = t.fun.arg.name, t.arg.name
        if lhs != rhs:
            return lhs, rhs
    return None


def _substitute_everywhere(lib: Library, mapping: dict[str, str], drop: set[str]) -> Library:
    theorems = tuple(Theorem(t.name, rename_consts(t.statement, mapping))
                     for t in lib.theorems if t.name not in drop)
    constants = {n: s for n, s in lib.constants.items() if n not in mapping}
    return replace(lib, theorems=theorems, constants=constants)


def collapse_equalities(lib: Library) -> Library:
    """Substitute c1 by c2 everywhere for each theorem ``|- c1 = c2``."""
    edges: dict[str, set[str]] = {}
    consumed: set[str] = set()
    for thm in lib.theorems:
        pair = _const_equality(thm.statement)
        if pair is not None:
            edges.setdefault(pair[0], set()).add(pair[1])
            consumed.add(thm.name)
    if not consumed:
        return lib

    parent: dict[str, str] = {}

    def find(x: str) -> str:
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, bs in edges.items():
        for b in bs:
            parent[find(a)] = find(b)
    components: dict[str, list[str]] = {}
    for x in list(parent):
        components.setdefault(find(x), []).append(x)

    mapping: dict[str, str] = {}
    for members in components.values():
        sinks = [m for m in members if m not in edges]
        if len(sinks) == 1:
            rep = sinks[0]
        else:
            rep = min(members)
            log.warning("equality theorems between %s have no unique target; using %s",
                        ", ".join(sorted(members)), rep)
        for m in members:
            if m != rep:
                mapping[m] = rep
    return _substitute_everywhere(lib, mapping, consumed)


def collapse_extensional_equalities(lib: Library, manual: Iterable[str]) -> Library:
    manual = list(manual)
    if not manual:
        return lib
    used = lib.constants_used()
    for name in manual:
        if name not in used:
            log.warning("constant %s does not occur in library %s", name, lib.name)
    mapping = {name: EQ for name in manual if name in used}
    if not mapping:
        return lib
    out = _substitute_everywhere(lib, mapping, set())
    if EQ not in out.constants:
        out.constants[EQ] = LOGIC_SIGNATURES[EQ]
    return out


def prepare_library(text: str, name: str, basis: BasisMap | None = None,
                    manual_equalities: Iterable[str] = ()) -> Library:
    """Parse, map the logical basis and collapse constant equalities."""
    lib = parse_library(text, name)
    lib = apply_basis(lib, basis or BasisMap())
    lib = collapse_extensional_equalities(lib, manual_equalities)
    return collapse_equalities(lib)
