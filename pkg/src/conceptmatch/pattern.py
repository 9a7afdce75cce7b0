"""Patterns of theorems, per-library pattern indices and type patterns."""

from __future__ import annotations

import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .ingest import Library
from .normalize import NormConfig, PatternPiece, normalize_patterns, normalize_text
from .term import (
    AND, EQ, EXISTS, FORALL, LOGIC, NOT, OR, Const, Term, Theorem, TyCon, TyVar, Type, abstract, app, canonicalize,
    conj, constants_in_order, eq, forall, imp, parse_term, subst_const,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Pattern:
    body: str  # canonical form of the lambda-abstracted theorem
    arity: int


@dataclass(frozen=True)
class RelativePattern:
    pattern: Pattern
    index: int


def _abstracted(t: Term, defined: frozenset | set) -> tuple[Pattern, list[str]]:
    undefined = [c for c in constants_in_order(t) if c not in defined]
    return Pattern(canonicalize(abstract(t, undefined)), len(undefined)), undefined


def extract_pattern(t: Term, defined: Iterable[str]) -> Pattern:
    return _abstracted(t, frozenset(defined))[0]


def relative_patterns(t: Term, defined: Iterable[str]) -> list[tuple[str, RelativePattern]]:
    pat, undefined = _abstracted(t, frozenset(defined))
    return [(c, RelativePattern(pat, i)) for i, c in enumerate(undefined)]


class Interner:
    """Dense integer ids for relative patterns, shared by compared indices."""

    def __init__(self):
        self._ids: dict[tuple[str, int], int] = {}
        self._keys: list[RelativePattern] = []

    def intern(self, rp: RelativePattern) -> int:
        key = (rp.pattern.body, rp.index)
        pid = self._ids.get(key)
        if pid is None:
            pid = self._ids[key] = len(self._keys)
            self._keys.append(rp)
        return pid

    def lookup(self, pid: int) -> RelativePattern:
        return self._keys[pid]

    def __len__(self) -> int:
        return len(self._keys)


class UnknownConstantError(KeyError):
    pass


_STRUCTURAL = frozenset({AND, OR, NOT, EQ, FORALL, EXISTS})


def theorem_pieces(statement: Term, cfg: NormConfig, defined: frozenset, name: str | None = None,
                   diagnostics: list[str] | None = None) -> list[PatternPiece]:
    """Normalized theorems of ``statement`` with their patterns.

    Without normalization, or when a logical constant is itself abstracted,
    constants are numbered by first occurrence in the canonical text.
    """
    if cfg.level > 0 and _STRUCTURAL <= defined:
        return normalize_patterns(statement, cfg, defined, name, diagnostics)
    out = []
    for text in normalize_text(statement, cfg, name, diagnostics):
        pat, undefined = _abstracted(parse_term(text), defined)
        out.append(PatternPiece(pat.body, tuple(undefined), tuple(range(len(undefined)))))
    return out


def _pieces_job(args):
    statement, cfg, defined, name = args
    diags: list[str] = []
    return theorem_pieces(statement, cfg, defined, name, diags), diags


class PatternIndex:
    """P^set and C^set of one library, maintained with reference counts.

    ``pset[c]`` maps pattern id -> number of normalized theorems giving
    ``c`` that relative pattern; its keys are the pattern set of ``c``.
    ``cset[p]`` is the inverse relation.
    """

    def __init__(self, library: str, cfg: NormConfig, defined: Iterable[str],
                 interner: Interner | None = None):
        self.library = library
        self.cfg = cfg
        self.defined = frozenset(defined)
        self.interner = interner if interner is not None else Interner()
        self.pset: dict[str, Counter] = {}
        self.cset: dict[int, Counter] = {}
        self.diagnostics: list[str] = []
        self._contrib: dict[str, list[tuple[str, int]]] = {}
        self._pieces: dict[str, list[tuple[str, tuple[str, ...]]]] = {}
        self._occurs: dict[str, set[str]] = {}
        self._statements: dict[str, Term] = {}
        self._norm_cache: dict[str, list[PatternPiece]] = {}
        # constants / patterns touched since the last call to take_dirty()
        self.dirty_consts: set[str] = set()
        self.dirty_patterns: set[int] = set()

    @property
    def npatterns(self) -> dict[str, int]:
        return {c: len(ps) for c, ps in self.pset.items()}

    def patterns_of(self, c: str) -> set[int]:
        ps = self.pset.get(c)
        return set(ps) if ps else set()

    def theorems_mentioning(self, c: str) -> set[str]:
        return set(self._occurs.get(c, ()))

    def pieces(self):
        """``(theorem name, pattern body, undefined constants)`` per normalized theorem."""
        for name, ps in self._pieces.items():
            for body, consts in ps:
                yield name, body, consts

    def _normalized(self, thm: Theorem) -> list[PatternPiece]:
        key = canonicalize(thm.statement)
        cached = self._norm_cache.get(key)
        if cached is None:
            cached = self._norm_cache[key] = theorem_pieces(
                thm.statement, self.cfg, self.defined, thm.name, self.diagnostics)
        return cached

    def add_theorem(self, thm: Theorem, normalized: list[PatternPiece] | None = None) -> None:
        if thm.name in self._contrib:
            self.remove_theorem(thm.name)
        if normalized is None:
            normalized = self._normalized(thm)
        contrib: list[tuple[str, int]] = []
        pieces = []
        for piece in normalized:
            pat = Pattern(piece.body, piece.arity)
            pieces.append((piece.body, piece.order))
            for c, i in zip(piece.order, piece.index):
                contrib.append((c, self.interner.intern(RelativePattern(pat, i))))
        for c, pid in contrib:
            self.pset.setdefault(c, Counter())[pid] += 1
            self.cset.setdefault(pid, Counter())[c] += 1
            self.dirty_consts.add(c)
            self.dirty_patterns.add(pid)
        self._contrib[thm.name] = contrib
        self._pieces[thm.name] = pieces
        self._statements[thm.name] = thm.statement
        for c in set(constants_in_order(thm.statement)):
            self._occurs.setdefault(c, set()).add(thm.name)

    def remove_theorem(self, name: str) -> None:
        contrib = self._contrib.pop(name)
        del self._pieces[name]
        stmt = self._statements.pop(name)
        for c, pid in contrib:
            ps = self.pset[c]
            ps[pid] -= 1
            if not ps[pid]:
                del ps[pid]
                if not ps:
                    del self.pset[c]
            cs = self.cset[pid]
            cs[c] -= 1
            if not cs[c]:
                del cs[c]
                if not cs:
                    del self.cset[pid]
            self.dirty_consts.add(c)
            self.dirty_patterns.add(pid)
        for c in set(constants_in_order(stmt)):
            names = self._occurs[c]
            names.discard(name)
            if not names:
                del self._occurs[c]

    def take_dirty(self) -> tuple[set[str], set[int]]:
        out = (self.dirty_consts, self.dirty_patterns)
        self.dirty_consts, self.dirty_patterns = set(), set()
        return out

    def check_duality(self) -> None:
        for c, ps in self.pset.items():
            assert ps, c
            for pid in ps:
                assert c in self.cset.get(pid, ()), (c, pid)
        for pid, cs in self.cset.items():
            assert cs, pid
            for c in cs:
                assert pid in self.pset.get(c, ()), (c, pid)

    def relation(self) -> set[tuple[str, RelativePattern]]:
        """The pset relation with pattern ids resolved, for comparisons."""
        return {(c, self.interner.lookup(pid)) for c, ps in self.pset.items() for pid in ps}


def build_index(lib: Library, cfg: NormConfig = NormConfig(), interner: Interner | None = None,
                jobs: int = 1) -> PatternIndex:
    idx = PatternIndex(lib.name, cfg, lib.defined_constants, interner)
    normalized: list[list[str] | None] = [None] * len(lib.theorems)
    if jobs > 1 and len(lib.theorems) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = pool.map(_pieces_job, [(t.statement, cfg, idx.defined, t.name)
                                             for t in lib.theorems], chunksize=64)
            for i, (texts, diags) in enumerate(results):
                normalized[i] = texts
                idx.diagnostics.extend(diags)
    for thm, texts in zip(lib.theorems, normalized):
        idx.add_theorem(thm, texts)
    idx.take_dirty()
    return idx


def common_patterns(idx1: PatternIndex, c1: str, idx2: PatternIndex, c2: str) -> set[RelativePattern]:
    if idx1.interner is not idx2.interner:
        raise ValueError("indices must share one pattern interner")
    for idx, c in ((idx1, c1), (idx2, c2)):
        if c not in idx.pset:
            raise UnknownConstantError(f"{c} has no patterns in {idx.library}")
    shared = idx1.pset[c1].keys() & idx2.pset[c2].keys()
    return {idx1.interner.lookup(pid) for pid in shared}


# -- type patterns ---------------------------------------------------------------

@dataclass(frozen=True)
class TypePattern:
    shape: str
    leaves: tuple[Type, ...]


def type_pattern(ty: Type, defined_types: Iterable[str]) -> TypePattern:
    defined = frozenset(defined_types)
    slots: dict[tuple, int] = {}
    leaves: list[Type] = []

    def slot(key: tuple, leaf: Type) -> str:
        i = slots.get(key)
        if i is None:
            i = slots[key] = len(leaves)
            leaves.append(leaf)
        return f"a{i}"

    def go(t: Type) -> str:
        if isinstance(t, TyVar):
            return slot(("v", t.id), t)
        head = t.name if t.name in defined else slot(("c", t.name), TyCon(t.name))
        if not t.args:
            return head
        return f"{head}({','.join(go(a) for a in t.args)})"

    body = go(ty)
    binders = " ".join(f"a{i}" for i in range(len(leaves)))
    return TypePattern(f"(\\{binders}. {body})" if leaves else body, tuple(leaves))


def match_type_patterns(tp1: TypePattern, tp2: TypePattern) -> list[tuple[Type, Type]] | None:
    if tp1.shape != tp2.shape:
        return None
    return [(a, b) for a, b in zip(tp1.leaves, tp2.leaves)
            if not isinstance(a, TyVar) and not isinstance(b, TyVar)]


# -- named properties ------------------------------------------------------------

_C0, _C1 = "c.template.slot.c0", "c.template.slot.c1"


def _templates() -> dict[str, Term]:
    c0, c1 = Const(_C0), Const(_C1)
    x, y, z, w = (Const(v) for v in ("x", "y", "z", "w"))
    return {
        "Inj": forall("xy", imp(eq(app(c0, x), app(c0, y)), eq(x, y))),
        "Asso": forall("xyz", eq(app(c0, app(c0, x, y), z), app(c0, x, app(c0, y, z)))),
        "Comm": forall("xy", eq(app(c0, x, y), app(c0, y, x))),
        "Refl": forall("x", app(c0, x, x)),
        "Lcomm": forall("xyz", eq(app(c0, x, app(c0, y, z)), app(c0, y, app(c0, x, z)))),
        "Idempo": forall("x", eq(app(c0, x, x), x)),
        "Trans": forall("xyz", imp(conj(app(c0, x, y), app(c0, y, z)), app(c0, x, z))),
        "App": forall("xy", eq(app(c0, x, y), app(x, y))),
        "Inj1": forall("xy", eq(eq(app(c0, x), app(c0, y)), eq(x, y))),
        "Inj2": forall("xyzw", eq(eq(app(c0, x, y), app(c0, z, w)), conj(eq(x, z), eq(y, w)))),
        "App2": forall("xyz", eq(app(c0, x, y, z), app(x, y, z))),
        "Class": app(c0, c1),
        "Inv": forall("x", eq(app(c0, app(c1, x)), x)),
        "Imp": forall("x", imp(app(c0, x), app(c1, x))),
        "Neutr": forall("x", eq(app(c0, c1, x), x)),
        "Equal": forall("x", eq(app(c0, x), app(c1, x))),
    }


# Only Class and Inv have published statements; the rest are the usual
# textbook statements of the property names.
RECONSTRUCTED = frozenset(_templates()) - {"Class", "Inv"}


@dataclass
class PropertyCatalog:
    """Pattern body -> (property name, template slot of each abstracted constant,
    number of template slots)."""

    variants: dict[str, tuple[str, tuple[int, ...], int]] = field(default_factory=dict)
    names: list[str] = field(default_factory=list)

    @classmethod
    def default(cls) -> "PropertyCatalog":
        cat = cls()
        cfg = NormConfig(level=1)
        for name, tmpl in _templates().items():
            cat.names.append(name)
            forms = [tmpl]
            nslots = 2 if _C1 in constants_in_order(tmpl) else 1
            if nslots == 2:
                # both slots filled by the same constant, e.g. Inv(neg, neg)
                forms.append(subst_const(tmpl, _C1, _C0))
            for form in forms:
                pieces = theorem_pieces(form, cfg, LOGIC)
                if len(pieces) != 1:
                    raise AssertionError(f"template {name} does not normalize to one theorem")
                slots = tuple(0 if c == _C0 else 1 for c in pieces[0].order)
                cat.variants.setdefault(pieces[0].body, (name, slots, nslots))
        return cat


@dataclass
class PropertyRow:
    name: str
    constant_count: int
    theorem_count: int
    instances: set[tuple[str, ...]]


def property_report(idx: PatternIndex, catalog: PropertyCatalog | None = None) -> list[PropertyRow]:
    catalog = catalog or PropertyCatalog.default()
    found: dict[str, tuple[set, set]] = {n: (set(), set()) for n in catalog.names}
    for thm, body, consts in idx.pieces():
        hit = catalog.variants.get(body)
        if hit is None:
            continue
        name, slots, nslots = hit
        inst = [consts[slots.index(s)] if s in slots else consts[0] for s in range(nslots)]
        found[name][0].add(tuple(inst))
        found[name][1].add(thm)
    rows = []
    for name in catalog.names:
        instances, thms = found[name]
        consts = {c for inst in instances for c in inst}
        rows.append(PropertyRow(name, len(consts), len(thms), instances))
    rows.sort(key=lambda r: (-r.constant_count, -r.theorem_count, catalog.names.index(r.name)))
    return rows


def report_tsv(rows: Sequence[PropertyRow], include_empty: bool = False) -> str:
    reconstructed = sorted(r.name for r in rows if r.name in RECONSTRUCTED)
    lines = [f"# reconstructed templates: {','.join(reconstructed)}", "pattern\tconstants\ttheorems"]
    lines += [f"{r.name}\t{r.constant_count}\t{r.theorem_count}"
              for r in rows if include_empty or r.constant_count]
    return "\n".join(lines) + "\n"


def harvest_ac_constants(lib: Library, interner: Interner | None = None) -> tuple[str, ...]:
    """Constants with both an associativity and a commutativity theorem."""
    idx = build_index(lib, NormConfig(level=1), interner or Interner())
    rows = {r.name: r for r in property_report(idx)}
    asso = {inst[0] for inst in rows["Asso"].instances}
    comm = {inst[0] for inst in rows["Comm"].instances}
    return tuple(sorted(asso & comm))
