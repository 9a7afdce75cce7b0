"""Synthetic twin libraries with a known renaming between them.

One base library is generated from property templates and random
well-typed filler formulas.  The twin is the same library with every
constant (and optionally every type) renamed and the theorems shuffled;
a ``noise`` fraction of each side is replaced by theorems only that side
has.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .ingest import Library, serialize_library
from .term import (
    BOOL, LOGIC, LOGIC_SIGNATURES, Const, ConstSignature, Term, Theorem,
    TyCon, TyVar, Type, app, conj, constants_in_order, disj, eq, exists, forall,
    fun_ty, imp, neg, rename_consts, rename_tycons,
)

DEFAULT_MIX = {
    "comm": 1.0, "assoc": 1.0, "inj": 1.0, "neutr": 1.0, "inv": 1.0,
    "refl": 0.5, "trans": 0.5, "filler": 8.0,
}
KINDS = ("binop", "unop", "pred", "rel", "elem", "conv", "poly")
_KIND_WEIGHTS = (3, 3, 2, 2, 2, 2, 1)


@dataclass
class GenConfig:
    seed: int = 0
    n_constants: int = 50
    n_theorems: int = 300
    property_mix: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_MIX))
    noise: float = 0.0
    rename_types: bool = True
    n_types: int | None = None
    max_depth: int = 6

    def __post_init__(self):
        if not 0.0 <= self.noise <= 1.0:
            raise ValueError("noise must lie in [0, 1]")
        if self.n_constants < 0 or self.n_theorems < 0:
            raise ValueError("counts must be non-negative")
        if any(w < 0 for w in self.property_mix.values()):
            raise ValueError("property frequencies must be non-negative")
        unknown = set(self.property_mix) - set(DEFAULT_MIX)
        if unknown:
            raise ValueError(f"unknown property templates {sorted(unknown)}")
        if self.max_depth < 1:
            raise ValueError("max_depth must be positive")


@dataclass
class Twins:
    lib1: Library
    lib2: Library
    truth: dict[str, str]
    type_truth: dict[str, str]


@dataclass
class _Sym:
    name: str
    kind: str
    sorts: tuple[str, ...]  # argument sorts then result sort ("bool" for predicates)


class _Gen:
    def __init__(self, cfg: GenConfig, rng: random.Random):
        self.cfg = cfg
        self.rng = rng
        n_types = cfg.n_types or max(2, cfg.n_constants // 6)
        self.sorts = [f"t.twinA.types.s{i}" for i in range(n_types)]
        self.syms = [self.symbol(f"c.twinA.base.k{i}") for i in range(cfg.n_constants)]
        self._index()
        self._var = 0

    def _index(self) -> None:
        self.by_result: dict[str, list[_Sym]] = {}
        for sym in self.syms:
            self.by_result.setdefault(sym.sorts[-1], []).append(sym)

    def symbol(self, name: str) -> _Sym:
        rng = self.rng
        kind = rng.choices(KINDS, _KIND_WEIGHTS)[0]
        s = rng.choice(self.sorts)
        if kind == "binop":
            sym = _Sym(name, kind, (s, s, s))
        elif kind == "unop":
            sym = _Sym(name, kind, (s, s))
        elif kind == "pred":
            sym = _Sym(name, kind, (s, BOOL))
        elif kind == "rel":
            sym = _Sym(name, kind, (s, s, BOOL))
        elif kind == "elem":
            sym = _Sym(name, kind, (s,))
        elif kind == "conv":
            sym = _Sym(name, kind, (s, rng.choice(self.sorts)))
        else:
            # polymorphic size-like function: A0 -> s
            sym = _Sym(name, kind, ("*", s))
        return sym

    def signature(self, sym: _Sym) -> ConstSignature:
        tys: list[Type] = [TyVar(0) if s == "*" else TyCon(s) for s in sym.sorts]
        return ConstSignature(sym.name, fun_ty(*tys))

    def of_kind(self, *kinds: str) -> list[_Sym]:
        return [s for s in self.syms if s.kind in kinds]

    def fresh(self) -> str:
        self._var += 1
        return f"x{self._var}"

    # -- random terms ----------------------------------------------------------

    def term(self, sort: str, scope: list[tuple[str, str]], depth: int) -> Term:
        rng = self.rng
        vars_ = [Const(v) for v, s in scope if s == sort]
        elems = [Const(s.name) for s in self.by_result.get(sort, []) if s.kind == "elem"]
        makers = [s for s in self.by_result.get(sort, []) if s.kind != "elem"]
        if depth <= 1 or not makers or rng.random() < 0.4:
            leaves = vars_ + elems
            if leaves:
                return rng.choice(leaves)
            if depth <= 1 or not makers:
                v = self.fresh()
                scope.append((v, sort))
                return Const(v)
        return self.apply(rng.choice(makers), scope, depth - 1)

    def apply(self, sym: _Sym, scope, depth: int) -> Term:
        args = []
        for s in sym.sorts[:-1]:
            if s == "*":
                s = self.rng.choice(self.sorts)
            args.append(self.term(s, scope, depth))
        return app(Const(sym.name), *args)

    def atom(self, scope, focus: _Sym | None = None) -> Term:
        rng = self.rng
        depth = min(rng.randint(1, 2), self.cfg.max_depth)
        sym = focus or rng.choice(self.syms)
        if sym.sorts[-1] == BOOL:
            return self.apply(sym, scope, depth)
        lhs = self.apply(sym, scope, depth)
        result = sym.sorts[-1]
        return eq(lhs, self.term(result, scope, depth))

    def filler(self, focus: _Sym) -> Term:
        rng = self.rng
        scope: list[tuple[str, str]] = []
        for _ in range(rng.randint(1, 3)):
            scope.append((self.fresh(), rng.choice(self.sorts)))
        atoms = [self.atom(scope, focus)]
        for _ in range(rng.randint(0, 2)):
            atoms.append(self.atom(scope))
        body = atoms[0]
        for a in atoms[1:]:
            body = rng.choice((conj, disj, imp))(body, a) if rng.random() < 0.85 else conj(body, neg(a))
        used = set(constants_in_order(body))
        bound = [v for v, _ in scope if v in used]
        if rng.random() < 0.1 and len(bound) > 1:
            return forall(bound[:-1], exists(bound[-1:], body))
        return forall(bound, body)

    # -- property templates --------------------------------------------------------

    def template(self, kind: str) -> Term | None:
        rng = self.rng
        x, y, z = Const("x"), Const("y"), Const("z")
        if kind == "comm":
            ops = self.of_kind("binop", "rel")
            if ops:
                f = Const(rng.choice(ops).name)
                return forall("xy", eq(app(f, x, y), app(f, y, x)))
        elif kind == "assoc":
            ops = self.of_kind("binop")
            if ops:
                f = Const(rng.choice(ops).name)
                return forall("xyz", eq(app(f, app(f, x, y), z), app(f, x, app(f, y, z))))
        elif kind == "inj":
            ops = self.of_kind("unop", "conv")
            if ops:
                f = Const(rng.choice(ops).name)
                return forall("xy", imp(eq(app(f, x), app(f, y)), eq(x, y)))
        elif kind == "neutr":
            ops = self.of_kind("binop")
            if ops:
                op = rng.choice(ops)
                elems = [s for s in self.by_result.get(op.sorts[-1], []) if s.kind == "elem"]
                if elems:
                    e = Const(rng.choice(elems).name)
                    return forall("x", eq(app(Const(op.name), e, x), x))
        elif kind == "inv":
            for _ in range(8):
                f = rng.choice(self.of_kind("unop", "conv") or [None])
                if f is None:
                    return None
                back = [g for g in self.of_kind("unop", "conv")
                        if g.sorts == (f.sorts[1], f.sorts[0])]
                if back:
                    g = rng.choice(back)
                    return forall("x", eq(app(Const(f.name), app(Const(g.name), x)), x))
        elif kind == "refl":
            rels = self.of_kind("rel")
            if rels:
                return forall("x", app(Const(rng.choice(rels).name), x, x))
        elif kind == "trans":
            rels = self.of_kind("rel")
            if rels:
                r = Const(rng.choice(rels).name)
                return forall("xyz", imp(conj(app(r, x, y), app(r, y, z)), app(r, x, z)))
        return None

    def theorem(self, i: int, focus: list[_Sym] | None = None) -> Term:
        mix = self.cfg.property_mix
        kinds = [k for k, w in mix.items() if w > 0]
        weights = [mix[k] for k in kinds]
        if kinds:
            kind = self.rng.choices(kinds, weights)[0]
            if kind != "filler":
                t = self.template(kind)
                if t is not None:
                    return t
        # filler cycles its focus constant so every constant gets theorems
        focus = focus or self.syms
        return self.filler(focus[i % len(focus)])

    def side_theorems(self, start: int, count: int, extra: list[_Sym]) -> list[Term]:
        """Theorems of one side only; ``extra`` symbols exist on this side alone."""
        base = self.syms
        self.syms = base + extra
        self._index()
        out = [self.theorem(start + i, extra or None) if i % 2 == 0 else self.theorem(start + i)
               for i in range(count)]
        self.syms = base
        self._index()
        return out


def _library(name: str, thms: list[Theorem], sigs: dict[str, ConstSignature]) -> Library:
    used: set[str] = set()
    for t in thms:
        used.update(constants_in_order(t.statement))
    constants = {n: s for n, s in sigs.items() if n in used}
    for c in sorted(used & LOGIC):
        constants[c] = LOGIC_SIGNATURES[c]
    return Library(name, tuple(thms), constants)


def generate_twins(cfg: GenConfig) -> Twins:
    rng = random.Random(cfg.seed)
    if cfg.n_constants == 0 or cfg.n_theorems == 0:
        return Twins(Library("twinA"), Library("twinB"), {}, {})
    gen = _Gen(cfg, rng)
    n_unique = round(cfg.noise * cfg.n_theorems)
    n_shared = cfg.n_theorems - n_unique
    n_extra = round(cfg.noise * cfg.n_constants)
    extra1 = [gen.symbol(f"c.twinA.base.e{i}") for i in range(n_extra)]
    extra2 = [gen.symbol(f"c.twinA.base.f{i}") for i in range(n_extra)]
    shared = [gen.theorem(i) for i in range(n_shared)]
    only1 = gen.side_theorems(n_shared, n_unique, extra1)
    only2 = gen.side_theorems(n_shared, n_unique, extra2)

    # renaming: constants get shuffled ids so names carry no ordering hint
    ids = list(range(len(gen.syms)))
    rng.shuffle(ids)
    truth = {s.name: f"c.twinB.other.m{j}" for s, j in zip(gen.syms, ids)}
    # side-only constants of the twin: renamed but absent from the truth
    rename2 = dict(truth)
    rename2.update((s.name, f"c.twinB.other.m{len(ids) + j}") for j, s in enumerate(extra2))
    tids = list(range(len(gen.sorts)))
    rng.shuffle(tids)
    if cfg.rename_types:
        type_truth = {s: f"t.twinB.kinds.u{j}" for s, j in zip(gen.sorts, tids)}
    else:
        type_truth = {s: s for s in gen.sorts}

    sigs1 = {s.name: gen.signature(s) for s in gen.syms + extra1}
    sigs2 = {rename2[s.name]: ConstSignature(rename2[s.name], rename_tycons(gen.signature(s).ty, type_truth))
             for s in gen.syms + extra2}

    thms1 = [Theorem(f"c.twinA.base.thm{i}", t) for i, t in enumerate(shared + only1)]
    thms2 = [Theorem(f"c.twinB.other.fact{i}", rename_consts(t, rename2))
             for i, t in enumerate(shared + only2)]
    rng.shuffle(thms2)
    thms2 = [Theorem(f"c.twinB.other.fact{i}", t.statement) for i, t in enumerate(thms2)]
    return Twins(_library("twinA", thms1, sigs1), _library("twinB", thms2, sigs2),
                 truth, type_truth if cfg.rename_types else {})


def truth_tsv(twins: Twins) -> str:
    lines = [f"{a}\t{b}" for a, b in twins.truth.items()]
    lines += [f"{a}\t{b}" for a, b in twins.type_truth.items()]
    return "".join(line + "\n" for line in lines)


def read_truth(text: str) -> dict[str, str]:
    out = {}
    for line in text.splitlines():
        if line.strip() and not line.startswith("#"):
            a, b = line.split("\t")[:2]
            out[a] = b
    return out


def matchable(twins: Twins) -> set[str]:
    """Truth entries whose constants occur on both sides."""
    used1, used2 = twins.lib1.constants_used(), twins.lib2.constants_used()
    return {a for a, b in twins.truth.items() if a in used1 and b in used2}


def write_twins(twins: Twins) -> tuple[str, str, str]:
    return serialize_library(twins.lib1), serialize_library(twins.lib2), truth_tsv(twins)
