"""Strategies and independent oracles shared by the test modules."""

from __future__ import annotations

import itertools
import math
from collections import defaultdict

from hypothesis import strategies as st

from conceptmatch.ingest import Library
from conceptmatch.normalize import NormConfig, normalize_text
from conceptmatch.term import (
    AND, EQ, EXISTS, FORALL, IMP, LOGIC_SIGNATURES, NOT, OR, Abs, App, Bound, Const,
    ConstSignature, Term, Theorem, TyCon, app, conj, constants_in_order, disj, eq, exists, forall,
    fun_ty, imp, lam, neg, parse_term, rename_consts,
)

IND = "t.test.base.ind"
P = "c.test.base.P"
Q = "c.test.base.Q"
R = "c.test.base.R"
C = "c.test.base.c"
VARS = ("x", "y", "z")


def signatures() -> dict[str, ConstSignature]:
    ind, b = TyCon(IND), TyCon("t.logic.bool.bool")
    sigs = {
        P: ConstSignature(P, fun_ty(ind, b)),
        Q: ConstSignature(Q, fun_ty(ind, b)),
        R: ConstSignature(R, fun_ty(ind, ind, b)),
        C: ConstSignature(C, ind),
    }
    sigs.update(LOGIC_SIGNATURES)
    return sigs


def library(name: str, statements: list[Term], extra: dict[str, ConstSignature] | None = None) -> Library:
    thms = tuple(Theorem(f"c.{name}.thy.t{i}", s) for i, s in enumerate(statements))
    sigs = signatures()
    sigs.update(extra or {})
    used = set()
    for s in statements:
        used.update(constants_in_order(s))
    return Library(name, thms, {c: sigs[c] for c in used if c in sigs})


# -- random first-order formulas ----------------------------------------------

@st.composite
def formulas(draw, qdepth: int = 2, size: int = 4, scope: tuple[str, ...] = (),
             connectives=("and", "or", "imp", "not", "iff"), preds=(P, Q, R)):
    """Closed-once-quantified formulas over P, Q, R, = and the constant c."""
    def term():
        return Const(draw(st.sampled_from(scope))) if scope and draw(st.booleans()) else Const(C)

    kinds = ["atom"]
    if size > 0:
        kinds += list(connectives)
        if qdepth > 0:
            kinds += ["forall", "exists"]
    kind = draw(st.sampled_from(kinds))
    if kind == "atom":
        head = draw(st.sampled_from(preds + ("eq",)))
        if head == "eq":
            return eq(term(), term())
        if head == R:
            return app(Const(R), term(), term())
        return app(Const(head), term())
    sub = dict(qdepth=qdepth, size=size - 1, scope=scope, connectives=connectives, preds=preds)
    if kind == "not":
        return neg(draw(formulas(**sub)))
    if kind in ("forall", "exists"):
        v = draw(st.sampled_from(VARS))
        sub.update(qdepth=qdepth - 1, scope=tuple(dict.fromkeys(scope + (v,))))
        body = draw(formulas(**sub))
        return (forall if kind == "forall" else exists)([v], body)
    a, b = draw(formulas(**sub)), draw(formulas(**sub))
    return {"and": conj, "or": disj, "imp": imp, "iff": eq}[kind](a, b)


@st.composite
def named_lambda_terms(draw, depth: int = 4, scope: tuple[str, ...] = ()):
    """Lambda terms over named variables, as (builder tree) for renaming tests."""
    options = ["const"] + (["var"] if scope else [])
    if depth > 0:
        options += ["lam", "app"]
    kind = draw(st.sampled_from(options))
    if kind == "const":
        return ("c", draw(st.sampled_from(("c.t.a.f", "c.t.a.g", "c.t.a.k"))))
    if kind == "var":
        return ("v", draw(st.sampled_from(scope)))
    if kind == "lam":
        v = draw(st.sampled_from(("u", "v", "w")))
        return ("lam", v, draw(named_lambda_terms(depth - 1, scope + (v,))))
    return ("app", draw(named_lambda_terms(depth - 1, scope)), draw(named_lambda_terms(depth - 1, scope)))


def build_named(tree, rename=None) -> Term:
    rename = rename or {}
    k = tree[0]
    if k == "c":
        return Const(tree[1])
    if k == "v":
        return Const(rename.get(tree[1], tree[1]))
    if k == "lam":
        return lam(rename.get(tree[1], tree[1]), build_named(tree[2], rename))
    return App(build_named(tree[1], rename), build_named(tree[2], rename))


# -- semantics on a two-element domain ------------------------------------------

def interpretations():
    """Every interpretation of P, Q (unary), R (binary) and c over {0, 1}."""
    dom = (0, 1)
    unary = list(itertools.product((False, True), repeat=2))
    binary = list(itertools.product((False, True), repeat=4))
    for p, q, r, c in itertools.product(unary, unary, binary, dom):
        yield {
            P: (lambda p: lambda a: p[a])(p),
            Q: (lambda q: lambda a: q[a])(q),
            R: (lambda r: lambda a: lambda b: r[2 * a + b])(r),
            C: c,
        }


_LOGIC_SEM = {
    FORALL: lambda f: all(f(a) for a in (0, 1)),
    EXISTS: lambda f: any(f(a) for a in (0, 1)),
    AND: lambda a: lambda b: a and b,
    OR: lambda a: lambda b: a or b,
    IMP: lambda a: lambda b: (not a) or b,
    NOT: lambda a: not a,
    EQ: lambda a: lambda b: a == b,
}


def evaluate(t: Term, interp: dict, env: tuple = ()):
    if isinstance(t, Const):
        return _LOGIC_SEM[t.name] if t.name in _LOGIC_SEM else interp[t.name]
    if isinstance(t, Bound):
        return env[t.index]
    if isinstance(t, Abs):
        return lambda a: evaluate(t.body, interp, (a,) + env)
    return evaluate(t.fun, interp, env)(evaluate(t.arg, interp, env))


def closure(t: Term) -> Term:
    """Universally close the placeholder variables left free in ``t``."""
    free = [c for c in constants_in_order(t) if c in VARS]
    return forall(free, t)


# -- brute-force pattern sets and ranking --------------------------------------------

def _slot(i: int | None) -> str:
    # unpadded like the V<i> labels, so s10 sorts before s2; unlabelled sorts last
    return f"c.zz.slot.s{'?' if i is None else i}"


def _renormalized(t: Term, ren: dict[str, str], cfg: NormConfig) -> str:
    ac = tuple(ren.get(c, c) for c in cfg.ac_constants or ()) if cfg.level == 2 else ()
    sub = NormConfig(level=cfg.level, ac_constants=ac, distribution_size_cap=cfg.distribution_size_cap)
    (key,) = normalize_text(rename_consts(t, ren), sub)
    return key


def naive_relative_patterns(text: str, defined, cfg: NormConfig) -> list[tuple[str, tuple[str, int]]]:
    """Brute-force relative patterns of one normalized theorem.

    Every assignment of slot names to the undefined constants is tried and
    the theorem renormalized; the least text is the pattern key, and each
    constant gets the least slot it takes among the assignments reaching it.
    Past seven constants the slots are handed out one at a time instead, the
    rest sharing one placeholder name, keeping every tied choice.
    """
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    order: list[str] = []
    for tok in tokens:
        if tok.startswith(("c.", "µ")) and tok not in defined and tok not in order:
            order.append(tok)
    t = parse_term(text)
    if len(order) > 7:
        return _slotwise(t, order, cfg)
    best, best_perms = None, []
    for perm in itertools.permutations(range(len(order))):
        key = _renormalized(t, {c: _slot(j) for c, j in zip(order, perm)}, cfg)
        if best is None or key < best:
            best, best_perms = key, [perm]
        elif key == best:
            best_perms.append(perm)
    return [(c, (best, min(p[i] for p in best_perms))) for i, c in enumerate(order)]


def _slotwise(t: Term, order: list[str], cfg: NormConfig):
    frontier: list[dict[str, int]] = [{}]
    key = None
    for k in range(len(order)):
        scored = []
        for done in frontier:
            for c in order:
                if c in done:
                    continue
                cand = {**done, c: k}
                ren = {d: _slot(cand.get(d)) for d in order}
                scored.append((_renormalized(t, ren, cfg), cand))
        key = min(s for s, _ in scored)
        frontier = list({tuple(sorted(c.items())): c for s, c in scored if s == key}.values())
    return [(c, (key, min(f[c] for f in frontier))) for c in order]


def naive_index(lib: Library, cfg: NormConfig):
    pset: dict[str, set] = defaultdict(set)
    cset: dict[tuple, set] = defaultdict(set)
    for thm in lib.theorems:
        for text in normalize_text(thm.statement, cfg):
            for c, rp in naive_relative_patterns(text, lib.defined_constants, cfg):
                pset[c].add(rp)
                cset[rp].add(c)
    return pset, cset


def naive_rank(lib1: Library, lib2: Library, cfg: NormConfig, scheme: str):
    ps1, cs1 = naive_index(lib1, cfg)
    ps2, cs2 = naive_index(lib2, cfg)
    out = []
    for c1 in sorted(ps1):
        for c2 in sorted(ps2):
            shared = ps1[c1] & ps2[c2]
            if not shared:
                continue
            if scheme == "score0":
                s = float(len(shared))
            else:
                s = math.fsum((1 / len(cs1[p])) * (1 / len(cs2[p])) for p in shared)
                if scheme == "score2":
                    s /= math.log(2 + len(ps1[c1]) * len(ps2[c2]))
            out.append((c1, c2, s, len(shared)))
    out.sort(key=lambda r: (-r[2], r[0], r[1]))
    return out


def count_atoms(t: Term, heads) -> dict[str, int]:
    counts: dict[str, int] = defaultdict(int)

    def go(u):
        if isinstance(u, App):
            f = u
            while isinstance(f, App):
                f = f.fun
            if isinstance(f, Const) and f.name in heads:
                counts[f.name] += 1
                return
            go(u.fun)
            go(u.arg)
        elif isinstance(u, Abs):
            go(u.body)

    go(t)
    return dict(counts)

