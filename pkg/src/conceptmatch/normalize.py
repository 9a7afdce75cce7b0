"""Theorem normalization before pattern extraction.

Level 0 is the identity.  Level 1 is a clausal normal form without
skolemization: implications removed, negations pushed to atoms, universal
quantifiers pulled to the front (never across an existential), disjunction
distributed over conjunction, associative/commutative logical operators
flattened and sorted, and the top-level conjunction split into separate
theorems.  Level 2 additionally flattens and sorts applications of the
configured associative-commutative constants.

Internally a formula is a tree of tuples with quantified and lambda-bound
variables opened to integer ids::

    ("c", name) ("v", id) ("app", f, x) ("lam", id, body)
    ("eq", a, b) ("ac", name, operands) ("not", a)
    ("and", children) ("or", children) ("all", ids, body) ("ex", ids, body)

Rendering back to text sorts every commutative node by the text of its
children under a concrete labelling of the variables, and each quantifier
block takes the least rendering over all orders of its binders.  Texts are
compared with constant names hidden first, so consistently renaming the
non-logical constants of a theorem leaves the order of its parts unchanged
except between parts that only differ in those names.  The result does not
depend on binder names or on the input order of commutative arguments.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Iterable, Sequence

from .term import (
    AND, EQ, EXISTS, FORALL, IMP, NOT, OR, Abs, Bound, Const,
    FreeVariableError, Term, parse_term, strip_app,
)

DEFAULT_DISTRIBUTION_CAP = 512
# Blocks with more binders use a greedy order instead of all permutations.
MAX_EXACT_BLOCK = 6


@dataclass(frozen=True)
class NormConfig:
    level: int = 1
    # None asks the caller to harvest AC constants automatically (level 2 only).
    ac_constants: tuple[str, ...] | None = ()
    distribution_size_cap: int = DEFAULT_DISTRIBUTION_CAP

    def __post_init__(self):
        if self.level not in (0, 1, 2):
            raise ValueError(f"normalization level must be 0, 1 or 2, not {self.level}")
        if self.level < 2 and self.ac_constants:
            raise ValueError("ac_constants are only used at level 2")
        if self.distribution_size_cap <= 0:
            raise ValueError("distribution_size_cap must be positive")
        if self.ac_constants is not None:
            object.__setattr__(self, "ac_constants", tuple(self.ac_constants))


class _TooBig(Exception):
    pass


def _node_size(n) -> int:
    k = n[0]
    if k in ("c", "v"):
        return 1
    if k == "app":
        return 1 + _node_size(n[1]) + _node_size(n[2])
    if k == "lam":
        return 1 + _node_size(n[2])
    if k == "eq":
        return 3 + _node_size(n[1]) + _node_size(n[2])
    if k == "not":
        return 2 + _node_size(n[1])
    if k in ("and", "or", "ac"):
        kids = n[2] if k == "ac" else n[1]
        return 3 * (len(kids) - 1) + sum(_node_size(c) for c in kids)
    # quantifier block: App(Const, Abs(...)) per binder
    return 3 * len(n[1]) + _node_size(n[2])


def _free_vars(n, acc: set) -> set:
    k = n[0]
    if k == "v":
        acc.add(n[1])
    elif k == "app":
        _free_vars(n[1], acc)
        _free_vars(n[2], acc)
    elif k in ("lam", "all", "ex"):
        _free_vars(n[2], acc)
    elif k == "eq":
        _free_vars(n[1], acc)
        _free_vars(n[2], acc)
    elif k == "not":
        _free_vars(n[1], acc)
    elif k in ("and", "or"):
        for c in n[1]:
            _free_vars(c, acc)
    elif k == "ac":
        for c in n[2]:
            _free_vars(c, acc)
    return acc


def _flat(n):
    k = n[0]
    if k in ("and", "or"):
        out = []
        for c in n[1]:
            c = _flat(c)
            if c[0] == k:
                out.extend(c[1])
            else:
                out.append(c)
        return (k, tuple(out)) if len(out) > 1 else out[0]
    if k in ("all", "ex"):
        body = _flat(n[2])
        if body[0] == k:
            return (k, n[1] + body[1], body[2])
        return (k, n[1], body)
    return n


class _Builder:
    def __init__(self, ac: Iterable[str] = (), cap: int = DEFAULT_DISTRIBUTION_CAP,
                 logic: bool = True):
        self.ac = frozenset(ac)
        self.cap = cap
        self.logic = logic
        self.counter = 0
        self.skipped: int | None = None

    def fresh(self) -> int:
        self.counter += 1
        return self.counter

    @staticmethod
    def logic_head(t: Term):
        head, args = strip_app(t)
        if isinstance(head, Const):
            name = head.name
            if name in (AND, OR, IMP) and len(args) == 2:
                return name, args
            if name == NOT and len(args) == 1:
                return name, args
            if name in (FORALL, EXISTS) and len(args) == 1 and isinstance(args[0], Abs):
                return name, args
        return None, None

    # -- term level ------------------------------------------------------------

    def term(self, t: Term, env: tuple):
        if self.logic and self.logic_head(t)[0] is not None:
            return self.formula(t, env)
        if isinstance(t, Const):
            return ("c", t.name)
        if isinstance(t, Bound):
            if t.index >= len(env):
                raise FreeVariableError(f"loose bound variable {t.index}")
            return ("v", env[-1 - t.index])
        if isinstance(t, Abs):
            v = self.fresh()
            return ("lam", v, self.term(t.body, env + (v,)))
        head, args = strip_app(t)
        if isinstance(head, Const) and len(args) == 2:
            if self.logic and head.name == EQ:
                return ("eq", self.term(args[0], env), self.term(args[1], env))
            if head.name in self.ac:
                ops: list = []
                self._collect_ac(head.name, t, env, ops)
                return ("ac", head.name, tuple(ops))
        node = self.term(head, env)
        for a in args:
            node = ("app", node, self.term(a, env))
        return node

    def _collect_ac(self, name: str, t: Term, env: tuple, ops: list) -> None:
        head, args = strip_app(t)
        if isinstance(head, Const) and head.name == name and len(args) == 2:
            self._collect_ac(name, args[0], env, ops)
            self._collect_ac(name, args[1], env, ops)
        else:
            ops.append(self.term(t, env))

    # -- formula level ------------------------------------------------------------

    def nnf(self, t: Term, env: tuple, pos: bool):
        kind, args = self.logic_head(t)
        if kind is None:
            atom = self.term(t, env)
            return atom if pos else ("not", atom)
        if kind == NOT:
            return self.nnf(args[0], env, not pos)
        if kind in (AND, OR):
            a, b = self.nnf(args[0], env, pos), self.nnf(args[1], env, pos)
            conj = (kind == AND) == pos
            return ("and" if conj else "or", (a, b))
        if kind == IMP:
            a, b = self.nnf(args[0], env, not pos), self.nnf(args[1], env, pos)
            return ("or", (a, b)) if pos else ("and", (a, b))
        v = self.fresh()
        body = self.nnf(args[0].body, env + (v,), pos)
        universal = (kind == FORALL) == pos
        return ("all" if universal else "ex", (v,), body)

    def lift(self, n) -> tuple[tuple, object]:
        """Pull universal quantifiers out of conjunctions and disjunctions."""
        k = n[0]
        if k == "all":
            vs, m = self.lift(n[2])
            return n[1] + vs, m
        if k in ("and", "or"):
            vs: tuple = ()
            kids = []
            for c in n[1]:
                cv, cm = self.lift(c)
                vs += cv
                kids.append(cm)
            return vs, (k, tuple(kids))
        if k == "ex":
            return (), ("ex", n[1], self.inner(n[2]))
        return (), n

    def inner(self, n):
        """Normalize under an existential: no quantifier is moved."""
        def quants(u):
            k = u[0]
            if k in ("and", "or"):
                return (k, tuple(quants(c) for c in u[1]))
            if k in ("all", "ex"):
                return (k, u[1], self.inner(u[2]))
            return u
        return _flat(self.cnf(quants(n)))

    def cnf(self, m):
        """Distribute disjunction over conjunction, quantifier nodes as literals."""
        original = _node_size(m)
        sizes: dict[int, int] = {}

        def lit_size(x) -> int:
            s = sizes.get(id(x))
            if s is None:
                s = sizes[id(x)] = _node_size(x)
            return s

        def clauses(u) -> list[tuple]:
            k = u[0]
            if k == "and":
                out = []
                for c in u[1]:
                    out.extend(clauses(c))
                return out
            if k == "or":
                acc: list[tuple] = [()]
                for c in u[1]:
                    cs = clauses(c)
                    acc = [a + b for a in acc for b in cs]
                    total = sum(sum(lit_size(x) for x in cl) + 3 * len(cl) for cl in acc)
                    if total > self.cap and total > original:
                        raise _TooBig(total)
                return acc
            return [(u,)]

        try:
            cls = clauses(m)
        except _TooBig as e:
            self.skipped = max(self.skipped or 0, e.args[0])
            return _flat(m)
        conj = [cl[0] if len(cl) == 1 else _flat(("or", cl)) for cl in cls]
        return conj[0] if len(conj) == 1 else _flat(("and", tuple(conj)))

    def formula(self, t: Term, env: tuple):
        n = self.nnf(t, env, True)
        vs, m = self.lift(n)
        m = _flat(self.cnf(m))
        return ("all", vs, m) if vs else m


# -- rendering -----------------------------------------------------------------

_CONNECTIVE = {"and": AND, "or": OR}
_QUANTIFIER = {"all": FORALL, "ex": EXISTS}


def _nest(op: str, parts: list[tuple[str, str]]) -> tuple[str, str]:
    parts = sorted(parts, key=_key)
    out, blind = parts[-1]
    for p, pb in reversed(parts[:-1]):
        out, blind = f"(({op} {p}) {out})", f"(({op} {pb}) {blind})"
    return out, blind


def _key(r: tuple[str, str]) -> tuple[str, str]:
    # the name-blind text decides first so renaming constants keeps the order
    return r[1], r[0]


def _render(n, labels: dict, depth: int) -> tuple[str, str]:
    """Render a node as ``(text, blind)``; ``blind`` hides constant names."""
    k = n[0]
    if k == "c":
        return n[1], "?"
    if k == "v":
        return labels[n[1]], labels[n[1]]
    if k == "app":
        f, fb = _render(n[1], labels, depth)
        x, xb = _render(n[2], labels, depth)
        return f"({f} {x})", f"({fb} {xb})"
    if k == "lam":
        labels[n[1]] = f"V{depth}"
        body, bb = _render(n[2], labels, depth + 1)
        del labels[n[1]]
        return f"(\\V{depth}. {body})", f"(\\V{depth}. {bb})"
    if k == "eq":
        (a, ab), (b, bb) = sorted((_render(n[1], labels, depth), _render(n[2], labels, depth)), key=_key)
        return f"(({EQ} {a}) {b})", f"(({EQ} {ab}) {bb})"
    if k == "not":
        a, ab = _render(n[1], labels, depth)
        return f"({NOT} {a})", f"({NOT} {ab})"
    if k in _CONNECTIVE:
        return _nest(_CONNECTIVE[k], [_render(c, labels, depth) for c in n[1]])
    if k == "ac":
        op = n[1] if isinstance(n[1], str) else labels[n[1][1]]
        return _nest(op, [_render(c, labels, depth) for c in n[2]])
    return _render_block(_QUANTIFIER[k], n[1], n[2], labels, depth)


def _render_block(q: str, vs: tuple, body, labels: dict, depth: int) -> tuple[str, str]:
    k = len(vs)
    if k <= MAX_EXACT_BLOCK:
        best = None
        for perm in permutations(vs):
            for i, v in enumerate(perm):
                labels[v] = f"V{depth + i}"
            r = _render(body, labels, depth + k)
            if best is None or _key(r) < _key(best):
                best = r
    else:
        remaining = list(vs)
        for v in remaining:
            labels[v] = "V?"
        for i in range(k):
            choice, best = None, None
            for v in remaining:
                labels[v] = f"V{depth + i}"
                r = _render(body, labels, depth + k)
                labels[v] = "V?"
                if best is None or _key(r) < _key(best):
                    choice, best = v, r
            labels[choice] = f"V{depth + i}"
            remaining.remove(choice)
    for v in vs:
        del labels[v]
    out, blind = best
    for i in reversed(range(k)):
        out = f"({q} (\\V{depth + i}. {out}))"
        blind = f"({q} (\\V{depth + i}. {blind}))"
    return out, blind


# -- patterns ------------------------------------------------------------------

# Upper bound on tied partial labellings kept while abstracting constants.
MAX_TIED_LABELLINGS = 512


def _abstract_tree(n, ids: dict):
    k = n[0]
    if k == "c":
        v = ids.get(n[1])
        return n if v is None else ("v", v)
    if k == "v":
        return n
    if k == "app":
        return ("app", _abstract_tree(n[1], ids), _abstract_tree(n[2], ids))
    if k in ("lam", "all", "ex"):
        return (k, n[1], _abstract_tree(n[2], ids))
    if k == "eq":
        return ("eq", _abstract_tree(n[1], ids), _abstract_tree(n[2], ids))
    if k == "not":
        return ("not", _abstract_tree(n[1], ids))
    if k in ("and", "or"):
        return (k, tuple(_abstract_tree(c, ids) for c in n[1]))
    op = ("v", ids[n[1]]) if n[1] in ids else n[1]
    return ("ac", op, tuple(_abstract_tree(c, ids) for c in n[2]))


def _tree_constants(n, acc: dict) -> dict:
    k = n[0]
    if k == "c":
        acc.setdefault(n[1], None)
    elif k == "app" or k == "eq":
        _tree_constants(n[1], acc)
        _tree_constants(n[2], acc)
    elif k in ("lam", "all", "ex"):
        _tree_constants(n[2], acc)
    elif k == "not":
        _tree_constants(n[1], acc)
    elif k in ("and", "or"):
        for c in n[1]:
            _tree_constants(c, acc)
    elif k == "ac":
        acc.setdefault(n[1], None)
        for c in n[2]:
            _tree_constants(c, acc)
    return acc


@dataclass(frozen=True)
class PatternPiece:
    """One normalized clause with its undefined constants abstracted.

    ``order`` lists the abstracted constants by slot.  ``index[i]`` is the
    relative index of ``order[i]``: the least slot that constant takes over
    all optimal labellings, so constants swapped by a symmetry of the clause
    share an index.
    """

    body: str
    order: tuple[str, ...]
    index: tuple[int, ...]

    @property
    def arity(self) -> int:
        return len(self.order)


def _label(tree, vids: list[int]) -> tuple[str, list[tuple[int, ...]]]:
    """Assign slots V0..V(n-1) to the abstracted variables, one slot at a
    time, keeping every choice that ties for the least rendering."""
    n = len(vids)
    frontier: list[tuple[int, ...]] = [()]
    best = None
    for i in range(n):
        best, nxt = None, []
        for partial in frontier:
            labels = {v: "V?" for v in vids}
            for j, v in enumerate(partial):
                labels[v] = f"V{j}"
            for v in vids:
                if v in partial:
                    continue
                labels[v] = f"V{i}"
                key = _key(_render(tree, labels, n))
                labels[v] = "V?"
                if best is None or key < best:
                    best, nxt = key, [partial + (v,)]
                elif key == best:
                    nxt.append(partial + (v,))
        frontier = nxt[:MAX_TIED_LABELLINGS]
    text = _render(tree, {v: f"V{j}" for j, v in enumerate(frontier[0])}, n)[0] if n else \
        _render(tree, {}, 0)[0]
    for j in reversed(range(n)):
        text = f"(\\V{j}. {text})"
    return text, frontier


def _piece(tree, defined: frozenset, b: "_Builder") -> PatternPiece:
    consts = [c for c in _tree_constants(tree, {}) if c not in defined]
    ids = {c: b.fresh() for c in consts}
    body, leaves = _label(_abstract_tree(tree, ids), list(ids.values()))
    name_of = {v: c for c, v in ids.items()}
    best_slot = {v: min(leaf.index(v) for leaf in leaves) for v in ids.values()}
    order = min(tuple(name_of[v] for v in leaf) for leaf in leaves) if consts else ()
    return PatternPiece(body, order, tuple(best_slot[ids[c]] for c in order))


# -- public API ----------------------------------------------------------------

def normalize(t: Term, cfg: NormConfig = NormConfig(), name: str | None = None,
              diagnostics: list[str] | None = None) -> list[Term]:
    """Normalize a closed theorem statement into a list of theorems.

    When distribution would exceed ``cfg.distribution_size_cap`` nodes it is
    skipped and a ``SKIP-DIST <name> <node-count>`` line is appended to
    ``diagnostics``.
    """
    return [parse_term(s) for s in normalize_text(t, cfg, name, diagnostics)]


def _clauses(t: Term, cfg: NormConfig, name: str | None, diagnostics: list[str] | None):
    ac = cfg.ac_constants or () if cfg.level == 2 else ()
    b = _Builder(ac, cfg.distribution_size_cap)
    vs, m = b.lift(b.nnf(t, (), True))
    m = _flat(b.cnf(m))
    conjuncts = m[1] if m[0] == "and" else (m,)
    out = []
    for c in conjuncts:
        fv = _free_vars(c, set())
        occ = tuple(v for v in vs if v in fv)
        out.append(("all", occ, c) if occ else c)
    if b.skipped is not None and diagnostics is not None:
        diagnostics.append(f"SKIP-DIST {name or '-'} {b.skipped}")
    return b, out


def normalize_text(t: Term, cfg: NormConfig = NormConfig(), name: str | None = None,
                   diagnostics: list[str] | None = None) -> list[str]:
    """Like :func:`normalize` but returns canonical serializations."""
    if cfg.level == 0:
        from .term import canonicalize
        return [canonicalize(t)]
    _, trees = _clauses(t, cfg, name, diagnostics)
    return sorted({_render(c, {}, 0)[0] for c in trees})


def normalize_patterns(t: Term, cfg: NormConfig, defined: Iterable[str], name: str | None = None,
                       diagnostics: list[str] | None = None) -> list[PatternPiece]:
    """Normalize ``t`` (level 1 or 2) and abstract the constants outside
    ``defined`` in each resulting theorem.

    The logical connectives, equality and the quantifiers must be defined.
    """
    if cfg.level == 0:
        raise ValueError("pattern pieces need normalization level 1 or 2")
    defined = frozenset(defined)
    missing = {AND, OR, NOT, EQ, FORALL, EXISTS} - defined
    if missing:
        raise ValueError(f"logical constants must be defined: {sorted(missing)}")
    b, trees = _clauses(t, cfg, name, diagnostics)
    pieces = {_piece(c, defined, b) for c in trees}
    return sorted(pieces, key=lambda p: (p.body, p.order))


def ac_normalize(t: Term, ac: Sequence[str]) -> Term:
    """Flatten and sort nested applications of the given AC constants."""
    if not ac:
        return t
    b = _Builder(ac, logic=False)
    return parse_term(_render(b.term(t, ()), {}, 0)[0])
