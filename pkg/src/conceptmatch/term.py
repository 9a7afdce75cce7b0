"""Lambda terms over named constants, with de Bruijn bound variables.

Terms are immutable.  The canonical form of a closed term is its prefix
serialization in the exchange syntax, with every bound variable written as
``V<n>`` where ``n`` is the binding position (number of enclosing binders
of its lambda).  Two closed terms are alpha-equivalent iff their canonical
forms are equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Union


class FreeVariableError(ValueError):
    """A term that should be closed has a dangling bound variable."""


@dataclass(frozen=True, slots=True)
class Const:
    name: str


@dataclass(frozen=True, slots=True)
class Bound:
    index: int


@dataclass(frozen=True, slots=True)
class Abs:
    body: "Term"


@dataclass(frozen=True, slots=True)
class App:
    fun: "Term"
    arg: "Term"


Term = Union[Const, Bound, Abs, App]


@dataclass(frozen=True, slots=True)
class TyVar:
    id: int

    def __str__(self) -> str:
        return f"A{self.id}"


@dataclass(frozen=True, slots=True)
class TyCon:
    name: str
    args: tuple = ()

    def __str__(self) -> str:
        if not self.args:
            return self.name
        return f"{self.name}({','.join(str(a) for a in self.args)})"


Type = Union[TyVar, TyCon]


@dataclass(frozen=True, slots=True)
class ConstSignature:
    name: str
    ty: Type


@dataclass(frozen=True, slots=True)
class Theorem:
    name: str
    statement: Term


# Canonical logical basis.  Every library is mapped onto these names.
FORALL = "c.logic.bool.forall"
EXISTS = "c.logic.bool.exists"
AND = "c.logic.bool.and"
OR = "c.logic.bool.or"
IMP = "c.logic.bool.imp"
NOT = "c.logic.bool.not"
EQ = "c.logic.bool.eq"
LOGIC = frozenset({FORALL, EXISTS, AND, OR, IMP, NOT, EQ})

BOOL = "t.logic.bool.bool"
FUN = "t.logic.bool.fun"
BASE_TYPES = frozenset({BOOL, FUN})


def fun_ty(*tys: Type) -> Type:
    """Curried function type ``t1 -> t2 -> ... -> tn``."""
    out = tys[-1]
    for t in reversed(tys[:-1]):
        out = TyCon(FUN, (t, out))
    return out


_A = TyVar(0)
_B = TyCon(BOOL)
LOGIC_SIGNATURES = {
    FORALL: ConstSignature(FORALL, fun_ty(fun_ty(_A, _B), _B)),
    EXISTS: ConstSignature(EXISTS, fun_ty(fun_ty(_A, _B), _B)),
    AND: ConstSignature(AND, fun_ty(_B, _B, _B)),
    OR: ConstSignature(OR, fun_ty(_B, _B, _B)),
    IMP: ConstSignature(IMP, fun_ty(_B, _B, _B)),
    NOT: ConstSignature(NOT, fun_ty(_B, _B)),
    EQ: ConstSignature(EQ, fun_ty(_A, _A, _B)),
}


# -- construction helpers ---------------------------------------------------

def app(f: Term, *args: Term) -> Term:
    for a in args:
        f = App(f, a)
    return f


def strip_app(t: Term) -> tuple[Term, list[Term]]:
    """Split ``f a1 ... an`` into ``(f, [a1, ..., an])``."""
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


def abstract(t: Term, names: Sequence[str]) -> Term:
    """Bind the constants ``names`` by fresh leading lambdas.

    ``names[0]`` becomes the outermost binder.  Works on open terms too:
    existing loose indices are shifted past the new binders.
    """
    m = len(names)
    if m == 0:
        return t
    slot = {n: i for i, n in enumerate(names)}

    def go(u: Term, depth: int) -> Term:
        if isinstance(u, Const):
            i = slot.get(u.name)
            return u if i is None else Bound(depth + m - 1 - i)
        if isinstance(u, Bound):
            return u if u.index < depth else Bound(u.index + m)
        if isinstance(u, Abs):
            return Abs(go(u.body, depth + 1))
        return App(go(u.fun, depth), go(u.arg, depth))

    body = go(t, 0)
    for _ in range(m):
        body = Abs(body)
    return body


def lam(var: str, body: Term) -> Term:
    """``\\var. body`` where ``var`` occurs in body as ``Const(var)``."""
    return abstract(body, [var])


def forall(vars_: Iterable[str], body: Term) -> Term:
    for v in reversed(list(vars_)):
        body = App(Const(FORALL), lam(v, body))
    return body


def exists(vars_: Iterable[str], body: Term) -> Term:
    for v in reversed(list(vars_)):
        body = App(Const(EXISTS), lam(v, body))
    return body


def eq(a: Term, b: Term) -> Term:
    return app(Const(EQ), a, b)


def conj(a: Term, b: Term) -> Term:
    return app(Const(AND), a, b)


def disj(a: Term, b: Term) -> Term:
    return app(Const(OR), a, b)


def imp(a: Term, b: Term) -> Term:
    return app(Const(IMP), a, b)


def neg(a: Term) -> Term:
    return App(Const(NOT), a)


# -- traversal ----------------------------------------------------------------

def iter_consts(t: Term) -> Iterator[str]:
    """Constant names in top-to-bottom, left-to-right order (with repeats)."""
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Const):
            yield u.name
        elif isinstance(u, App):
            stack.append(u.arg)
            stack.append(u.fun)
        elif isinstance(u, Abs):
            stack.append(u.body)


def constants_in_order(t: Term) -> list[str]:
    return list(dict.fromkeys(iter_consts(t)))


def size(t: Term) -> int:
    n = 0
    stack = [t]
    while stack:
        u = stack.pop()
        n += 1
        if isinstance(u, App):
            stack.append(u.arg)
            stack.append(u.fun)
        elif isinstance(u, Abs):
            stack.append(u.body)
    return n


def is_closed(t: Term) -> bool:
    def go(u: Term, depth: int) -> bool:
        if isinstance(u, Bound):
            return u.index < depth
        if isinstance(u, Abs):
            return go(u.body, depth + 1)
        if isinstance(u, App):
            return go(u.fun, depth) and go(u.arg, depth)
        return True

    return go(t, 0)


def rename_consts(t: Term, mapping: dict[str, str]) -> Term:
    """Simultaneous renaming of constants; untouched subterms are shared."""
    if not mapping:
        return t

    def go(u: Term) -> Term:
        if isinstance(u, Const):
            new = mapping.get(u.name)
            return u if new is None else Const(new)
        if isinstance(u, App):
            f, a = go(u.fun), go(u.arg)
            return u if (f is u.fun and a is u.arg) else App(f, a)
        if isinstance(u, Abs):
            b = go(u.body)
            return u if b is u.body else Abs(b)
        return u

    return go(t)


def subst_const(t: Term, old: str, new: str) -> Term:
    return rename_consts(t, {old: new})


# -- canonical form -------------------------------------------------------------

def canonicalize(t: Term) -> str:
    """Flat prefix serialization; binders numbered by binding position."""
    out: list[str] = []

    def go(u: Term, depth: int) -> None:
        if isinstance(u, Const):
            out.append(u.name)
        elif isinstance(u, Bound):
            if u.index >= depth:
                raise FreeVariableError(f"loose bound variable {u.index} at depth {depth}")
            out.append(f"V{depth - 1 - u.index}")
        elif isinstance(u, Abs):
            out.append(f"(\\V{depth}. ")
            go(u.body, depth + 1)
            out.append(")")
        else:
            out.append("(")
            go(u.fun, depth)
            out.append(" ")
            go(u.arg, depth)
            out.append(")")

    go(t, 0)
    return "".join(out)


def alpha_equal(t1: Term, t2: Term) -> bool:
    return canonicalize(t1) == canonicalize(t2)


class TermSyntaxError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at column {pos + 1}")
        self.pos = pos


_DELIMS = frozenset(" \t()")


def _tokens(text: str) -> Iterator[tuple[str, int]]:
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in " \t":
            i += 1
        elif ch == ")":
            yield ")", i
            i += 1
        elif ch == "(":
            if text.startswith("(\\", i):
                j = i + 2
                while j < n and text[j] not in _DELIMS:
                    j += 1
                var = text[i + 2:j]
                if not (var.endswith(".") and var[:-1]):
                    raise TermSyntaxError("malformed binder", i)
                yield "\\" + var[:-1], i
                i = j
            else:
                yield "(", i
                i += 1
        else:
            j = i
            while j < n and text[j] not in _DELIMS:
                j += 1
            yield text[i:j], i
            i = j


def _is_var(tok: str) -> bool:
    return len(tok) > 1 and tok[0] == "V" and tok[1:].isdigit()


def parse_term(text: str) -> Term:
    """Parse the exchange term syntax.

    Binder variables are resolved by name to the innermost enclosing binder,
    so any numbering is accepted; ``canonicalize`` renumbers by position.
    Any non-variable token is taken as a constant name.
    """
    toks = list(_tokens(text))
    pos = 0

    def expect(kind: str) -> int:
        nonlocal pos
        if pos >= len(toks) or toks[pos][0] != kind:
            at = toks[pos][1] if pos < len(toks) else len(text)
            raise TermSyntaxError(f"expected {kind!r}", at)
        pos += 1
        return toks[pos - 1][1]

    def seq(env: list[str]) -> Term:
        # juxtaposition is left-associative application
        t = term(env)
        while pos < len(toks) and toks[pos][0] != ")":
            t = App(t, term(env))
        return t

    def term(env: list[str]) -> Term:
        nonlocal pos
        if pos >= len(toks):
            raise TermSyntaxError("unexpected end of term", len(text))
        tok, at = toks[pos]
        pos += 1
        if tok == "(":
            t = seq(env)
            expect(")")
            return t
        if tok.startswith("\\"):
            var = tok[1:]
            if not _is_var(var):
                raise TermSyntaxError(f"bad binder variable {var!r}", at)
            body = seq(env + [var])
            expect(")")
            return Abs(body)
        if tok == ")":
            raise TermSyntaxError("unexpected ')'", at)
        if _is_var(tok):
            for k in range(len(env) - 1, -1, -1):
                if env[k] == tok:
                    return Bound(len(env) - 1 - k)
            raise FreeVariableError(f"unbound variable {tok} at column {at + 1}")
        return Const(tok)

    t = seq([])
    if pos != len(toks):
        raise TermSyntaxError("trailing input", toks[pos][1])
    return t


# -- types ----------------------------------------------------------------------

def type_atoms(ty: Type) -> Iterator[Type]:
    """Pre-order walk over type constructors and variables."""
    yield ty
    if isinstance(ty, TyCon):
        for a in ty.args:
            yield from type_atoms(a)


def rename_tycons(ty: Type, mapping: dict[str, str]) -> Type:
    if isinstance(ty, TyVar) or not mapping:
        return ty
    return TyCon(mapping.get(ty.name, ty.name), tuple(rename_tycons(a, mapping) for a in ty.args))


def renumber_tyvars(ty: Type) -> Type:
    """Number type variables by first occurrence."""
    seen: dict[int, int] = {}

    def go(t: Type) -> Type:
        if isinstance(t, TyVar):
            return TyVar(seen.setdefault(t.id, len(seen)))
        return TyCon(t.name, tuple(go(a) for a in t.args))

    return go(ty)


def parse_type(text: str) -> Type:
    """Parse ``qname``, ``qname(t1,...,tn)`` or a type variable ``A<id>``.

    Variables may carry any alphanumeric id (``Aa``, ``A0``); they are
    renumbered by first occurrence.
    """
    pos = 0
    names: dict[str, int] = {}

    def atom() -> Type:
        nonlocal pos
        j = pos
        while j < len(text) and text[j] not in "(),":
            j += 1
        tok = text[pos:j].strip()
        if not tok:
            raise TermSyntaxError("expected type", pos)
        pos = j
        if tok[0] == "A" and tok[1:].isalnum():
            return TyVar(names.setdefault(tok, len(names)))
        if pos < len(text) and text[pos] == "(":
            pos += 1
            args = [atom()]
            while pos < len(text) and text[pos] == ",":
                pos += 1
                args.append(atom())
            if pos >= len(text) or text[pos] != ")":
                raise TermSyntaxError("expected ')'", pos)
            pos += 1
            return TyCon(tok, tuple(args))
        return TyCon(tok)

    ty = atom()
    if pos != len(text):
        raise TermSyntaxError("trailing input in type", pos)
    return ty
