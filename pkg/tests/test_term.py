import itertools

import pytest
from hypothesis import given, strategies as st

from conceptmatch.term import (
    EQ, FORALL, Abs, App, Bound, Const, FreeVariableError, TermSyntaxError, TyCon, TyVar,
    alpha_equal, app, canonicalize, constants_in_order, eq, forall, lam, parse_term, parse_type,
    rename_consts, subst_const,
)

from helpers import build_named, named_lambda_terms

F = Const("c.t.a.f")
MUL = Const("c.t.a.mul")
ADD = Const("c.t.a.add")


def comm(op):
    x, y = Const("x"), Const("y")
    return forall("xy", eq(app(op, x, y), app(op, y, x)))


class TestCanonicalize:
    def test_single_binder_rename(self):
        assert canonicalize(lam("x", Const("x"))) == canonicalize(lam("y", Const("y")))

    def test_idempotent_through_parse(self):
        t = comm(MUL)
        c = canonicalize(t)
        assert canonicalize(parse_term(c)) == c

    def test_two_binders_renamed(self):
        a = lam("x", lam("y", app(F, Const("x"), Const("y"))))
        b = lam("y", lam("x", app(F, Const("y"), Const("x"))))
        assert canonicalize(a) == canonicalize(b)

    def test_binders_numbered_by_binding_position(self):
        t = lam("x", lam("y", app(F, Const("y"), Const("x"))))
        assert canonicalize(t) == r"(\V0. (\V1. ((c.t.a.f V1) V0)))"

    def test_open_term_rejected(self):
        with pytest.raises(FreeVariableError):
            canonicalize(App(F, Bound(0)))

    @given(named_lambda_terms(), st.permutations(["p", "q", "r"]))
    def test_alpha_invariance(self, tree, names):
        rho = dict(zip(("u", "v", "w"), names))
        assert canonicalize(build_named(tree)) == canonicalize(build_named(tree, rho))

    @given(named_lambda_terms())
    def test_parse_round_trip(self, tree):
        t = build_named(tree)
        assert parse_term(canonicalize(t)) == t

    @given(named_lambda_terms())
    def test_matches_brute_force_alpha_oracle(self, tree):
        # every injective renaming of binder names gives the same form
        t = build_named(tree)
        forms = {canonicalize(build_named(tree, dict(zip(("u", "v", "w"), p))))
                 for p in itertools.permutations(["a", "b", "u"])}
        assert forms == {canonicalize(t)}


class TestAlphaEqual:
    def test_rename(self):
        assert alpha_equal(lam("x", Const("x")), lam("z", Const("z")))

    def test_distinct_skeletons(self):
        k = lam("x", lam("y", Const("x")))
        k2 = lam("x", lam("y", Const("y")))
        assert not alpha_equal(k, k2)

    def test_commutativity_patterns_agree(self):
        # abstracting the operator of x*y = y*x and x+y = y+x
        p1 = lam("a", rename_consts(comm(MUL), {MUL.name: "a"}))
        p2 = lam("b", rename_consts(comm(ADD), {ADD.name: "b"}))
        assert alpha_equal(p1, p2)


class TestSubst:
    def test_single_occurrence(self):
        g = Const("c.t.a.g")
        assert subst_const(App(F, Const("c.t.a.x")), F.name, g.name) == App(g, Const("c.t.a.x"))

    def test_no_occurrence_is_identity(self):
        t = App(Const("c.t.a.g"), Const("c.t.a.x"))
        assert subst_const(t, F.name, "c.t.a.h") is t

    def test_counts_occurrences(self):
        x = Const("c.t.a.x")
        t = App(F, App(F, x))
        out = subst_const(t, F.name, "µ.defined.0")

        def leaves(u, name):
            if isinstance(u, Const):
                return int(u.name == name)
            if isinstance(u, Abs):
                return leaves(u.body, name)
            if isinstance(u, App):
                return leaves(u.fun, name) + leaves(u.arg, name)
            return 0

        assert leaves(out, F.name) == 0
        assert leaves(out, "µ.defined.0") == leaves(t, F.name) == 2
        assert out == App(Const("µ.defined.0"), App(Const("µ.defined.0"), x))

    @given(named_lambda_terms(), st.sampled_from(["c.t.a.f", "c.t.a.g", "c.t.a.zz"]))
    def test_properties(self, tree, old):
        t = build_named(tree)
        out = subst_const(t, old, "c.t.a.new")
        assert old not in constants_in_order(out)
        if old not in constants_in_order(t):
            assert out == t


class TestConstantsInOrder:
    def test_reflexivity(self):
        x = Const("x")
        assert constants_in_order(forall("x", eq(x, x))) == [FORALL, EQ]

    def test_constant_free(self):
        assert constants_in_order(lam("x", Const("x"))) == []

    def test_commutativity(self):
        assert constants_in_order(comm(MUL)) == [FORALL, EQ, MUL.name]

    @given(named_lambda_terms())
    def test_no_duplicates(self, tree):
        cs = constants_in_order(build_named(tree))
        assert len(cs) == len(set(cs))


class TestParse:
    def test_exchange_example(self):
        t = parse_term(r"cHOL4.bool.! (\V0. ((cHOL4.min.= V0) V0))")
        assert t == App(Const("cHOL4.bool.!"),
                        Abs(App(App(Const("cHOL4.min.="), Bound(0)), Bound(0))))

    def test_type_example(self):
        assert parse_type("tHOL4.pair.prod(tHOL4.num.num,Aa)") == \
            TyCon("tHOL4.pair.prod", (TyCon("tHOL4.num.num"), TyVar(0)))

    @pytest.mark.parametrize("bad", ["(c.a.b.f", "V3", r"(\V0. V1)", "()", ""])
    def test_rejects(self, bad):
        with pytest.raises((TermSyntaxError, FreeVariableError)):
            parse_term(bad)
