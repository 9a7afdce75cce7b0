import math

import pytest
from hypothesis import given, settings, strategies as st

from conceptmatch.corpusgen import GenConfig, generate_twins
from conceptmatch.ingest import Library
from conceptmatch.normalize import NormConfig
from conceptmatch.pattern import Interner, _templates, build_index, relative_patterns
from conceptmatch.scoring import (
    SCHEMES, ScoreConfig, UnknownPatternError, rank_pairs, score_pair, shared_patterns, weight,
)
from conceptmatch.term import LOGIC, Const, app, eq, forall, rename_consts

from helpers import library, naive_rank

N1 = NormConfig(level=1)
x, y = Const("x"), Const("y")


def comm(op: str):
    f = Const(op)
    return forall("xy", eq(app(f, x, y), app(f, y, x)))


def instances(op: str, names):
    tm = _templates()
    return [rename_consts(tm[n], {"c.template.slot.c0": op}) for n in names]


def indices(stmts1, stmts2, cfg=N1):
    interner = Interner()
    return (build_index(library("l1", stmts1), cfg, interner),
            build_index(library("l2", stmts2), cfg, interner))


def small_twins(seed, n_const, n_thm, noise):
    return generate_twins(GenConfig(seed=seed, n_constants=n_const, n_theorems=n_thm, noise=noise))


twin_params = st.tuples(st.integers(0, 10_000), st.integers(2, 15), st.integers(1, 50),
                        st.sampled_from([0.0, 0.2, 0.5]))


class TestWeight:
    def test_w0_is_one(self):
        i1, _ = indices([comm("c.t.a.f"), comm("c.t.a.g")], [])
        (pid,) = i1.pset["c.t.a.f"]
        assert weight(i1, pid, "w0") == 1

    def test_w1_singleton(self):
        i1, _ = indices([comm("c.t.a.f")], [])
        (pid,) = i1.pset["c.t.a.f"]
        assert weight(i1, pid, "w1") == 1

    def test_w1_four_constants(self):
        i1, _ = indices([comm(f"c.t.a.f{i}") for i in range(4)], [])
        (pid,) = i1.pset["c.t.a.f0"]
        assert weight(i1, pid, "w1") == 0.25
        (rp,) = [rp for _, rp in relative_patterns(comm("c.t.a.f0"), LOGIC)]
        assert weight(i1, rp, "w1") == 0.25

    def test_unknown_pattern(self):
        i1, _ = indices([comm("c.t.a.f")], [])
        with pytest.raises(UnknownPatternError):
            weight(i1, 10_000, "w1")


class TestScorePair:
    def test_disjoint(self):
        i1, i2 = indices(instances("c.t.a.f", ["Comm"]), instances("c.t.a.g", ["Refl"]))
        for s in SCHEMES:
            assert score_pair("c.t.a.f", "c.t.a.g", i1, i2, ScoreConfig(s)).score == 0

    def test_single_shared_pattern(self):
        i1, i2 = indices([comm("c.t.a.f")], [comm("c.t.a.g")])
        assert score_pair("c.t.a.f", "c.t.a.g", i1, i2, ScoreConfig("score1")).score == 1
        s2 = score_pair("c.t.a.f", "c.t.a.g", i1, i2, ScoreConfig("score2")).score
        assert abs(s2 - 1 / math.log(3)) < 1e-12

    def test_score0_counts_shared(self):
        names = ["Inj", "Asso", "Comm", "Refl", "Lcomm", "Idempo", "Trans"]
        i1, i2 = indices(instances("c.t.a.f", names), instances("c.t.a.g", names))
        sp = score_pair("c.t.a.f", "c.t.a.g", i1, i2, ScoreConfig("score0"))
        assert sp.score == 7 and sp.shared_count == 7

    def test_unknown_scheme(self):
        with pytest.raises(ValueError):
            ScoreConfig("score3")

    @settings(max_examples=25, deadline=None)
    @given(twin_params)
    def test_symmetry_and_bounds(self, params):
        tw = small_twins(*params)
        interner = Interner()
        i1, i2 = build_index(tw.lib1, N1, interner), build_index(tw.lib2, N1, interner)
        for (c1, c2) in list(shared_patterns(i1, i2))[:40]:
            s = {sch: score_pair(c1, c2, i1, i2, ScoreConfig(sch)).score for sch in SCHEMES}
            for sch in SCHEMES:
                assert score_pair(c2, c1, i2, i1, ScoreConfig(sch)).score == s[sch]
            assert s["score0"] >= s["score1"] >= s["score2"] * math.log(3) * (1 - 1e-12)


class TestRanking:
    @settings(max_examples=25, deadline=None)
    @given(twin_params, st.sampled_from(SCHEMES))
    def test_matches_brute_force(self, params, scheme):
        tw = small_twins(*params)
        interner = Interner()
        i1, i2 = build_index(tw.lib1, N1, interner), build_index(tw.lib2, N1, interner)
        got = [(p.c1, p.c2, p.score, p.shared_count) for p in rank_pairs(i1, i2, ScoreConfig(scheme))]
        assert got == naive_rank(tw.lib1, tw.lib2, N1, scheme)

    def test_renamed_copy_diagonal_on_top(self):
        tw = small_twins(7, 15, 80, 0.0)
        interner = Interner()
        i1, i2 = build_index(tw.lib1, N1, interner), build_index(tw.lib2, N1, interner)
        ranking = rank_pairs(i1, i2)
        top = ranking[:5]
        assert all(tw.truth[p.c1] == p.c2 for p in top)

    def test_single_shared_pattern_single_entry(self):
        i1, i2 = indices([comm("c.t.a.f")], [comm("c.t.a.g")])
        assert [(p.c1, p.c2) for p in rank_pairs(i1, i2)] == [("c.t.a.f", "c.t.a.g")]

    def test_score2_prefers_fewer_patterns(self):
        # both pairs share only Comm with score1 = 1/2; h has an extra pattern
        s1 = [comm("c.t.a.f"), comm("c.t.a.h")] + instances("c.t.a.h", ["Refl"])
        s2 = [comm("c.t.a.g")]
        i1, i2 = indices(s1, s2)
        ranking = rank_pairs(i1, i2, ScoreConfig("score2"))
        assert [p.c1 for p in ranking] == ["c.t.a.f", "c.t.a.h"]
        assert rank_pairs(i1, i2, ScoreConfig("score1"))[0].score == ranking[0].score * math.log(3)

    def test_ties_broken_by_names(self):
        i1, i2 = indices([comm("c.t.a.b"), comm("c.t.a.a")], [comm("c.t.a.d"), comm("c.t.a.c")])
        assert [(p.c1, p.c2) for p in rank_pairs(i1, i2)] == [
            ("c.t.a.a", "c.t.a.c"), ("c.t.a.a", "c.t.a.d"), ("c.t.a.b", "c.t.a.c"), ("c.t.a.b", "c.t.a.d")]

    @settings(max_examples=20, deadline=None)
    @given(twin_params, st.integers(0, 10_000))
    def test_unshared_theorems_keep_score0(self, params, seed):
        tw = small_twins(*params)
        interner = Interner()
        i1, i2 = build_index(tw.lib1, N1, interner), build_index(tw.lib2, N1, interner)
        before = {(p.c1, p.c2): p.score for p in rank_pairs(i1, i2, ScoreConfig("score0"))}
        # theorems about brand new constants share no pattern with the other side
        extra = [forall("xy", eq(app(Const(f"c.zz.new.k{seed}_{i}"), x, y), x)) for i in range(3)]
        lib2 = Library(tw.lib2.name, tw.lib2.theorems + tuple(library("e", extra).theorems),
                       tw.lib2.constants)
        i2b = build_index(lib2, N1, interner)
        after = {(p.c1, p.c2): p.score for p in rank_pairs(i1, i2b, ScoreConfig("score0"))}
        assert {k: v for k, v in after.items() if k in before} == before
