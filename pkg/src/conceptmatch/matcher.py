"""Single-pass and iterative greedy matching of constants across two libraries."""

from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Mapping

from .ingest import Library
from .normalize import NormConfig
from .pattern import (
    Interner, PatternIndex, build_index, harvest_ac_constants, match_type_patterns,
    type_pattern,
)
from .scoring import ScoreConfig, combine, score_candidates, shared_patterns
from .term import ConstSignature, Theorem, TyCon, rename_tycons, subst_const

log = logging.getLogger(__name__)

MODES = ("single_pass", "iterative")
FRESH_CONST = "µ.defined.{}"
FRESH_TYPE = "µ.type.{}"
# Shrunk patterns shared by more pairs than this raise a global slack
# instead of rescoring every pair.
SLACK_PAIRS = 64


@dataclass(frozen=True)
class MatchConfig:
    norm: NormConfig = NormConfig(level=2, ac_constants=None)
    score: ScoreConfig = ScoreConfig("score2")
    mode: str = "iterative"
    iterations: int = 500
    typecheck: bool = True
    # False rebuilds both indices and rescores everything after each acceptance
    incremental: bool = True
    jobs: int = 1  # worker processes for normalizing theorems while indexing

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.jobs < 1:
            raise ValueError("jobs must be positive")
        if self.iterations < 1:
            raise ValueError("iterations must be positive")
        if self.mode == "single_pass" and self.iterations != 1:
            raise ValueError("single-pass matching runs exactly one iteration")


@dataclass(frozen=True)
class AcceptedPair:
    c1: str
    c2: str
    fresh: str
    score: float
    shared_count: int


@dataclass(frozen=True)
class TypePair:
    t1: str
    t2: str
    fresh: str


@dataclass
class MatchState:
    const_pairs: list[AcceptedPair] = field(default_factory=list)
    type_pairs: list[TypePair] = field(default_factory=list)
    lib1: Library | None = None
    lib2: Library | None = None
    discarded_by_type: int = 0
    type_conflicts: int = 0
    ac_constants: tuple[str, ...] = ()


class _Side:
    """Mutable working copy of one library during matching."""

    def __init__(self, lib: Library, cfg: NormConfig, interner: Interner, jobs: int = 1):
        self.name = lib.name
        self.theorems = {t.name: t for t in lib.theorems}
        self.constants = dict(lib.constants)
        self.defined = set(lib.defined_constants)
        self.defined_types = set(lib.defined_types)
        self.cfg = cfg
        self.interner = interner
        self.matched: set[str] = set()
        self.type_map: dict[str, str] = {}
        self.jobs = jobs
        self.index = build_index(self.library(), cfg, interner, jobs)

    def library(self) -> Library:
        return Library(self.name, tuple(self.theorems.values()), dict(self.constants),
                       frozenset(self.defined), frozenset(self.defined_types))

    def type_pattern(self, c: str):
        return type_pattern(self.constants[c].ty, self.defined_types)

    def define_type(self, old: str, fresh: str) -> None:
        self.type_map[old] = fresh
        self.defined_types.add(fresh)
        mapping = {old: fresh}
        self.constants = {n: ConstSignature(n, rename_tycons(s.ty, mapping))
                          for n, s in self.constants.items()}

    def define_const(self, c: str, fresh: str, rewrite: bool, incremental: bool) -> None:
        self.matched.add(c)
        self.defined.add(fresh)
        sig = self.constants.pop(c, None)
        if sig is not None:
            self.constants[fresh] = ConstSignature(fresh, sig.ty)
        if not rewrite:
            return
        if c in (self.cfg.ac_constants or ()):
            self.cfg = replace(self.cfg, ac_constants=self.cfg.ac_constants + (fresh,))
        touched = self.index.theorems_mentioning(c)
        for name in sorted(touched):
            self.theorems[name] = Theorem(name, subst_const(self.theorems[name].statement, c, fresh))
        if incremental:
            self.index.defined = frozenset(self.defined)
            self.index.cfg = self.cfg
            for name in sorted(touched):
                self.index.add_theorem(self.theorems[name])
        else:
            self.index = build_index(self.library(), self.cfg, self.interner, self.jobs)


def prune_candidates(idx1: PatternIndex, idx2: PatternIndex,
                     exclude1: Iterable[str] = (), exclude2: Iterable[str] = ()) -> set[tuple[str, str]]:
    """Pairs sharing at least one pattern, minus already matched constants."""
    ex1, ex2 = set(exclude1), set(exclude2)
    return {p for p in shared_patterns(idx1, idx2) if p[0] not in ex1 and p[1] not in ex2}


class Matcher:
    def __init__(self, lib1: Library, lib2: Library, cfg: MatchConfig = MatchConfig()):
        norm = cfg.norm
        if norm.ac_constants is None:
            ac: tuple[str, ...] = ()
            if norm.level == 2:
                ac = harvest_ac_constants(lib1) + harvest_ac_constants(lib2)
            norm = replace(norm, ac_constants=ac)
        self.cfg = cfg
        self.interner = Interner()
        self.side1 = _Side(lib1, norm, self.interner, cfg.jobs)
        self.side2 = _Side(lib2, norm, self.interner, cfg.jobs)
        self.state = MatchState(ac_constants=norm.ac_constants)
        # heap keys are score minus the slack at push time, so adding the
        # current slack bounds the pair's present score from above
        self._heap: list[tuple[float, str, str]] = []
        self._latest: dict[tuple[str, str], tuple[float, float]] = {}
        self._slack = 0.0

    # -- scoring ----------------------------------------------------------

    def _exact(self, c1: str, c2: str) -> tuple[float, int]:
        idx1, idx2 = self.side1.index, self.side2.index
        p1, p2 = idx1.pset.get(c1), idx2.pset.get(c2)
        if not p1 or not p2:
            return 0.0, 0
        shared = p1.keys() & p2.keys()
        if not shared:
            return 0.0, 0
        return combine(self.cfg.score.scheme, shared, idx1, idx2, len(p1), len(p2)), len(shared)

    def _push(self, c1: str, c2: str, s: float) -> None:
        g = self._slack
        self._latest[(c1, c2)] = (s, g)
        heapq.heappush(self._heap, (g - s, c1, c2))

    def _full_scoring(self):
        ranking = score_candidates(shared_patterns(self.side1.index, self.side2.index),
                                   self.side1.index, self.side2.index, self.cfg.score)
        self._latest = {}
        self._heap = []
        self._slack = 0.0
        for sp in ranking:
            if sp.c1 in self.side1.matched or sp.c2 in self.side2.matched:
                continue
            self._latest[(sp.c1, sp.c2)] = (sp.score, 0.0)
            self._heap.append((-sp.score, sp.c1, sp.c2))
        heapq.heapify(self._heap)
        self._snapshot()
        self.side1.index.take_dirty()
        self.side2.index.take_dirty()
        return ranking

    def _snapshot(self) -> None:
        """Remember pattern-set keys and C^set sizes to diff against later."""
        self._keys = [{c: frozenset(ps) for c, ps in side.index.pset.items()}
                      for side in (self.side1, self.side2)]
        self._sizes = [{pid: len(cs) for pid, cs in side.index.cset.items()}
                       for side in (self.side1, self.side2)]

    def _refresh(self) -> None:
        """Make the heap bound every pair whose score may have gone up or appeared.

        Lowered scores are left stale in the heap: ``_select`` recomputes the
        exact score on pop, so an overestimate only costs a re-push.  A score
        can only rise through a newly shared pattern, a pattern whose C^set
        shrank (its weight grew), or, under score2, a smaller pattern count.
        A weight gain on a pattern shared by many pairs is added to the
        global slack rather than pushed pair by pair.
        """
        idx1, idx2 = self.side1.index, self.side2.index
        dc1, dp1 = idx1.take_dirty()
        dc2, dp2 = idx2.take_dirty()
        m1, m2 = self.side1.matched, self.side2.matched
        scheme = self.cfg.score.scheme
        size1, size2 = self._sizes
        affected: set[tuple[str, str]] = set()
        for pid in dp1 | dp2:
            cs1, cs2 = idx1.cset.get(pid), idx2.cset.get(pid)
            n1, n2 = len(cs1 or ()), len(cs2 or ())
            o1, o2 = size1.get(pid, 0), size2.get(pid, 0)
            size1[pid], size2[pid] = n1, n2
            if not (n1 < o1 or n2 < o2) or not n1 or not n2 or scheme == "score0":
                continue
            if n1 * n2 > SLACK_PAIRS and o1 and o2:
                gain = 1 / (n1 * n2) - 1 / (o1 * o2)
                if gain > 0:
                    if scheme == "score2":
                        gain /= math.log(3)
                    self._slack += gain * (1 + 1e-9) + 1e-12
                continue
            affected.update((a, b) for a in cs1 if a not in m1 for b in cs2 if b not in m2)
        for (dc, idx, other, keys, mine, theirs, flip) in (
                (dc1, idx1, idx2, self._keys[0], m1, m2, False),
                (dc2, idx2, idx1, self._keys[1], m2, m1, True)):
            for c in dc:
                new = frozenset(idx.pset.get(c, ()))
                old = keys.get(c, frozenset())
                keys[c] = new
                if c in mine or not new:
                    continue
                pids = new if scheme == "score2" and len(new) < len(old) else new - old
                for pid in pids:
                    for b in other.cset.get(pid, ()):
                        if b not in theirs:
                            affected.add((b, c) if flip else (c, b))
        latest, g = self._latest, self._slack
        for c1, c2 in affected:
            s, _ = self._exact(c1, c2)
            if s > 0 and latest.get((c1, c2)) != (s, g):
                self._push(c1, c2, s)

    # -- types ------------------------------------------------------------

    def _derived_types(self, c1: str, c2: str) -> list[tuple[str, str]] | None:
        """Derived type pairs, or None when the candidate must be skipped."""
        if not self.cfg.typecheck:
            return []
        if c1 not in self.side1.constants or c2 not in self.side2.constants:
            self.state.discarded_by_type += 1
            return None
        pairs = match_type_patterns(self.side1.type_pattern(c1), self.side2.type_pattern(c2))
        if pairs is None:
            self.state.discarded_by_type += 1
            return None
        out: list[tuple[str, str]] = []
        tm1, tm2 = self.side1.type_map, self.side2.type_map
        for a, b in pairs:
            assert isinstance(a, TyCon) and isinstance(b, TyCon)
            pair = (a.name, b.name)
            if pair in out:
                continue
            if any(x == pair[0] or y == pair[1] for x, y in out) or a.name in tm1 or b.name in tm2:
                self.state.type_conflicts += 1
                return None
            out.append(pair)
        return out

    def _accept(self, c1: str, c2: str, score: float, k: int, tpairs, rewrite: bool) -> None:
        st = self.state
        for t1, t2 in tpairs:
            fresh = FRESH_TYPE.format(len(st.type_pairs) + 1)
            self.side1.define_type(t1, fresh)
            self.side2.define_type(t2, fresh)
            st.type_pairs.append(TypePair(t1, t2, fresh))
        d = FRESH_CONST.format(len(st.const_pairs) + 1)
        inc = self.cfg.incremental
        self.side1.define_const(c1, d, rewrite, inc)
        self.side2.define_const(c2, d, rewrite, inc)
        st.const_pairs.append(AcceptedPair(c1, c2, d, score, k))
        self._latest.pop((c1, c2), None)

    def _select(self):
        heap, latest = self._heap, self._latest
        m1, m2 = self.side1.matched, self.side2.matched
        skipped = []
        found = None
        while heap:
            key, c1, c2 = heapq.heappop(heap)
            entry = latest.get((c1, c2))
            if entry is None or entry[1] - entry[0] != key:
                continue
            if c1 in m1 or c2 in m2:
                del latest[(c1, c2)]
                continue
            s, g = entry
            cur, k = self._exact(c1, c2)
            if cur != s or g != self._slack:
                if cur > 0:
                    self._push(c1, c2, cur)
                else:
                    del latest[(c1, c2)]
                continue
            tpairs = self._derived_types(c1, c2)
            if tpairs is None:
                skipped.append((key, c1, c2))
                continue
            found = (c1, c2, s, k, tpairs)
            break
        for entry in skipped:
            heapq.heappush(heap, entry)
        return found

    # -- drivers ----------------------------------------------------------

    def run(self, on_iteration: Callable[["Matcher", int], None] | None = None) -> MatchState:
        if self.cfg.mode == "single_pass":
            self._single_pass()
        else:
            self._iterative(on_iteration)
        self.state.lib1 = self.side1.library()
        self.state.lib2 = self.side2.library()
        return self.state

    def _single_pass(self) -> None:
        for sp in self._full_scoring():
            if sp.c1 in self.side1.matched or sp.c2 in self.side2.matched:
                continue
            tpairs = self._derived_types(sp.c1, sp.c2)
            if tpairs is None:
                continue
            self._accept(sp.c1, sp.c2, sp.score, sp.shared_count, tpairs, rewrite=False)

    def _iterative(self, on_iteration) -> None:
        self._full_scoring()
        for it in range(1, self.cfg.iterations + 1):
            found = self._select()
            if found is None:
                break
            c1, c2, s, k, tpairs = found
            self._accept(c1, c2, s, k, tpairs, rewrite=True)
            if self.cfg.incremental:
                self._refresh()
            else:
                self._full_scoring()
            if on_iteration is not None:
                on_iteration(self, it)


def run_match(lib1: Library, lib2: Library, cfg: MatchConfig = MatchConfig(),
              on_iteration: Callable[[Matcher, int], None] | None = None) -> MatchState:
    return Matcher(lib1, lib2, cfg).run(on_iteration)


# -- evaluation and output ----------------------------------------------------------

@dataclass(frozen=True)
class Metrics:
    first_error_rank: float  # math.inf when every accepted pair is correct
    correct_before_error: int
    total_correct: int
    total_checked: int
    discarded_by_type: int = 0


def evaluate_against_truth(state: MatchState, truth: Mapping[str, str]) -> Metrics:
    first = math.inf
    before = correct = 0
    for rank, p in enumerate(state.const_pairs, 1):
        if truth.get(p.c1) == p.c2:
            correct += 1
            if first == math.inf:
                before += 1
        elif first == math.inf:
            first = rank
    return Metrics(first, before, correct, len(state.const_pairs), state.discarded_by_type)


def pairs_tsv(state: MatchState) -> str:
    lines = ["rank\tc1\tc2\tscore\tshared\tfresh"]
    for i, p in enumerate(state.const_pairs, 1):
        lines.append(f"{i}\t{p.c1}\t{p.c2}\t{p.score!r}\t{p.shared_count}\t{p.fresh}")
    return "\n".join(lines) + "\n"


def types_tsv(state: MatchState) -> str:
    lines = ["rank\tt1\tt2\tfresh"]
    lines += [f"{i}\t{p.t1}\t{p.t2}\t{p.fresh}" for i, p in enumerate(state.type_pairs, 1)]
    return "\n".join(lines) + "\n"


def metrics_text(m: Metrics) -> str:
    first = "inf" if m.first_error_rank == math.inf else str(int(m.first_error_rank))
    return (f"first_error_rank: {first}\n"
            f"correct_before_error: {m.correct_before_error}\n"
            f"total_correct: {m.total_correct}\n"
            f"total_checked: {m.total_checked}\n"
            f"discarded_by_type: {m.discarded_by_type}\n")
