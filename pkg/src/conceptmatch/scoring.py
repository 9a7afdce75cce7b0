"""Similarity scores between constants of two pattern indices.

Sums of weights are taken with ``math.fsum`` so a score does not depend on
the order in which shared patterns are visited.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .pattern import PatternIndex, RelativePattern, UnknownConstantError

SCHEMES = ("score0", "score1", "score2")


@dataclass(frozen=True)
class ScoreConfig:
    scheme: str = "score2"

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scoring scheme {self.scheme!r}")


@dataclass(frozen=True)
class ScoredPair:
    c1: str
    c2: str
    score: float
    shared_count: int

    @property
    def sort_key(self) -> tuple:
        return (-self.score, self.c1, self.c2)


class UnknownPatternError(KeyError):
    pass


def _pid(idx: PatternIndex, p: RelativePattern | int) -> int:
    if isinstance(p, int):
        return p
    key = (p.pattern.body, p.index)
    pid = idx.interner._ids.get(key)
    if pid is None:
        raise UnknownPatternError(p)
    return pid


def weight(idx: PatternIndex, p: RelativePattern | int, scheme: str = "w1") -> float:
    pid = _pid(idx, p)
    cs = idx.cset.get(pid)
    if not cs:
        raise UnknownPatternError(p)
    if scheme == "w0":
        return 1.0
    if scheme == "w1":
        return 1.0 / len(cs)
    raise ValueError(f"unknown weighting {scheme!r}")


def combine(scheme: str, pids: Iterable[int], idx1: PatternIndex, idx2: PatternIndex,
            n1: int, n2: int) -> float:
    """Score of a pair given its shared pattern ids and pattern counts."""
    if scheme == "score0":
        return float(sum(1 for _ in pids))
    cset1, cset2 = idx1.cset, idx2.cset
    s = math.fsum((1.0 / len(cset1[p])) * (1.0 / len(cset2[p])) for p in pids)
    if scheme == "score1":
        return s
    return s / math.log(2 + n1 * n2)


def score_pair(c1: str, c2: str, idx1: PatternIndex, idx2: PatternIndex,
               cfg: ScoreConfig = ScoreConfig()) -> ScoredPair:
    for idx, c in ((idx1, c1), (idx2, c2)):
        if c not in idx.pset:
            raise UnknownConstantError(f"{c} has no patterns in {idx.library}")
    p1, p2 = idx1.pset[c1], idx2.pset[c2]
    shared = p1.keys() & p2.keys()
    if not shared:
        return ScoredPair(c1, c2, 0.0, 0)
    return ScoredPair(c1, c2, combine(cfg.scheme, shared, idx1, idx2, len(p1), len(p2)), len(shared))


def shared_patterns(idx1: PatternIndex, idx2: PatternIndex) -> dict[tuple[str, str], list[int]]:
    """Every pair with at least one common pattern, via the inverted index."""
    if idx1.interner is not idx2.interner:
        raise ValueError("indices must share one pattern interner")
    out: dict[tuple[str, str], list[int]] = {}
    cset2 = idx2.cset
    for pid, cs1 in idx1.cset.items():
        cs2 = cset2.get(pid)
        if not cs2:
            continue
        for c1 in cs1:
            for c2 in cs2:
                lst = out.get((c1, c2))
                if lst is None:
                    out[(c1, c2)] = [pid]
                else:
                    lst.append(pid)
    return out


def score_candidates(candidates: dict[tuple[str, str], list[int]], idx1: PatternIndex,
                     idx2: PatternIndex, cfg: ScoreConfig = ScoreConfig()) -> list[ScoredPair]:
    pset1, pset2 = idx1.pset, idx2.pset
    scheme = cfg.scheme
    out = []
    for (c1, c2), pids in candidates.items():
        s = combine(scheme, pids, idx1, idx2, len(pset1[c1]), len(pset2[c2]))
        out.append(ScoredPair(c1, c2, s, len(pids)))
    out.sort(key=lambda sp: (-sp.score, sp.c1, sp.c2))
    return out


def rank_pairs(idx1: PatternIndex, idx2: PatternIndex,
               cfg: ScoreConfig = ScoreConfig()) -> list[ScoredPair]:
    """All pairs with a positive score, best first; ties by names."""
    return score_candidates(shared_patterns(idx1, idx2), idx1, idx2, cfg)
