"""Synthetic experiments: twin recovery, ablations and timing.

Shared by the scripts under ``scripts/`` and the acceptance tests.
"""

from __future__ import annotations

import math
import statistics
import time
from dataclasses import dataclass, field

from .corpusgen import GenConfig, generate_twins, matchable
from .matcher import MatchConfig, run_match, evaluate_against_truth
from .scoring import ScoreConfig


def ablation_configs() -> dict[str, MatchConfig]:
    """The default configuration and its one-knob variants."""
    return {
        "score2": MatchConfig(),
        "score1": MatchConfig(score=ScoreConfig("score1")),
        "score0": MatchConfig(score=ScoreConfig("score0")),
        "single_pass": MatchConfig(mode="single_pass", iterations=1),
        "no_typecheck": MatchConfig(typecheck=False),
    }


@dataclass
class RunResult:
    seed: int
    first_error_rank: float
    recovered: float        # correct before first error / matchable
    wrong: int
    seconds: float


@dataclass
class AblationResult:
    noise: float
    runs: dict[str, list[RunResult]] = field(default_factory=dict)

    def median_first_error(self, name: str) -> float:
        return statistics.median(r.first_error_rank for r in self.runs[name])

    def mean_recovered(self, name: str) -> float:
        return statistics.fmean(r.recovered for r in self.runs[name])

    def wrong(self, name: str) -> list[int]:
        return [r.wrong for r in self.runs[name]]

    def table(self) -> str:
        lines = ["config\tmedian_first_error\tmean_recovered\twrong_per_seed"]
        for name in self.runs:
            lines.append(f"{name}\t{self.median_first_error(name)}\t{self.mean_recovered(name):.3f}\t"
                         + ",".join(map(str, self.wrong(name))))
        return "\n".join(lines) + "\n"


def run_ablation(noise: float, seeds=range(10), n_constants: int = 50, n_theorems: int = 300,
                 configs: dict[str, MatchConfig] | None = None) -> AblationResult:
    configs = configs or ablation_configs()
    out = AblationResult(noise)
    for seed in seeds:
        tw = generate_twins(GenConfig(seed=seed, n_constants=n_constants, n_theorems=n_theorems,
                                      noise=noise))
        n = len(matchable(tw)) or 1
        for name, cfg in configs.items():
            t0 = time.perf_counter()
            state = run_match(tw.lib1, tw.lib2, cfg)
            m = evaluate_against_truth(state, tw.truth)
            out.runs.setdefault(name, []).append(RunResult(
                seed, m.first_error_rank, m.correct_before_error / n,
                m.total_checked - m.total_correct, time.perf_counter() - t0))
    return out


@dataclass
class Timing:
    n1: int
    n2: int
    generate: float
    single_pass: float
    iterative: float
    iterations: int

    @property
    def overhead(self) -> float:
        return self.iterative / self.single_pass - 1 if self.single_pass else math.inf


def time_scoring(n1: int = 1000, n2: int = 2000, theorems_per_constant: int = 6,
                 iterations: int = 100) -> Timing:
    """Time a single pass and an iterative run on two unrelated synthetic libraries."""
    t0 = time.perf_counter()
    lib1 = generate_twins(GenConfig(seed=1, n_constants=n1, n_theorems=n1 * theorems_per_constant)).lib1
    lib2 = generate_twins(GenConfig(seed=2, n_constants=n2, n_theorems=n2 * theorems_per_constant)).lib2
    t1 = time.perf_counter()
    run_match(lib1, lib2, MatchConfig(mode="single_pass", iterations=1))
    t2 = time.perf_counter()
    run_match(lib1, lib2, MatchConfig(iterations=iterations))
    t3 = time.perf_counter()
    return Timing(n1, n2, t1 - t0, t2 - t1, t3 - t2, iterations)
