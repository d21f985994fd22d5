"""Coupon collector process: draw uniformly over n types until all appear.

A "singleton" is a type drawn exactly once by the stopping time. The last
type to appear is always a singleton, so there is at least one per run.
The expected singleton count equals the n-th harmonic number, which is
what ties this process to deferred acceptance: the schools drawn exactly
once across a lazily generated run are the schools nobody is displaced
from, i.e. the matches of the unenvied students.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .market import Seed, as_seed
from .mechanisms import ProposalLog


@dataclass(frozen=True)
class CollectorRun:
    """Outcome of one collector run."""

    n: int
    stopping_time: int
    singleton_count: int

    def __post_init__(self):
        if self.stopping_time < self.n:
            raise ValueError("stopping time cannot be smaller than the number of types")
        if not 1 <= self.singleton_count <= self.n:
            raise ValueError("singleton count must be in 1..n")


def run_collector(n: int, seed: Seed | int) -> CollectorRun:
    """Draw i.i.d. uniform types until all n have been seen.

    Draws are generated in blocks; the stopping time is the index of the
    last type's first appearance, and singletons are counted over the
    draws up to and including it.
    """
    if n < 1:
        raise ValueError(f"number of types must be >= 1, got {n}")
    rng = as_seed(seed).generator()
    # Expected stopping time is about n * H_n; grow the window until all
    # types are present.
    block = max(64, int(2.5 * n * (np.log(n) + 1.0)))
    draws = rng.integers(0, n, size=block)
    while len(np.unique(draws)) < n:
        draws = np.concatenate([draws, rng.integers(0, n, size=block)])
    types, first_index = np.unique(draws, return_index=True)
    stop = int(first_index.max()) + 1
    counts = np.bincount(draws[:stop], minlength=n)
    return CollectorRun(n=n, stopping_time=stop,
                        singleton_count=int(np.count_nonzero(counts == 1)))


def singleton_count_from_da(log: ProposalLog) -> int:
    """Schools appearing exactly once among a run's consumed raw draws.

    Per run (not just on average) this equals the number of unenvied
    students of the resulting matching. Requires a lazily generated run;
    market-backed runs have no raw draws.
    """
    if not log.raw_draws:
        raise ValueError("run has no raw draw log; use a lazily generated run")
    counts = log.raw_draw_counts()
    return int(np.count_nonzero(counts == 1))
