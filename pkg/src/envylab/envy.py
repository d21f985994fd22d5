"""Envy graphs and the two headline statistics of a matching.

The envy graph of a matching puts an edge i -> j whenever student i
strictly prefers j's school to her own. Two degree counts summarize it:
students nobody envies (in-degree 0) and students who envy nobody
(out-degree 0; with complete strict preferences these are exactly the
students holding their top choice).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .market import MarketInstance
from .mechanisms import Matching, ProposalLog

# Above this size the edge list is not materialized; degrees are computed
# from ranks and holders instead, which is all the statistics need.
EDGE_MATERIALIZE_THRESHOLD = 2000


@dataclass(eq=False)
class EnvyGraph:
    """Directed envy relation with per-student degree counts.

    `edges` holds (envier, envied) pairs when the graph is small enough to
    materialize, else None. Degrees are always exact integers.
    """

    n: int
    in_degree: np.ndarray
    out_degree: np.ndarray
    edges: list[tuple[int, int]] | None

    @property
    def edge_count(self) -> int:
        return int(self.out_degree.sum())


def match_ranks(market: MarketInstance, matching: Matching) -> np.ndarray:
    """1-based rank of each student's assigned school (1 = top choice)."""
    n = market.n
    return market.student_rank[np.arange(n), matching.assignment] + 1


def build_envy_graph(market: MarketInstance, matching: Matching,
                     materialize_threshold: int = EDGE_MATERIALIZE_THRESHOLD) -> EnvyGraph:
    """Envy graph of a matching.

    For n up to the threshold the full edge set is built with one O(n^2)
    vectorized comparison. Beyond it, only degrees are computed: student i
    envies exactly the holders of the rank(i)-1 schools she prefers to her
    own, so out-degrees come from ranks and in-degrees from a bincount of
    those preferred schools' holders.
    """
    n = market.n
    assignment = matching.assignment
    if n <= materialize_threshold:
        # ranks_of[j, i] = how student j ranks the school held by student i
        ranks_of = market.student_rank[:, assignment]
        own = np.diagonal(ranks_of)
        envies = ranks_of < own[:, None]
        out_degree = envies.sum(axis=1).astype(np.int64)
        in_degree = envies.sum(axis=0).astype(np.int64)
        edges = [(int(i), int(j)) for i, j in np.argwhere(envies)]
        return EnvyGraph(n=n, in_degree=in_degree, out_degree=out_degree, edges=edges)

    ranks = match_ranks(market, matching)
    out_degree = (ranks - 1).astype(np.int64)
    preferred = [market.student_prefs[i, :ranks[i] - 1] for i in range(n)]
    envied_schools = np.concatenate(preferred) if preferred else np.empty(0, dtype=np.int64)
    # school_in[s] counts students preferring s to their own match, which is
    # exactly the in-degree of the student holding s
    school_in = np.bincount(envied_schools, minlength=n)
    in_degree = school_in[assignment].astype(np.int64)
    return EnvyGraph(n=n, in_degree=in_degree, out_degree=out_degree, edges=None)


def unenvied_count(graph: EnvyGraph) -> int:
    """Students with in-degree zero: nobody envies them."""
    return int(np.count_nonzero(graph.in_degree == 0))


def envy_nobody_count(graph: EnvyGraph) -> int:
    """Students with out-degree zero: they envy nobody.

    With complete strict preferences this equals the number of students
    matched to their top choice.
    """
    return int(np.count_nonzero(graph.out_degree == 0))


@dataclass(eq=False)
class RankHistogram:
    """counts[k-1] = number of students matched to their k-th choice."""

    counts: np.ndarray

    @property
    def n(self) -> int:
        return len(self.counts)

    def at_rank(self, k: int) -> int:
        if not 1 <= k <= self.n:
            raise ValueError(f"rank must be in 1..{self.n}, got {k}")
        return int(self.counts[k - 1])


def rank_histogram(market: MarketInstance, matching: Matching) -> RankHistogram:
    ranks = match_ranks(market, matching)
    counts = np.bincount(ranks - 1, minlength=market.n)
    return RankHistogram(counts=counts.astype(np.int64))


def under_demanded_schools(log: ProposalLog) -> set[int]:
    """Schools that received proposals from exactly one distinct student.

    In a completed run these are precisely the schools of in-degree-0
    students, and (for lazily generated runs) the schools appearing exactly
    once among the raw draws.
    """
    counts = log.proposals_per_school()
    return {int(s) for s in np.flatnonzero(counts == 1)}
