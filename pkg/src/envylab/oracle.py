"""Exact ground truth on tiny markets by exhaustive enumeration.

Everything here is deliberately independent of the mechanism
implementations: stable matchings are found by checking all n! assignments,
the student-optimal one is selected by rank domination, serial dictatorship
is re-derived with a five-line greedy loop, and envy degrees are counted
straight from the definition. Means are exact rationals, so equality with
closed forms is exact, not approximate.

Full profile spaces explode as (n!)^(2n); enumeration is capped at n = 3
(46,656 profiles) and single-instance stable-set enumeration at n = 6.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .market import MarketInstance
from .mechanisms import Matching

PROFILE_ENUMERATION_CAP = 3
STABLE_SET_CAP = 6


class EnumerationSizeError(ValueError):
    """Requested enumeration exceeds the configured size guard."""


def harmonic_exact(n: int) -> Fraction:
    """H_n as an exact rational."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return sum((Fraction(1, k) for k in range(1, n + 1)), Fraction(0))


@dataclass(frozen=True)
class ExactExpectation:
    """Exact mean statistics over an exhaustively enumerated profile space."""

    n: int
    mechanism: str
    unenvied_mean: Fraction
    envy_nobody_mean: Fraction
    profile_count: int


# ---------------------------------------------------------------------------
# Definitional building blocks on plain tuples (no numpy in the inner loops)
# ---------------------------------------------------------------------------

def _rank_table(rows):
    """table[i][x] = position of x in rows[i]."""
    n = len(rows)
    table = [[0] * n for _ in range(n)]
    for i, row in enumerate(rows):
        for pos, x in enumerate(row):
            table[i][x] = pos
    return table


def _degree_counts(rank, assignment):
    """(in_degree, out_degree) of the envy graph, from the definition."""
    n = len(rank)
    indeg = [0] * n
    outdeg = [0] * n
    for i in range(n):
        row = rank[i]
        own = row[assignment[i]]
        for j in range(n):
            if j != i and row[assignment[j]] < own:
                outdeg[i] += 1
                indeg[j] += 1
    return indeg, outdeg


def _is_stable(rank, srank, assignment):
    """No student and school prefer each other to their assignments."""
    n = len(rank)
    holder = [0] * n
    for i, s in enumerate(assignment):
        holder[s] = i
    for i in range(n):
        row = rank[i]
        own = row[assignment[i]]
        for s in range(n):
            if row[s] < own and srank[s][i] < srank[s][holder[s]]:
                return False
    return True


def _stable_assignments(rank, srank, all_assignments):
    return [m for m in all_assignments if _is_stable(rank, srank, m)]


def _student_optimal(rank, stable):
    """The stable assignment every student weakly prefers to all others.

    Selected by rank domination over the full stable set; existence and
    uniqueness are asserted rather than assumed.
    """
    if not stable:
        raise RuntimeError("no stable assignment found; enumeration is broken")
    n = len(rank)
    best = [min(rank[i][m[i]] for m in stable) for i in range(n)]
    optima = [m for m in stable if all(rank[i][m[i]] == best[i] for i in range(n))]
    if len(optima) != 1:
        raise RuntimeError(f"expected a unique student-optimal stable assignment, found {len(optima)}")
    return optima[0]


def _rsd_assignment(prefs, order):
    n = len(prefs)
    taken = [False] * n
    assignment = [0] * n
    for i in order:
        for s in prefs[i]:
            if not taken[s]:
                assignment[i] = s
                taken[s] = True
                break
    return assignment


# ---------------------------------------------------------------------------
# Exhaustive enumeration
# ---------------------------------------------------------------------------

def _check_profile_cap(n: int, size_cap: int):
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n > size_cap:
        raise EnumerationSizeError(
            f"full profile enumeration is capped at n = {size_cap} "
            f"((n!)^(2n) profiles); got n = {n}")


def iter_profiles(n: int):
    """All (student_prefs, school_priorities) profiles of size n, as tuples."""
    perms = list(itertools.permutations(range(n)))
    for prefs in itertools.product(perms, repeat=n):
        for prios in itertools.product(perms, repeat=n):
            yield prefs, prios


def _da_partition(n: int, first_pref) -> tuple[int, int, int]:
    """Accumulate deferred-acceptance envy counts over the profiles whose
    first student ranks schools as `first_pref`.

    Returns (unenvied_sum, envy_nobody_sum, profiles_seen).
    """
    perms = list(itertools.permutations(range(n)))
    unenvied_sum = 0
    envy_nobody_sum = 0
    count = 0
    for rest in itertools.product(perms, repeat=n - 1):
        prefs = (first_pref,) + rest
        rank = _rank_table(prefs)
        for prios in itertools.product(perms, repeat=n):
            srank = _rank_table(prios)
            stable = _stable_assignments(rank, srank, perms)
            optimal = _student_optimal(rank, stable)
            indeg, outdeg = _degree_counts(rank, optimal)
            unenvied_sum += sum(1 for d in indeg if d == 0)
            envy_nobody_sum += sum(1 for d in outdeg if d == 0)
            count += 1
    return unenvied_sum, envy_nobody_sum, count


def enumerate_expected_unenvied_da(n: int, size_cap: int = PROFILE_ENUMERATION_CAP,
                                   workers: int = 1) -> ExactExpectation:
    """Exact envy expectations under deferred acceptance, over all profiles.

    Per profile, the outcome is the student-optimal stable assignment found
    by brute force. The profile space is partitioned by the first student's
    ranking; partitions run independently and their integer partial sums
    are reduced in a fixed order, so the result does not depend on
    `workers`.
    """
    _check_profile_cap(n, size_cap)
    perms = list(itertools.permutations(range(n)))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda p: _da_partition(n, p), perms))
    else:
        parts = [_da_partition(n, p) for p in perms]
    unenvied_sum = sum(p[0] for p in parts)
    envy_nobody_sum = sum(p[1] for p in parts)
    count = sum(p[2] for p in parts)
    assert count == len(perms) ** (2 * n)
    return ExactExpectation(n=n, mechanism="da",
                            unenvied_mean=Fraction(unenvied_sum, count),
                            envy_nobody_mean=Fraction(envy_nobody_sum, count),
                            profile_count=count)


def enumerate_expected_rsd(n: int, size_cap: int = PROFILE_ENUMERATION_CAP) -> ExactExpectation:
    """Exact serial dictatorship means over all (preferences, order) pairs.

    School priorities never enter a serial dictatorship run, so they are
    not enumerated; profile_count is (n!)^n preference profiles times n!
    choosing orders.
    """
    _check_profile_cap(n, size_cap)
    perms = list(itertools.permutations(range(n)))
    unenvied_sum = 0
    envy_nobody_sum = 0
    count = 0
    for prefs in itertools.product(perms, repeat=n):
        rank = _rank_table(prefs)
        for order in perms:
            assignment = _rsd_assignment(prefs, order)
            indeg, outdeg = _degree_counts(rank, assignment)
            unenvied_sum += sum(1 for d in indeg if d == 0)
            envy_nobody_sum += sum(1 for d in outdeg if d == 0)
            count += 1
    return ExactExpectation(n=n, mechanism="rsd",
                            unenvied_mean=Fraction(unenvied_sum, count),
                            envy_nobody_mean=Fraction(envy_nobody_sum, count),
                            profile_count=count)


# ---------------------------------------------------------------------------
# Stable-set enumeration for a single instance
# ---------------------------------------------------------------------------

def _market_tables(market: MarketInstance):
    prefs = tuple(tuple(row) for row in market.student_prefs.tolist())
    prios = tuple(tuple(row) for row in market.school_priorities.tolist())
    return _rank_table(prefs), _rank_table(prios)


def _check_stable_cap(n: int, size_cap: int):
    if n > size_cap:
        raise EnumerationSizeError(
            f"stable-set enumeration is capped at n = {size_cap} (n! assignments); got n = {n}")


def all_stable_matchings(market: MarketInstance, size_cap: int = STABLE_SET_CAP) -> list[Matching]:
    """Every stable matching of one instance, by checking all n! assignments."""
    n = market.n
    _check_stable_cap(n, size_cap)
    rank, srank = _market_tables(market)
    stable = _stable_assignments(rank, srank, itertools.permutations(range(n)))
    return [Matching(assignment=np.array(m, dtype=np.int64)) for m in stable]


def student_optimal_from(market: MarketInstance, stable: list[Matching]) -> Matching:
    """Select the student-optimal matching from an already-enumerated stable set."""
    prefs = tuple(tuple(row) for row in market.student_prefs.tolist())
    rank = _rank_table(prefs)
    optimal = _student_optimal(rank, [tuple(m.assignment.tolist()) for m in stable])
    return Matching(assignment=np.array(optimal, dtype=np.int64))


def student_optimal_stable_matching(market: MarketInstance,
                                    size_cap: int = STABLE_SET_CAP) -> Matching:
    """The stable matching weakly preferred by every student, by brute force."""
    n = market.n
    _check_stable_cap(n, size_cap)
    rank, srank = _market_tables(market)
    stable = _stable_assignments(rank, srank, list(itertools.permutations(range(n))))
    optimal = _student_optimal(rank, stable)
    return Matching(assignment=np.array(optimal, dtype=np.int64))
