"""Market instances, preference generation (eager and lazy), and seeding.

A market of size n has n students and n schools. Every student ranks all n
schools strictly; every school ranks all n students strictly. Preferences
and priorities are drawn independently and uniformly over permutations.

Lazy generation reveals a student's ranking one uniform draw at a time,
discarding repeats, so a run only ever pays for the prefix it actually
reads. Every raw draw (repeats included) is recorded in a shared draw log.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

MAX_SEED = 2**64 - 1


class StreamExhaustedError(RuntimeError):
    """Raised when a lazy preference stream has already emitted all n schools."""


@dataclass(frozen=True)
class Seed:
    """Reproducible seed: a master value plus a replication counter.

    Equal (master_seed, replication_index) pairs derive bit-identical
    generators; distinct replication indices derive independent streams.
    """

    master_seed: int
    replication_index: int = 0

    def __post_init__(self):
        if not 0 <= self.master_seed <= MAX_SEED:
            raise ValueError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}")
        if self.replication_index < 0:
            raise ValueError(f"replication_index must be >= 0, got {self.replication_index}")

    def sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(entropy=(self.master_seed, self.replication_index))

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(self.sequence())


def as_seed(seed: Seed | int) -> Seed:
    """Coerce a bare integer into a Seed with replication index 0."""
    if isinstance(seed, Seed):
        return seed
    return Seed(master_seed=int(seed))


def derive_generator(master_seed: int, *context: int) -> np.random.Generator:
    """Derive an independent generator from a master seed and integer context.

    The context words (e.g. mechanism id, market size, replication index)
    are hashed into the seed sequence, so streams for different contexts
    never collide and never depend on scheduling order.
    """
    return np.random.default_rng(np.random.SeedSequence(entropy=(int(master_seed), *map(int, context))))


def derive_seed_word(master_seed: int, *context: int) -> int:
    """64-bit audit word identifying the derived stream (for per-run logs)."""
    seq = np.random.SeedSequence(entropy=(int(master_seed), *map(int, context)))
    return int(seq.generate_state(1, np.uint64)[0])


def _permutation_rows(rng: np.random.Generator, rows: int, n: int) -> np.ndarray:
    """(rows, n) array whose rows are independent uniform permutations of 0..n-1."""
    base = np.tile(np.arange(n), (rows, 1))
    return rng.permuted(base, axis=1)


def _inverse_rows(perm: np.ndarray) -> np.ndarray:
    """Row-wise inverse: out[i, perm[i, k]] = k."""
    rows, n = perm.shape
    inv = np.empty_like(perm)
    np.put_along_axis(inv, perm, np.broadcast_to(np.arange(n), (rows, n)), axis=1)
    return inv


@dataclass(eq=False)
class MarketInstance:
    """One market: full strict preferences on both sides.

    student_prefs[i] lists school indices, most preferred first.
    school_priorities[s] lists student indices, highest priority first.
    Both arrays are read-only after construction and safe to share across
    threads. Inverse rank tables are built once so "does i prefer a to b"
    is a constant-time comparison.
    """

    student_prefs: np.ndarray
    school_priorities: np.ndarray
    student_rank: np.ndarray = field(init=False, repr=False)
    school_rank: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.student_prefs = np.ascontiguousarray(self.student_prefs, dtype=np.int64)
        self.school_priorities = np.ascontiguousarray(self.school_priorities, dtype=np.int64)
        n = self.student_prefs.shape[0]
        if n < 1:
            raise ValueError("market size must be >= 1")
        if self.student_prefs.shape != (n, n) or self.school_priorities.shape != (n, n):
            raise ValueError("preference tables must both be n x n")
        ident = np.arange(n)
        if not (np.sort(self.student_prefs, axis=1) == ident).all():
            raise ValueError("each student_prefs row must be a permutation of 0..n-1")
        if not (np.sort(self.school_priorities, axis=1) == ident).all():
            raise ValueError("each school_priorities row must be a permutation of 0..n-1")
        # student_rank[i, s] = position of school s in i's list (0 = top choice)
        self.student_rank = _inverse_rows(self.student_prefs)
        # school_rank[s, i] = position of student i in s's priority order
        self.school_rank = _inverse_rows(self.school_priorities)
        for arr in (self.student_prefs, self.school_priorities, self.student_rank, self.school_rank):
            arr.setflags(write=False)

    @property
    def n(self) -> int:
        return self.student_prefs.shape[0]

    def prefers(self, student: int, school_a: int, school_b: int) -> bool:
        """True if `student` strictly prefers school_a to school_b."""
        return bool(self.student_rank[student, school_a] < self.student_rank[student, school_b])


def generate_market(n: int, seed: Seed | int) -> MarketInstance:
    """Draw a market of size n: 2n independent uniform permutations.

    Identical (n, seed) pairs reproduce bit-identical instances. Student
    preferences are drawn before school priorities, in fixed order.
    """
    if n < 1:
        raise ValueError(f"market size must be >= 1, got {n}")
    rng = as_seed(seed).generator()
    student_prefs = _permutation_rows(rng, n, n)
    school_priorities = _permutation_rows(rng, n, n)
    return MarketInstance(student_prefs=student_prefs, school_priorities=school_priorities)


class LazyPreferenceStream:
    """Per-student i.i.d. uniform school draws with first-occurrence dedup.

    The deduplicated emissions form a prefix of a uniformly random ranking.
    Every raw draw consumed, including discarded repeats, is appended to the
    shared `draw_log` as a (student, school) pair. Single-owner mutable
    state: never share one stream between threads.
    """

    __slots__ = ("student", "n", "seen", "_seen_mask", "_rng", "_draw_log", "_buffer", "_pos")

    _CHUNK = 32

    def __init__(self, student: int, n: int, rng: np.random.Generator,
                 draw_log: list[tuple[int, int]]):
        self.student = student
        self.n = n
        self.seen: list[int] = []  # revealed preference prefix, in order
        self._seen_mask = bytearray(n)
        self._rng = rng
        self._draw_log = draw_log
        self._buffer: list[int] = []
        self._pos = 0

    def next_proposal(self) -> int:
        """Emit the next untried school, consuming raw draws as needed."""
        if len(self.seen) == self.n:
            raise StreamExhaustedError(f"student {self.student} has exhausted all {self.n} schools")
        log = self._draw_log
        mask = self._seen_mask
        while True:
            if self._pos == len(self._buffer):
                self._buffer = self._rng.integers(0, self.n, size=self._CHUNK).tolist()
                self._pos = 0
            school = self._buffer[self._pos]
            self._pos += 1
            log.append((self.student, school))
            if not mask[school]:
                mask[school] = 1
                self.seen.append(school)
                return school


def make_streams(n: int, seed: Seed | int) -> tuple[list[LazyPreferenceStream], list[tuple[int, int]]]:
    """One independent stream per student plus their shared draw log.

    Streams are seeded by spawning children of the seed sequence, so each
    student's raw sequence is fixed by the seed alone and does not depend
    on the order in which streams are consumed.
    """
    if n < 1:
        raise ValueError(f"market size must be >= 1, got {n}")
    children = as_seed(seed).sequence().spawn(n)
    draw_log: list[tuple[int, int]] = []
    streams = [LazyPreferenceStream(i, n, np.random.default_rng(children[i]), draw_log)
               for i in range(n)]
    return streams, draw_log


def realized_profile(streams: Sequence[LazyPreferenceStream]) -> list[list[int]]:
    """The preference prefix revealed so far, per student."""
    return [list(st.seen) for st in streams]


def complete_profile(prefixes: Sequence[Sequence[int]], n: int,
                     rng: np.random.Generator) -> np.ndarray:
    """Extend revealed prefixes to full rankings.

    Unrevealed schools are appended in uniformly random order, which is
    exactly the conditional law of the unread tail. The result can be used
    to replay a lazily generated run through any eager mechanism.
    """
    prefs = np.empty((len(prefixes), n), dtype=np.int64)
    for i, prefix in enumerate(prefixes):
        prefix = list(prefix)
        rest = np.setdiff1d(np.arange(n), prefix, assume_unique=False)
        prefs[i, :len(prefix)] = prefix
        prefs[i, len(prefix):] = rng.permuted(rest)
    return prefs
