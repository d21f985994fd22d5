#!/usr/bin/env python3
"""Exact expectations on tiny markets, no sampling involved.

Enumerates every profile of sizes 1 to 3 and averages the envy counts in
rational arithmetic. The unenvied mean lands exactly on the harmonic
number under both deferred acceptance and serial dictatorship, and the
serial dictatorship top-choice mean lands exactly on (n+1)/2.
"""

import numpy as np

from envylab import (
    MarketInstance,
    all_stable_matchings,
    deferred_acceptance,
    enumerate_expected_rsd,
    enumerate_expected_unenvied_da,
    harmonic_exact,
)

for n in (1, 2, 3):
    da = enumerate_expected_unenvied_da(n)
    sd = enumerate_expected_rsd(n)
    print(f"n = {n}  (H_n = {harmonic_exact(n)})")
    print(f"  deferred acceptance over {da.profile_count} profiles: "
          f"E[unenvied] = {da.unenvied_mean}, E[envy nobody] = {da.envy_nobody_mean}")
    print(f"  serial dictatorship over {sd.profile_count} runs:     "
          f"E[unenvied] = {sd.unenvied_mean}, E[envy nobody] = {sd.envy_nobody_mean}")
    assert da.unenvied_mean == harmonic_exact(n)
    assert sd.unenvied_mean == harmonic_exact(n)
print()

print("a 2x2 instance with opposed interests has two stable matchings:")
market = MarketInstance(student_prefs=np.array([[0, 1], [1, 0]]),
                        school_priorities=np.array([[1, 0], [0, 1]]))
for m in all_stable_matchings(market):
    print("  stable:", m.assignment.tolist())
print("deferred acceptance picks the student-optimal one:",
      deferred_acceptance(market).assignment.tolist())
