"""Envy graph construction, degree identities, and rank histograms."""

import numpy as np
import pytest

from envylab import (
    MarketInstance,
    Matching,
    Seed,
    SerialOrder,
    build_envy_graph,
    completed_market,
    deferred_acceptance,
    envy_nobody_count,
    generate_market,
    match_ranks,
    rank_histogram,
    rsd,
    sequential_da,
    under_demanded_schools,
    unenvied_count,
)


def forced_two_market():
    return MarketInstance(student_prefs=np.array([[0, 1], [0, 1]]),
                          school_priorities=np.array([[0, 1], [0, 1]]))


def test_single_student_has_no_envy():
    market = generate_market(1, Seed(master_seed=1))
    graph = build_envy_graph(market, Matching(assignment=np.array([0])))
    assert graph.edges == []
    assert unenvied_count(graph) == 1
    assert envy_nobody_count(graph) == 1


def test_forced_two_market_has_single_edge():
    market = forced_two_market()
    graph = build_envy_graph(market, deferred_acceptance(market))
    assert graph.edges == [(1, 0)]  # the rejected student envies the winner
    assert unenvied_count(graph) == 1
    assert envy_nobody_count(graph) == 1


def test_everyone_on_top_choice_gives_empty_graph():
    # student i ranks school i first; identity matching leaves nobody envious
    prefs = np.array([[i] + [s for s in range(4) if s != i] for i in range(4)])
    market = MarketInstance(student_prefs=prefs,
                            school_priorities=np.tile(np.arange(4), (4, 1)))
    graph = build_envy_graph(market, Matching(assignment=np.arange(4)))
    assert graph.edges == []
    assert unenvied_count(graph) == 4
    assert envy_nobody_count(graph) == 4


def test_out_degree_is_rank_minus_one():
    for rep in range(50):
        market = generate_market(10, Seed(master_seed=7, replication_index=rep))
        matching = deferred_acceptance(market)
        graph = build_envy_graph(market, matching)
        ranks = match_ranks(market, matching)
        assert np.array_equal(graph.out_degree, ranks - 1)
        assert graph.edge_count == int((ranks - 1).sum())
        assert envy_nobody_count(graph) == rank_histogram(market, matching).at_rank(1)


def test_in_degree_is_distinct_proposers_minus_one():
    for rep in range(40):
        matching, log = sequential_da(12, Seed(master_seed=9, replication_index=rep))
        market = completed_market(log, np.random.default_rng(rep))
        graph = build_envy_graph(market, matching)
        proposers = log.proposals_per_school()
        for i in range(12):
            assert graph.in_degree[i] == proposers[matching.assignment[i]] - 1


def test_degree_only_path_matches_materialized_path():
    for rep in range(30):
        market = generate_market(15, Seed(master_seed=11, replication_index=rep))
        matching = deferred_acceptance(market)
        full = build_envy_graph(market, matching)
        lean = build_envy_graph(market, matching, materialize_threshold=0)
        assert lean.edges is None
        assert np.array_equal(full.in_degree, lean.in_degree)
        assert np.array_equal(full.out_degree, lean.out_degree)


def test_rank_histogram_basics():
    market = generate_market(1, Seed(master_seed=1))
    hist = rank_histogram(market, Matching(assignment=np.array([0])))
    assert hist.counts.tolist() == [1]
    with pytest.raises(ValueError):
        hist.at_rank(2)


def test_rank_histogram_identical_preferences_under_rsd():
    # if everyone shares one ranking, the k-th chooser lands at rank k
    n = 5
    shared = np.tile(np.arange(n), (n, 1))
    market = MarketInstance(student_prefs=shared,
                            school_priorities=np.tile(np.arange(n), (n, 1)))
    matching = rsd(market, SerialOrder(np.arange(n)))
    hist = rank_histogram(market, matching)
    assert hist.counts.tolist() == [1] * n
    assert hist.counts.sum() == n


def test_under_demanded_school_sets():
    _, log = sequential_da(1, Seed(master_seed=2))
    assert under_demanded_schools(log) == {0}

    from envylab import sequential_da_on_market
    _, log2 = sequential_da_on_market(forced_two_market())
    assert under_demanded_schools(log2) == {1}


def test_three_way_under_demanded_equivalence():
    # schools drawn exactly once == schools with one distinct proposer
    # == matches of in-degree-zero students, run by run
    for rep in range(1000):
        matching, log = sequential_da(50, Seed(master_seed=17, replication_index=rep))
        once_drawn = {int(s) for s in np.flatnonzero(log.raw_draw_counts() == 1)}
        single_proposer = under_demanded_schools(log)
        assert once_drawn == single_proposer
        # independent route: envy edges from the revealed prefixes alone
        envied = set()
        for prefix in log.realized_prefixes:
            envied.update(prefix[:-1])
        unenvied_matches = {int(matching.assignment[i]) for i in range(50)
                            if int(matching.assignment[i]) not in envied}
        assert single_proposer == unenvied_matches


def test_rsd_position_guarantees():
    for rep in range(100):
        market = generate_market(8, Seed(master_seed=19, replication_index=rep))
        order = np.random.default_rng(rep).permutation(8)
        matching = rsd(market, order)
        graph = build_envy_graph(market, matching)
        assert graph.out_degree[order[0]] == 0  # first chooser envies nobody
        assert graph.in_degree[order[-1]] == 0  # nobody envies the last chooser
        assert unenvied_count(graph) >= 1
