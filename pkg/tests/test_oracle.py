"""Exact enumeration oracles, pinned against hand-checkable fixtures and
against independent brute-force recomputation on tiny graphs."""

from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chordwalk.errors import PreconditionError
from chordwalk.graph_core import Graph, internal_edges
from chordwalk.models import (complete_graph, cycle_graph, gnp_graph,
                              path_graph)
from chordwalk.oracle import (exact_avoid_event, exact_avoid_event_all,
                              exact_self_avoiding_prob, exact_walk_matrix,
                              max_chord_surplus, transition_denominator)


def brute_walk_distribution(g, v, k):
    """All length-k walks by full product enumeration (tiny graphs only)."""
    out = [Fraction(0)] * g.n
    def rec(u, depth, prob):
        if depth == k:
            out[u] += prob
            return
        d = len(g.adj[u])
        for w in g.adj[u]:
            rec(w, depth + 1, prob / d)
    rec(v, 0, Fraction(1))
    return out


def test_walk_matrix_identity_at_zero(k4):
    M0 = exact_walk_matrix(k4, 0)
    for i in range(4):
        assert M0[i][i] == 1
        assert sum(M0[i]) == 1


def test_p3_two_step_row(p3):
    M2 = exact_walk_matrix(p3, 2)
    assert M2[0] == [Fraction(1, 2), Fraction(0), Fraction(1, 2)]
    # both endpoints bounce straight back to the middle
    assert M2[1] == [Fraction(0), Fraction(1), Fraction(0)]


def test_walk_matrix_matches_bruteforce(c5, k4):
    for g in (c5, k4):
        for k in (1, 2, 3):
            M = exact_walk_matrix(g, k)
            for v in range(g.n):
                assert M[v] == brute_walk_distribution(g, v, k)


def test_rows_are_stochastic(petersen):
    M = exact_walk_matrix(petersen, 4)
    for row in M:
        assert sum(row) == 1


def test_transition_denominator(p3, petersen):
    assert transition_denominator(p3) == 2
    assert transition_denominator(petersen) == 3


def test_p3_avoid_event(p3):
    assert exact_avoid_event(p3, 0, [2], 2) == Fraction(1, 2)
    # avoiding b from a is impossible: the first step always hits it
    assert exact_avoid_event(p3, 0, [1], 1) == 0
    all_rows = exact_avoid_event_all(p3, [2], 2)
    assert all_rows[0] == Fraction(1, 2)


def test_avoid_event_start_exempt(p3):
    # the start vertex may lie in the avoided set; only steps 1..k count,
    # so starting at c and avoiding {c} for two steps is the 1/2 chance
    # of not bouncing back
    assert exact_avoid_event(p3, 2, [2], 2) == Fraction(1, 2)


def test_k4_self_avoiding_two_steps(k4):
    assert exact_self_avoiding_prob(k4, 0, 2) == Fraction(2, 3)


def test_c10_self_avoiding(c10):
    assert exact_self_avoiding_prob(c10, 0, 3) == Fraction(1, 4)
    assert exact_self_avoiding_prob(c10, 0, 5) == Fraction(1, 16)


def test_self_avoiding_with_avoid_set(k4):
    # length 1 from vertex 0 avoiding {1}: 2 of 3 neighbours remain
    assert exact_self_avoiding_prob(k4, 0, 1, avoid=[1]) == Fraction(2, 3)


def test_self_avoiding_impossible_length(k4):
    assert exact_self_avoiding_prob(k4, 0, 4) == 0


def brute_self_avoiding(g, v, length, avoid=()):
    banned = set(avoid)
    total = Fraction(0)
    def rec(u, seen, prob, depth):
        nonlocal total
        if depth == length:
            total += prob
            return
        d = len(g.adj[u])
        for w in g.adj[u]:
            if w in seen or w in banned:
                continue
            rec(w, seen | {w}, prob / d, depth + 1)
    rec(v, {v}, Fraction(1), 0)
    return total


@given(st.integers(min_value=0, max_value=400), st.integers(1, 4))
@settings(max_examples=30, deadline=None)
def test_self_avoiding_matches_bruteforce(seed, length):
    g = gnp_graph(7, 0.55, seed=seed)
    if any(d == 0 for d in g.degrees):
        return
    for v in (0, g.n - 1):
        assert exact_self_avoiding_prob(g, v, length) == \
            brute_self_avoiding(g, v, length)


def test_surplus_fixtures():
    assert max_chord_surplus(complete_graph(5)).surplus == 0
    r = max_chord_surplus(complete_graph(6))
    assert r.surplus == 3
    assert r.chords == 9
    assert max_chord_surplus(cycle_graph(7)).surplus == -7


def test_surplus_cycle_is_consistent(k5):
    r = max_chord_surplus(k5)
    cyc = r.cycle
    assert len(set(cyc)) == len(cyc)
    nbr = k5.neighbor_sets()
    for a, b in zip(cyc, cyc[1:] + cyc[:1]):
        assert b in nbr[a]
    assert internal_edges(k5, cyc) - len(cyc) == r.chords
    assert r.chords - len(cyc) == r.surplus


def test_surplus_needs_a_cycle(p3):
    with pytest.raises(PreconditionError):
        max_chord_surplus(p3)


def brute_max_surplus(g):
    """Exhaustive over all vertex orderings of all subset sizes >= 3."""
    from itertools import permutations
    nbr = g.neighbor_sets()
    best = None
    for size in range(3, g.n + 1):
        for perm in permutations(range(g.n), size):
            if perm[0] != min(perm):
                continue
            ok = all(b in nbr[a] for a, b in zip(perm, perm[1:] + perm[:1]))
            if not ok:
                continue
            # chords = internal - size; surplus = chords - size
            surplus = internal_edges(g, perm) - 2 * size
            if best is None or surplus > best:
                best = surplus
    return best


@given(st.integers(min_value=0, max_value=300))
@settings(max_examples=25, deadline=None)
def test_surplus_matches_bruteforce(seed):
    g = gnp_graph(6, 0.6, seed=seed)
    brute = brute_max_surplus(g)
    if brute is None:
        with pytest.raises(PreconditionError):
            max_chord_surplus(g)
    else:
        assert max_chord_surplus(g).surplus == brute


def test_walk_matrix_size_guard():
    big = gnp_graph(70, 0.2, seed=1)
    with pytest.raises(PreconditionError):
        exact_walk_matrix(big, 2)
