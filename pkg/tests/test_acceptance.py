"""Acceptance suite: one test per numbered criterion, each printing a
single PASS/FAIL line (shown live via capsys.disabled) with its runtime.

These are slower, corpus-driven checks; the per-module files under
tests/ carry the fast unit coverage.
"""

import random
import time
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

from conftest import named_small_graphs

from chordwalk import cli
from chordwalk.chord_pipeline import (CycleWitness, find_chordal_cycle,
                                      verify_witness)
from chordwalk.cleanup import extract_expander, verify_trajectory
from chordwalk.errors import ChordwalkError
from chordwalk.graph_core import (degree_stats, expansion_profile,
                                  is_connected, is_k_almost_regular,
                                  two_color)
from chordwalk.models import (complete_bipartite_sides, complete_graph,
                              connected_gnp_graph, cycle_graph, gnp_graph,
                              path_graph, random_bipartite_graph,
                              shift_regular_bipartite)
from chordwalk.oracle import (exact_avoid_event, exact_self_avoiding_prob,
                              max_chord_surplus)
from chordwalk.profiles import DESK
from chordwalk.spectral import (conductance_exact, empirical_mixing_time,
                                exact_mixing_violations, lambda2,
                                spectral_certificate)
from chordwalk.star_forest import forest_is_valid, root_disjoint_family
from chordwalk.walk_engine import (aggregate_avoid_deficit,
                                   avoid_event_estimate,
                                   self_avoiding_estimate,
                                   short_avoid_lower_bound_check)

GOLDEN = Path(__file__).parent / "golden"


def report(capsys, num, ok, detail, t0):
    line = (f"[criterion {num:02d}] {'PASS' if ok else 'FAIL'} "
            f"({detail}; {time.perf_counter() - t0:.1f}s)")
    with capsys.disabled():
        print(line)
    assert ok, line


@lru_cache(maxsize=1)
def small_corpus():
    """>= 200 connected graphs with n <= 24: named fixtures + random."""
    graphs = [g for _, g in named_small_graphs() if is_connected(g)]
    rng = random.Random(20260814)
    while len(graphs) < 205:
        n = rng.choice([4] * 2 + list(range(5, 15)) * 4 + list(range(15, 21))
                       + [21, 22, 23, 24])
        p = rng.uniform(1.8 / n, 0.9)
        g = gnp_graph(n, p, seed=rng.getrandbits(32))
        if g.m > 0 and is_connected(g):
            graphs.append(g)
    return graphs


def test_criterion_01_spectral_chain(capsys):
    t0 = time.perf_counter()
    checked = 0
    for g in small_corpus():
        lam2 = lambda2(g)
        phi, _ = conductance_exact(g)
        assert lam2 <= 1.0 - float(phi) ** 2 / 8.0 + 1e-9, g.fingerprint()
        lam, _ = expansion_profile(g)
        dmin, dmax, _ = degree_stats(g)
        assert phi >= lam / Fraction(dmax, dmin), g.fingerprint()
        checked += 1
    elapsed = time.perf_counter() - t0
    report(capsys, 1, checked >= 200 and elapsed < 60.0,
           f"{checked} connected graphs, both inequalities exact", t0)


def test_criterion_02_exact_mixing(capsys):
    t0 = time.perf_counter()
    rng = random.Random(7)
    done = 0
    violations = 0
    while done < 50:
        a = rng.randint(2, 32)
        b = rng.randint(2, 64 - a)
        g = random_bipartite_graph(a, b, rng.uniform(0.3, 0.9),
                                   seed=rng.getrandbits(32))
        if g.m == 0 or not is_connected(g):
            continue
        violations += exact_mixing_violations(two_color(g), k_max=50)
        done += 1
    elapsed = time.perf_counter() - t0
    report(capsys, 2, violations == 0 and elapsed < 300.0,
           f"50 bipartite graphs, k <= 50, {violations} entry violations", t0)


def test_criterion_03_certified_vs_empirical(capsys):
    t0 = time.perf_counter()
    corpus = [two_color(cycle_graph(n)) for n in (4, 6, 8, 10, 20)]
    corpus += [complete_bipartite_sides(a, b)
               for a, b in ((2, 2), (3, 3), (4, 4), (2, 5), (3, 7))]
    corpus += [shift_regular_bipartite(60, 8, seed) for seed in range(3)]
    rng = random.Random(11)
    while len(corpus) < 25:
        g = random_bipartite_graph(rng.randint(3, 12), rng.randint(3, 12),
                                   rng.uniform(0.4, 0.9),
                                   seed=rng.getrandbits(32))
        if g.m and is_connected(g):
            corpus.append(two_color(g))
    compared = 0
    for bg in corpus:
        emp = empirical_mixing_time(bg, k_max=4000)
        if emp is None:
            continue
        dmin, dmax, _ = degree_stats(bg.graph)
        cert = spectral_certificate(bg, Fraction(dmax, dmin))
        assert cert.mixing_time_bound >= emp, bg.graph.fingerprint()
        compared += 1
    report(capsys, 3, compared >= 20,
           f"certified >= empirical on all {compared} terminating scans", t0)


def test_criterion_04_cleanup_postconditions(capsys):
    t0 = time.perf_counter()
    rng = random.Random(404)
    for i in range(100):
        n = rng.randint(500, 2000)
        avg = rng.uniform(20.0, 60.0)
        g = gnp_graph(n, avg / (n - 1), seed=rng.getrandbits(32))
        ext = extract_expander(g, DESK)
        sub = ext.subgraph.graph
        dmin, dmax, davg = degree_stats(sub)
        assert is_k_almost_regular(sub, DESK.K_final), i
        assert 2 * dmin >= davg, i
        assert verify_trajectory(ext.report), i
    # small dense inputs shrink below the exact limit and must be
    # certified by full enumeration, not by sweep heuristics
    exhaustive = 0
    for g in (complete_graph(12), complete_graph(16),
              complete_bipartite_sides(8, 8).graph,
              connected_gnp_graph(20, 0.8, seed=1),
              connected_gnp_graph(24, 0.7, seed=2)):
        ext = extract_expander(g, DESK)
        assert verify_trajectory(ext.report)
        if ext.report.certification == "exhaustive":
            exhaustive += 1
    elapsed = time.perf_counter() - t0
    report(capsys, 4, exhaustive == 5 and elapsed < 600.0,
           "100 large extractions clean, 5/5 shrink routes certified "
           "exhaustively", t0)


def test_criterion_05_star_family(capsys):
    t0 = time.perf_counter()
    successes = 0
    for seed in range(100):
        bg = shift_regular_bipartite(1000, 32, seed)
        try:
            family = root_disjoint_family(bg, DESK)
        except ChordwalkError:
            continue
        size = DESK.star_size(32)
        assert len(family) == DESK.forest_count(32)
        roots_seen = set()
        for forest in family:
            assert forest_is_valid(bg, forest, size)
            roots = {s.root for s in forest.stars}
            assert not (roots & roots_seen)
            roots_seen |= roots
        successes += 1
    report(capsys, 5, successes >= 95,
           f"{successes}/100 seeds built a fully disjoint family", t0)


def test_criterion_06_monte_carlo_vs_oracle(capsys):
    t0 = time.perf_counter()
    assert exact_self_avoiding_prob(complete_graph(4), 0, 2) == Fraction(2, 3)
    assert exact_avoid_event(path_graph(3), 0, [2], 2) == Fraction(1, 2)
    rng = random.Random(6)
    hits = 0
    for case in range(100):
        g = connected_gnp_graph(rng.randint(4, 10), rng.uniform(0.45, 0.9),
                                seed=rng.getrandbits(32))
        v = rng.randrange(g.n)
        if case % 2 == 0:
            length = rng.randint(1, 4)
            exact = exact_self_avoiding_prob(g, v, length)
            est = self_avoiding_estimate(g, v, length, trials=1500,
                                         seed=rng.getrandbits(32))
        else:
            k = rng.randint(1, 5)
            avoid = rng.sample(range(g.n), rng.randint(1, 2))
            exact = exact_avoid_event(g, v, avoid, k)
            est = avoid_event_estimate(g, v, avoid, k, trials=1500,
                                       seed=rng.getrandbits(32))
        if abs(est.point - float(exact)) <= est.ci95:
            hits += 1
    report(capsys, 6, hits >= 93, f"{hits}/100 cases inside their 95% CI "
           "and both hand fixtures exact", t0)


def test_criterion_07_short_walk_bound(capsys):
    t0 = time.perf_counter()
    fixtures = [
        (complete_graph(250), 0, (), 1),
        (complete_graph(250), 0, (1,), 1),
        (complete_graph(600), 3, (), 1),
        (complete_graph(1000), 0, (), 2),
        (complete_graph(900), 5, (2, 7), 2),
        (gnp_graph(700, 0.75, seed=9), 0, (), 1),
    ]
    nonvacuous = 0
    for g, v, avoid, k in fixtures:
        chk = short_avoid_lower_bound_check(g, v, avoid, k)
        assert not chk.vacuous, (g.n, k)
        assert chk.ok, (g.n, k)
        assert float(chk.exact) >= chk.sharper_bound - 1e-12
        nonvacuous += 1
    report(capsys, 7, nonvacuous == len(fixtures),
           f"{nonvacuous} non-vacuous fixtures meet both lower bounds", t0)


def test_criterion_08_aggregate_avoid(capsys):
    t0 = time.perf_counter()
    rng = random.Random(88)
    done = 0
    while done < 50:
        n = rng.randint(6, 64)
        g = gnp_graph(n, rng.uniform(2.5 / n, 0.8), seed=rng.getrandbits(32))
        if g.m == 0 or min(g.degrees) == 0:
            continue
        k = rng.randint(1, 10)
        a = rng.randint(1, min(8, n - 1))
        avoid = rng.sample(range(n), a)
        deficit = aggregate_avoid_deficit(g, avoid, k)
        assert deficit <= 100 * k * a, (n, k, a)
        done += 1
    report(capsys, 8, done == 50,
           "50 graphs, exact deficit <= 100*k*|A| every time", t0)


def test_criterion_09_end_to_end(capsys):
    t0 = time.perf_counter()
    k60 = complete_graph(60)
    out = find_chordal_cycle(k60, DESK, budget=10**4, seed=7)
    assert isinstance(out, CycleWitness)
    assert verify_witness(k60, out)
    assert len(out.chords) >= len(out.cycle)
    wins = 0
    for seed in range(10):
        g = gnp_graph(500, 0.12, seed=seed)
        res = find_chordal_cycle(g, DESK, budget=10**4, seed=seed)
        if isinstance(res, CycleWitness):
            assert verify_witness(g, res), seed
            assert len(res.chords) >= len(res.cycle), seed
            wins += 1
    elapsed = time.perf_counter() - t0
    report(capsys, 9, wins >= 9 and elapsed < 300.0,
           f"K60 witness ok, {wins}/10 random seeds succeeded", t0)


def test_criterion_10_oracle_consistency(capsys):
    t0 = time.perf_counter()
    assert max_chord_surplus(complete_graph(5)).surplus == 0
    assert max_chord_surplus(complete_graph(6)).surplus == 3
    assert max_chord_surplus(cycle_graph(7)).surplus == -7
    corpus = [g for _, g in named_small_graphs() if 3 <= g.n <= 10]
    # dense hosts big enough for the walk events to fire at n <= 12
    corpus += [complete_graph(9), complete_graph(10),
               complete_bipartite_sides(5, 5).graph,
               complete_bipartite_sides(5, 6).graph,
               complete_bipartite_sides(6, 6).graph]
    rng = random.Random(10)
    for _ in range(20):
        n = rng.randint(6, 12)
        p = rng.uniform(0.45, 0.7 if n > 10 else 0.85)
        g = gnp_graph(n, p, seed=rng.getrandbits(32))
        if g.m and is_connected(g):
            corpus.append(g)
    witnesses = 0
    for g in corpus:
        res = find_chordal_cycle(g, DESK, budget=2000, seed=3)
        if not isinstance(res, CycleWitness):
            continue
        assert verify_witness(g, res), g.fingerprint()
        surplus = len(res.chords) - len(res.cycle)
        assert surplus <= max_chord_surplus(g).surplus, g.fingerprint()
        witnesses += 1
    report(capsys, 10, witnesses >= 3,
           f"{witnesses} pipeline witnesses, none beats the exhaustive "
           "optimum", t0)


def test_criterion_11_byte_determinism(tmp_path, capsys):
    t0 = time.perf_counter()
    k24 = tmp_path / "k24.edges"
    assert cli.main(["generate", "--model", "complete", "--n", "24",
                     "-o", str(k24)]) == 0
    k6 = tmp_path / "k6.edges"
    assert cli.main(["generate", "--model", "complete", "--n", "6",
                     "-o", str(k6)]) == 0
    runs = {
        "cycle8.edges": ["generate", "--model", "cycle", "--n", "8"],
        "k6_surplus.json": ["oracle", "-i", str(k6), "--kind",
                            "max-chord-surplus"],
        "k24_witness.json": ["find-cycle", "-i", str(k24), "--budget", "2000",
                             "--seed", "11"],
    }
    checked = 0
    for name, argv in runs.items():
        golden = (GOLDEN / name).read_bytes()
        variants = [[]] * 2
        if argv[0] == "find-cycle":
            variants = [["--threads", "1"], ["--threads", "8"], []]
        for j, extra in enumerate(variants):
            out = tmp_path / f"{name}.{j}"
            assert cli.main(argv + extra + ["-o", str(out)]) == 0
            assert out.read_bytes() == golden, (name, extra)
            checked += 1
    report(capsys, 11, checked == 7,
           "all golden fixtures byte-identical across reruns and "
           "thread counts", t0)
