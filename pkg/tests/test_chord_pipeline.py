import json

import pytest

from chordwalk.chord_pipeline import (AttemptConfig, CycleWitness,
                                      SearchFailure, assemble_witness,
                                      attempt, find_chordal_cycle,
                                      make_config, verify_witness,
                                      witness_to_dot)
from chordwalk.errors import PreconditionError
from chordwalk.graph_core import Graph
from chordwalk.models import (complete_bipartite_sides, complete_graph,
                              connected_gnp_graph, cycle_graph)
from chordwalk.profiles import DESK


def test_attempt_config_validation():
    with pytest.raises(PreconditionError):
        AttemptConfig(t=8, k=2, k_prime=2, q1=2, q3=6, chord_target=1,
                      budget=1)  # even stride
    with pytest.raises(PreconditionError):
        AttemptConfig(t=7, k=2, k_prime=3, q1=2, q3=5, chord_target=1,
                      budget=1)  # t < 4 k'
    cfg = AttemptConfig(t=12, k=2, k_prime=3, q1=3, q3=9, chord_target=1,
                        budget=5)
    assert cfg.k_prime == 3


def test_make_config_clamps():
    cfg = make_config(DESK, n_prime=60, d_prime=30.0, k=1, budget=10)
    assert cfg.t == 8  # the small-host floor
    assert cfg.k_prime == 1
    cfg = make_config(DESK, n_prime=9, d_prime=4.0, k=1, budget=10)
    assert cfg.t == 8  # capped at n' - 1
    with pytest.raises(PreconditionError):
        make_config(DESK, n_prime=5, d_prime=3.0, k=3, budget=10)


def test_assemble_witness_by_hand():
    bg = complete_bipartite_sides(4, 4)
    steps = [0, 4, 1, 5, 2, 6, 3, 7]  # alternating, fully self-avoiding
    cfg = AttemptConfig(t=7, k=1, k_prime=1, q1=2, q3=5, chord_target=1,
                        budget=1)
    payload, stats = assemble_witness(bg, steps, cfg)
    assert stats["e1"] and stats["e2"] and stats["chords_ok"]
    assert payload["cycle"] == (0, 4, 1, 5, 2, 6, 3, 7)
    assert len(payload["chords"]) == 8  # 16 pairs inside minus 8 cycle edges
    assert payload["events"] == {"E1": True, "E2": True, "E3": True}
    for a, b in payload["chords"]:
        assert a < b


def test_assemble_witness_e2_can_fail():
    # a path that never links its first quarter to its last: C8 walked
    # around has only consecutive edges
    from chordwalk.graph_core import two_color
    bg = two_color(cycle_graph(12))
    steps = [0, 1, 2, 3, 4, 5, 6, 7]
    cfg = AttemptConfig(t=7, k=1, k_prime=1, q1=2, q3=5, chord_target=1,
                        budget=1)
    payload, stats = assemble_witness(bg, steps, cfg)
    assert payload is None
    assert not stats["e2"]


def test_attempt_on_complete_bipartite():
    bg = complete_bipartite_sides(6, 6)
    cfg = make_config(DESK, n_prime=12, d_prime=6.0, k=1, budget=1)
    found = None
    for seed in range(200):
        w = attempt(bg, cfg, seed)
        if w is not None:
            found = w
            break
    assert found is not None
    assert len(found.chords) >= len(found.cycle)
    assert found.provenance["graph_id"] == bg.graph.fingerprint()


def test_find_chordal_cycle_k24():
    g = complete_graph(24)
    out = find_chordal_cycle(g, DESK, budget=2000, seed=11)
    assert isinstance(out, CycleWitness)
    assert verify_witness(g, out)
    prov = out.provenance
    assert prov["input_hash"] == g.fingerprint()
    assert prov["preset"] == "desk"
    assert "attempt_index" in prov and "tool_version" in prov


def test_find_chordal_cycle_failure_is_structured():
    out = find_chordal_cycle(cycle_graph(20), DESK, budget=50, seed=1)
    assert isinstance(out, SearchFailure)
    d = out.to_json_dict()
    assert d["reason"]


def test_budget_exhaustion_statistics():
    # sparse random graph: extraction succeeds but attempts mostly die
    g = connected_gnp_graph(80, 0.12, seed=2)
    out = find_chordal_cycle(g, DESK, budget=3, seed=1)
    if isinstance(out, SearchFailure) and out.reason == "budget exhausted":
        assert out.attempts == 3
        assert out.e1_pass <= 3


def test_threads_do_not_change_result():
    g = complete_graph(24)
    a = find_chordal_cycle(g, DESK, budget=500, seed=3, threads=1)
    b = find_chordal_cycle(g, DESK, budget=500, seed=3, threads=4)
    assert isinstance(a, CycleWitness) and isinstance(b, CycleWitness)
    assert a.to_json_dict() == b.to_json_dict()


def test_verify_witness_rejects_tampering():
    g = complete_graph(24)
    w = find_chordal_cycle(g, DESK, budget=2000, seed=11)
    assert isinstance(w, CycleWitness)
    assert verify_witness(g, w)
    # drop a chord: the count no longer matches the host
    assert not verify_witness(g, CycleWitness(
        w.cycle, w.chords[1:], w.events, w.provenance))
    # break the cycle
    bad_cycle = (w.cycle[0],) + w.cycle[:1] + w.cycle[2:]
    assert not verify_witness(g, CycleWitness(
        bad_cycle, w.chords, w.events, w.provenance))
    assert not verify_witness(g, CycleWitness(
        (0, 1), w.chords, w.events, w.provenance))


def test_witness_json_roundtrip():
    g = complete_graph(24)
    w = find_chordal_cycle(g, DESK, budget=2000, seed=11)
    blob = json.dumps(w.to_json_dict(), sort_keys=True)
    back = CycleWitness.from_json_dict(json.loads(blob))
    assert back.cycle == w.cycle
    assert back.chords == w.chords
    assert verify_witness(g, back)


def test_dot_export_mentions_all_edges():
    g = complete_graph(24)
    w = find_chordal_cycle(g, DESK, budget=2000, seed=11)
    dot = witness_to_dot(w)
    assert dot.count("--") == len(w.cycle) + len(w.chords)
    assert "dashed" in dot


def test_k60_seed7_baseline():
    out = find_chordal_cycle(complete_graph(60), DESK, budget=10**4, seed=7)
    assert isinstance(out, CycleWitness)
    assert verify_witness(complete_graph(60), out)
