"""End-to-end search for a cycle with at least as many chords as vertices.

One attempt: run a seeded walk on the extracted bipartite expander, keep
it only if fully self-avoiding (E1), close a cycle through a host edge
between the first and last walk quarter (E2), and count chords inside the
cycle's vertex set. The subsample-density event E3 is evaluated as a
diagnostic and recorded on the witness, but acceptance of a witness rides
on the direct chord count alone.

Witnesses returned by :func:`find_chordal_cycle` are expressed in the
input graph's ids with chords re-enumerated against the input, so
:func:`verify_witness` needs nothing but the input graph and the witness.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import __version__
from .cleanup import ExtractResult, extract_expander
from .errors import ExtractionError, PreconditionError
from .graph_core import BipartiteGraph, Graph, internal_edges
from .profiles import ConstantsProfile
from .rng import SplitMix64, stream_seed

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AttemptConfig:
    t: int               # walk length
    k: int               # certified mixing time
    k_prime: int         # odd subsample stride
    q1: int              # first-quarter positions are < q1
    q3: int              # last-quarter positions are > q3
    chord_target: int    # E3 per-segment edge target
    budget: int

    def __post_init__(self):
        if self.k_prime % 2 == 0 or self.k_prime < self.k:
            raise PreconditionError("k_prime must be the odd one of {k, k+1}")
        if self.t < 4 * self.k_prime:
            raise PreconditionError(
                f"walk length {self.t} below 4 k' = {4 * self.k_prime}")
        if self.budget < 1:
            raise PreconditionError("budget must be >= 1")


@dataclass
class CycleWitness:
    cycle: tuple[int, ...]
    chords: tuple[tuple[int, int], ...]
    events: dict
    provenance: dict

    def to_json_dict(self) -> dict:
        return {
            "cycle": list(self.cycle),
            "chords": [list(c) for c in self.chords],
            "events": self.events,
            "provenance": self.provenance,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "CycleWitness":
        return cls(tuple(d["cycle"]),
                   tuple((c[0], c[1]) for c in d["chords"]),
                   dict(d["events"]), dict(d["provenance"]))


@dataclass
class SearchFailure:
    reason: str
    attempts: int = 0
    e1_pass: int = 0
    e2_pass: int = 0
    chord_pass: int = 0
    death_histogram: dict = field(default_factory=dict)
    config: AttemptConfig | None = None

    def to_json_dict(self) -> dict:
        return {
            "reason": self.reason,
            "attempts": self.attempts,
            "e1_pass": self.e1_pass,
            "e2_pass": self.e2_pass,
            "chord_pass": self.chord_pass,
            "death_histogram": {str(k): v for k, v in
                                sorted(self.death_histogram.items())},
        }


def make_config(profile: ConstantsProfile, n_prime: int, d_prime: float,
                k: int, budget: int) -> AttemptConfig:
    """Derive the walk length and targets for an extracted host.

    t follows beta^2 n' / (divisor k), clamped below by max(4k', 8) so the
    quarter windows contain both parities (a bipartite host has no edge
    between positions at even distance), and above by n' - 1 since longer
    walks cannot be self-avoiding.
    """
    k_prime = k if k % 2 == 1 else k + 1
    raw = math.ceil(profile.beta ** 2 * n_prime / (profile.walk_length_divisor * k))
    t = min(n_prime - 1, max(4 * k_prime, 8, raw))
    target = max(1, math.ceil(
        profile.cross_edge_threshold(t, d_prime, k, n_prime)))
    return AttemptConfig(t=t, k=k, k_prime=k_prime,
                         q1=(t + 3) // 4, q3=(3 * t) // 4,
                         chord_target=target, budget=budget)


# ---------------------------------------------------------------------------
# single attempt
# ---------------------------------------------------------------------------

def _closing_pair(g: Graph, steps: list[int], q1: int, q3: int
                  ) -> tuple[int, int] | None:
    """Host edge (steps[i], steps[j]) with i in the first quarter and j in
    the last, maximizing j - i, ties to the lexicographically smallest
    vertex pair. None when no such edge exists."""
    nbr = g.neighbor_sets()
    t = len(steps) - 1
    first = range(0, q1)
    last = range(q3 + 1, t + 1)
    best = None
    for i in first:
        si = steps[i]
        for j in last:
            if steps[j] in nbr[si]:
                key = (-(j - i), si, steps[j])
                if best is None or key < best[0]:
                    best = (key, i, j)
    if best is None:
        return None
    return best[1], best[2]


def _segment_edge_sets(g: Graph, steps: list[int], cfg: AttemptConfig
                       ) -> list[set[tuple[int, int]]]:
    """Edges spanned by each subsampled middle segment W_i(k), i = 1..k."""
    nbr = g.neighbor_sets()
    out = []
    for i in range(1, cfg.k + 1):
        picks = []
        pos = cfg.q1 + i
        while pos <= cfg.q3:
            picks.append(steps[pos])
            pos += cfg.k_prime
        pick_set = set(picks)
        edges = {(min(a, b), max(a, b))
                 for a in pick_set for b in nbr[a] if b in pick_set}
        out.append(edges)
    return out


def assemble_witness(bg: BipartiteGraph, steps: list[int], cfg: AttemptConfig
                     ) -> tuple[dict | None, dict]:
    """Build cycle and chords from a self-avoiding trace. Returns
    (payload or None, stats). The payload has the cycle, chords, and the
    event flags; chords are host edges inside the cycle's vertex set that
    are not cycle edges."""
    g = bg.graph
    stats = {"e1": True, "e2": False, "chords_ok": False, "death_step": None}
    pair = _closing_pair(g, steps, cfg.q1, cfg.q3)
    if pair is None:
        return None, stats
    stats["e2"] = True
    i, j = pair
    cycle = tuple(steps[i:j + 1])
    cyc_set = set(cycle)
    cycle_edges = {(min(a, b), max(a, b))
                   for a, b in zip(cycle, cycle[1:] + cycle[:1])}
    nbr = g.neighbor_sets()
    chords = sorted(
        (a, b)
        for a in cyc_set for b in nbr[a]
        if a < b and b in cyc_set and (a, b) not in cycle_edges)
    total_inside = internal_edges(g, cyc_set)
    if len(chords) != total_inside - len(cycle):
        raise AssertionError("chord recount mismatch against internal_edges")

    seg_edges = _segment_edge_sets(g, steps, cfg)
    # E1 makes the picks of distinct segments disjoint vertex sets, so
    # their spanned edge sets must be pairwise disjoint; check literally
    union = set()
    total = 0
    for es in seg_edges:
        union |= es
        total += len(es)
    if len(union) != total:
        raise AssertionError("segment edge sets are not pairwise disjoint")
    e3 = all(len(es) >= cfg.chord_target for es in seg_edges)

    ok = len(chords) >= len(cycle)
    stats["chords_ok"] = ok
    payload = {
        "cycle": cycle,
        "chords": tuple(chords),
        "events": {"E1": True, "E2": True, "E3": bool(e3)},
    }
    return (payload if ok else None), stats


def attempt(bg: BipartiteGraph, cfg: AttemptConfig, seed: int
            ) -> CycleWitness | None:
    """One seeded attempt on the extracted host; ids are host-local."""
    payload, _ = _attempt_inner(bg, cfg, seed)
    if payload is None:
        return None
    return CycleWitness(
        cycle=payload["cycle"], chords=payload["chords"],
        events=payload["events"],
        provenance={"seed": seed, "t": cfg.t, "k": cfg.k,
                    "k_prime": cfg.k_prime, "start": payload["start"],
                    "graph_id": bg.graph.fingerprint()})


def _attempt_inner(bg: BipartiteGraph, cfg: AttemptConfig, seed: int
                   ) -> tuple[dict | None, dict]:
    g = bg.graph
    rng = SplitMix64(seed)
    start = rng.next_below(g.n)
    steps = [start]
    visited = {start}
    cur = start
    for step_no in range(1, cfg.t + 1):
        row = g.adj[cur]
        cur = row[rng.next_below(len(row))]
        if cur in visited:
            return None, {"e1": False, "e2": False, "chords_ok": False,
                          "death_step": step_no}
        visited.add(cur)
        steps.append(cur)
    payload, stats = assemble_witness(bg, steps, cfg)
    if payload is not None:
        payload["start"] = start
    return payload, stats


# ---------------------------------------------------------------------------
# full pipeline
# ---------------------------------------------------------------------------

def find_chordal_cycle(g: Graph, profile: ConstantsProfile, budget: int,
                       seed: int, threads: int = 1, exact_limit: int = 24
                       ) -> CycleWitness | SearchFailure:
    """Extract an expander, then spend the attempt budget looking for a
    cycle with chords >= length. Attempts use stream seed XOR index; with
    threads > 1 they are evaluated in index chunks and the lowest
    successful index wins, so the result does not depend on thread count.
    """
    if budget < 1:
        raise PreconditionError("budget must be >= 1")
    edge_floor = g.n * (math.log(g.n) ** 8 if profile.preset == "paper" else 4.0) \
        if g.n > 1 else 0.0
    if g.m < edge_floor:
        logger.warning("find_chordal_cycle: %d edges is under the %s-preset "
                       "floor %.0f; the search may be hopeless",
                       g.m, profile.preset, edge_floor)
    try:
        ext = extract_expander(g, profile, strict=False, exact_limit=exact_limit)
    except ExtractionError as exc:
        return SearchFailure(reason=f"extraction failed: {exc}")

    bg = ext.subgraph
    n_prime = bg.graph.n
    d_prime = 2.0 * bg.graph.m / n_prime
    k = ext.profile.mixing_time_bound
    try:
        cfg = make_config(profile, n_prime, d_prime, k, budget)
    except PreconditionError as exc:
        return SearchFailure(reason=f"host too small for a valid config: {exc}")

    fail = SearchFailure(reason="budget exhausted", config=cfg)
    bucket = max(1, cfg.t // 10)

    def run_one(index: int) -> tuple[dict | None, dict]:
        return _attempt_inner(bg, cfg, stream_seed(seed, index))

    def absorb(stats: dict) -> None:
        fail.attempts += 1
        if stats["e1"]:
            fail.e1_pass += 1
            if stats["e2"]:
                fail.e2_pass += 1
                if stats["chords_ok"]:
                    fail.chord_pass += 1
        elif stats["death_step"] is not None:
            b = stats["death_step"] // bucket
            fail.death_histogram[b] = fail.death_histogram.get(b, 0) + 1

    chunk = max(64, threads * 16)
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for base in range(0, budget, chunk):
            indices = range(base, min(base + chunk, budget))
            if pool is not None:
                results = list(pool.map(run_one, indices))
            else:
                results = [run_one(i) for i in indices]
            for index, (payload, stats) in zip(indices, results):
                absorb(stats)
                if payload is None:
                    continue
                return _globalize(g, ext, payload, profile, seed, index, cfg)
    finally:
        if pool is not None:
            pool.shutdown()
    return fail


def _globalize(g: Graph, ext: ExtractResult, payload: dict,
               profile: ConstantsProfile, seed: int, index: int,
               cfg: AttemptConfig) -> CycleWitness:
    """Map a host-local witness to input ids and re-enumerate chords
    against the input graph (a supergraph, so the count can only grow)."""
    mapping = ext.mapping
    cycle = tuple(int(mapping[v]) for v in payload["cycle"])
    cyc_set = set(cycle)
    cycle_edges = {(min(a, b), max(a, b))
                   for a, b in zip(cycle, cycle[1:] + cycle[:1])}
    nbr = g.neighbor_sets()
    chords = tuple(sorted(
        (a, b) for a in cyc_set for b in nbr[a]
        if a < b and b in cyc_set and (a, b) not in cycle_edges))
    wit = CycleWitness(
        cycle=cycle, chords=chords, events=payload["events"],
        provenance={
            "tool_version": __version__,
            "input_hash": g.fingerprint(),
            "seed": seed,
            "attempt_index": index,
            "preset": profile.preset,
            "t": cfg.t, "k": cfg.k, "k_prime": cfg.k_prime,
            "start": int(mapping[payload["start"]]),
            "host_hash": ext.subgraph.graph.fingerprint(),
        })
    if not verify_witness(g, wit):
        raise AssertionError("assembled witness failed verification")
    return wit


# ---------------------------------------------------------------------------
# verification and export
# ---------------------------------------------------------------------------

def verify_witness(g: Graph, w: CycleWitness) -> bool:
    """Exact, pure check: the cycle is a simple host cycle, the chords are
    exactly the non-cycle host edges inside it, and there are at least as
    many chords as cycle vertices."""
    cycle = w.cycle
    L = len(cycle)
    if L < 3:
        return False
    if any(not (0 <= v < g.n) for v in cycle):
        return False
    if len(set(cycle)) != L:
        return False
    nbr = g.neighbor_sets()
    for a, b in zip(cycle, cycle[1:] + cycle[:1]):
        if b not in nbr[a]:
            return False
    cyc_set = set(cycle)
    cycle_edges = {(min(a, b), max(a, b))
                   for a, b in zip(cycle, cycle[1:] + cycle[:1])}
    chords = [tuple(c) for c in w.chords]
    if len(set(chords)) != len(chords):
        return False
    for a, b in chords:
        if not (a < b and a in cyc_set and b in cyc_set):
            return False
        if b not in nbr[a] or (a, b) in cycle_edges:
            return False
    if len(chords) != internal_edges(g, cyc_set) - L:
        return False
    return len(chords) >= L


def witness_to_dot(w: CycleWitness) -> str:
    """Graphviz rendering: cycle edges solid, chords dashed."""
    lines = ["graph witness {", "  node [shape=circle];"]
    for a, b in zip(w.cycle, w.cycle[1:] + w.cycle[:1]):
        lines.append(f"  {a} -- {b} [penwidth=2];")
    for a, b in w.chords:
        lines.append(f"  {a} -- {b} [style=dashed, color=gray40];")
    lines.append("}")
    return "\n".join(lines) + "\n"
