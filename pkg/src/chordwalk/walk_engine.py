"""Seeded random walks, subsampling, and Monte Carlo estimators.

Every estimator funnels its randomness through SplitMix64 with the trial
index XORed into the seed, so results are reproducible and independent of
evaluation order (hence of thread count).

Estimates carry a normal-approximation 95% half-width; near-boundary
estimates additionally carry the exact Clopper-Pearson interval, where
the normal approximation is optimistic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import scipy.stats

from .errors import PreconditionError
from .graph_core import SIDE_X, SIDE_Y, BipartiteGraph, Graph, degree_stats
from .oracle import exact_self_avoiding_prob, scaled_walk_powers
from .profiles import ConstantsProfile
from .rng import SplitMix64, stream_seed


def _as_graph(g) -> Graph:
    return g.graph if isinstance(g, BipartiteGraph) else g


@dataclass(frozen=True)
class WalkTrace:
    """A lazy random walk is not needed here: plain simple random walk,
    steps[0] is the start."""
    start: int
    steps: tuple[int, ...]
    seed: int
    graph_id: str


@dataclass(frozen=True)
class SampledSet:
    """Every k'-th step of a walk, k' the odd member of {k, k+1}."""
    k: int
    k_prime: int
    picks: tuple[int, ...]
    graph_id: str


@dataclass(frozen=True)
class Estimate:
    point: float
    trials: int
    ci95: float
    seed: int
    cp95: tuple[float, float] | None = None

    def to_json_dict(self) -> dict:
        out = {"point": self.point, "trials": self.trials,
               "ci95": self.ci95, "seed": self.seed}
        if self.cp95 is not None:
            out["cp95"] = [self.cp95[0], self.cp95[1]]
        return out

    def covers(self, value: float) -> bool:
        return abs(self.point - value) <= self.ci95


def _make_estimate(successes: int, trials: int, seed: int) -> Estimate:
    p = successes / trials
    ci = 1.96 * math.sqrt(p * (1.0 - p) / trials)
    cp = None
    if p < 0.1 or p > 0.9:
        lo = 0.0 if successes == 0 else float(
            scipy.stats.beta.ppf(0.025, successes, trials - successes + 1))
        hi = 1.0 if successes == trials else float(
            scipy.stats.beta.ppf(0.975, successes + 1, trials - successes))
        cp = (lo, hi)
    return Estimate(p, trials, ci, seed, cp)


# ---------------------------------------------------------------------------
# walks and subsampling
# ---------------------------------------------------------------------------

def random_walk(g, start: int, t: int, seed: int) -> WalkTrace:
    """t-step simple random walk; each step picks a uniform index into the
    ascending adjacency list of the current vertex."""
    graph = _as_graph(g)
    if not 0 <= start < graph.n:
        raise PreconditionError(f"start vertex {start} out of range")
    if t < 0:
        raise PreconditionError("negative walk length")
    if any(d == 0 for d in graph.degrees):
        raise PreconditionError("walks need positive degrees everywhere")
    rng = SplitMix64(seed)
    steps = [start]
    cur = start
    for _ in range(t):
        row = graph.adj[cur]
        cur = row[rng.next_below(len(row))]
        steps.append(cur)
    return WalkTrace(start, tuple(steps), seed, graph.fingerprint())


def subsample(trace: WalkTrace, k: int) -> SampledSet:
    """Picks at positions k', 2k', ..., with k' the odd one of {k, k+1}."""
    if k < 1:
        raise PreconditionError("subsample needs k >= 1")
    k_prime = k if k % 2 == 1 else k + 1
    t = len(trace.steps) - 1
    if t < k_prime:
        raise PreconditionError(f"walk length {t} shorter than stride {k_prime}")
    picks = tuple(trace.steps[i * k_prime] for i in range(1, t // k_prime + 1))
    return SampledSet(k, k_prime, picks, trace.graph_id)


def is_self_avoiding(trace: WalkTrace) -> bool:
    return len(set(trace.steps)) == len(trace.steps)


# ---------------------------------------------------------------------------
# Monte Carlo estimators
# ---------------------------------------------------------------------------

def self_avoiding_estimate(g, v: int, length: int, trials: int, seed: int
                           ) -> Estimate:
    """P(the length-step walk from v never revisits a vertex)."""
    graph = _as_graph(g)
    if trials < 1:
        raise PreconditionError("trials must be >= 1")
    successes = 0
    for i in range(trials):
        rng = SplitMix64(stream_seed(seed, i))
        cur = v
        visited = {v}
        ok = True
        for _ in range(length):
            row = graph.adj[cur]
            cur = row[rng.next_below(len(row))]
            if cur in visited:
                ok = False
                break
            visited.add(cur)
        if ok:
            successes += 1
    return _make_estimate(successes, trials, seed)


def avoid_event_estimate(g, v: int, avoid: Iterable[int], k: int,
                         trials: int, seed: int) -> Estimate:
    """P(steps 1..k of the walk from v all miss the avoid set)."""
    graph = _as_graph(g)
    banned = set(avoid)
    if trials < 1 or k < 1:
        raise PreconditionError("need trials >= 1 and k >= 1")
    successes = 0
    for i in range(trials):
        rng = SplitMix64(stream_seed(seed, i))
        cur = v
        ok = True
        for _ in range(k):
            row = graph.adj[cur]
            cur = row[rng.next_below(len(row))]
            if cur in banned:
                ok = False
                break
        if ok:
            successes += 1
    return _make_estimate(successes, trials, seed)


def intersection_tail_estimate(g, members: Iterable[int], t: int, k: int,
                               trials: int, seed: int,
                               profile: ConstantsProfile, start: int = 0
                               ) -> Estimate:
    """P(|picks of the subsampled walk meeting X| <= |X| t / (C k n))."""
    graph = _as_graph(g)
    x = set(members)
    if t > 10 * graph.n:
        raise PreconditionError("tail statement holds only for t <= 10 n")
    theta = profile.intersection_threshold(len(x), t, k, graph.n)
    successes = 0
    for i in range(trials):
        trace = random_walk(graph, start, t, stream_seed(seed, i))
        picks = set(subsample(trace, k).picks)
        if len(picks & x) <= theta:
            successes += 1
    return _make_estimate(successes, trials, seed)


def cross_edges(g, s1: SampledSet, s2: SampledSet) -> int:
    """Host edges with one endpoint among s1's picks and the other among
    s2's picks; each edge counted once."""
    graph = _as_graph(g)
    a, b = set(s1.picks), set(s2.picks)
    count = 0
    for u, v in graph.edges():
        if (u in a and v in b) or (u in b and v in a):
            count += 1
    return count


def cross_edge_tail_estimate(g, t: int, k: int, trials: int, seed: int,
                             profile: ConstantsProfile,
                             start1: int = 0, start2: int = 0) -> Estimate:
    """P(cross edges between two independently subsampled walks stay at or
    below t^2 d / (C k^2 n))."""
    graph = _as_graph(g)
    d_avg = 2.0 * graph.m / graph.n
    bound = profile.cross_edge_threshold(t, d_avg, k, graph.n)
    successes = 0
    for i in range(trials):
        tr1 = random_walk(graph, start1, t, stream_seed(seed, 2 * i))
        tr2 = random_walk(graph, start2, t, stream_seed(seed, 2 * i + 1))
        count = cross_edges(graph, subsample(tr1, k), subsample(tr2, k))
        if count <= bound:
            successes += 1
    return _make_estimate(successes, trials, seed)


def dominated_set_sample(bg: BipartiteGraph, t: int, k: int, q: float,
                         seed: int) -> tuple[int, ...]:
    """The comparison set S for subsample domination: one round per pick,
    round i adds a uniform X-side vertex with probability q when i is even
    and a uniform Y-side vertex when i is odd."""
    if not 0.0 <= q <= 1.0:
        raise PreconditionError("per-round probability must lie in [0, 1]")
    k_prime = k if k % 2 == 1 else k + 1
    if t < k_prime:
        raise PreconditionError(f"walk length {t} shorter than stride {k_prime}")
    xs = bg.side(SIDE_X)
    ys = bg.side(SIDE_Y)
    rng = SplitMix64(seed)
    out: set[int] = set()
    for i in range(1, t // k_prime + 1):
        if rng.next_float() < q:
            pool = xs if i % 2 == 0 else ys
            out.add(pool[rng.next_below(len(pool))])
    return tuple(sorted(out))


# ---------------------------------------------------------------------------
# exact checks against walk-matrix identities
# ---------------------------------------------------------------------------

def reversal_ratio_check(g, v: int, u: int, t: int) -> bool:
    """Detailed-balance identity M^t(v,u) d(v) = M^t(u,v) d(u), checked
    exactly on the scaled integer powers."""
    graph = _as_graph(g)
    if t < 1:
        raise PreconditionError("reversal check needs t >= 1")
    for _, rows, _ in scaled_walk_powers(graph, t):
        pass
    return rows[v][u] * graph.degrees[v] == rows[u][v] * graph.degrees[u]


@dataclass(frozen=True)
class ShortAvoidCheck:
    exact: Fraction
    sharper_bound: float   # (1 - 2k/delta)^k
    coarse_bound: float    # 1 - 200 k^2 / Delta
    ok: bool
    vacuous: bool


def short_avoid_lower_bound_check(g, v: int, avoid: Iterable[int], k: int
                                  ) -> ShortAvoidCheck:
    """Exact P(self-avoiding and S-avoiding k-walk) against its two lower
    bounds. `vacuous` flags a nonpositive coarse bound."""
    graph = _as_graph(g)
    banned = set(avoid)
    if len(banned) > k:
        raise PreconditionError("the bound needs |S| <= k")
    dmin, dmax, _ = degree_stats(graph)
    exact = exact_self_avoiding_prob(graph, v, k, avoid=banned)
    sharper = (1.0 - 2.0 * k / dmin) ** k if dmin > 2 * k else 0.0
    coarse = 1.0 - 200.0 * k * k / dmax
    vacuous = coarse <= 0.0
    ok = (vacuous or float(exact) >= coarse - 1e-12) and \
        float(exact) >= sharper - 1e-12
    return ShortAvoidCheck(exact, sharper, coarse, ok, vacuous)


def aggregate_avoid_deficit(g, avoid: Iterable[int], k: int) -> Fraction:
    """Sum over all start vertices of P(some step 1..k hits the avoid
    set), exactly."""
    from .oracle import exact_avoid_event_all

    graph = _as_graph(g)
    probs = exact_avoid_event_all(graph, avoid, k)
    return sum((1 - p for p in probs), Fraction(0))


# ---------------------------------------------------------------------------
# trace text format
# ---------------------------------------------------------------------------

def format_trace(trace: WalkTrace) -> str:
    lines = [f"# seed {trace.seed}",
             f"# graph {trace.graph_id}",
             f"# start {trace.start}"]
    lines.extend(str(v) for v in trace.steps)
    return "\n".join(lines) + "\n"


def parse_trace(text: str) -> WalkTrace:
    seed = start = None
    graph_id = ""
    steps = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 2 and parts[0] == "seed":
                seed = int(parts[1])
            elif len(parts) == 2 and parts[0] == "graph":
                graph_id = parts[1]
            elif len(parts) == 2 and parts[0] == "start":
                start = int(parts[1])
            continue
        steps.append(int(line))
    if seed is None or start is None or not steps or steps[0] != start:
        raise PreconditionError("malformed walk trace")
    return WalkTrace(start, tuple(steps), seed, graph_id)
