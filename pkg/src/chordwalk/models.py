"""Graph builders: fixed families and seeded random models.

Random models draw exclusively from :class:`chordwalk.rng.SplitMix64`, so
a (model, params, seed) triple pins the output graph exactly.
"""

from __future__ import annotations

import math

from .errors import PreconditionError
from .graph_core import SIDE_X, SIDE_Y, BipartiteGraph, Graph
from .rng import SplitMix64, stream_seed


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise PreconditionError(f"cycle needs n >= 3, got {n}")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star_graph(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def complete_bipartite_sides(a: int, b: int) -> BipartiteGraph:
    g = complete_bipartite(a, b)
    return BipartiteGraph(g, tuple([SIDE_X] * a + [SIDE_Y] * b))


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    spokes = [(i, 5 + i) for i in range(5)]
    return Graph.from_edges(10, outer + inner + spokes)


def _shuffle(items: list, rng: SplitMix64) -> None:
    for i in range(len(items) - 1, 0, -1):
        j = rng.next_below(i + 1)
        items[i], items[j] = items[j], items[i]


def _pairs_before_row(i: int, n: int) -> int:
    # pairs (a, b) with a < b and a < i
    return i * (n - 1) - i * (i - 1) // 2


def _decode_pair(k: int, n: int) -> tuple[int, int]:
    lo, hi = 0, n - 1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if _pairs_before_row(mid, n) <= k:
            lo = mid
        else:
            hi = mid - 1
    return lo, lo + 1 + (k - _pairs_before_row(lo, n))


def _bernoulli_indices(total: int, p: float, rng: SplitMix64) -> list[int]:
    """Indices of successes among `total` independent Bernoulli(p) slots,
    sampled by geometric gap jumps (one draw per success)."""
    if p <= 0.0 or total == 0:
        return []
    if p >= 1.0:
        return list(range(total))
    log_q = math.log1p(-p)
    out = []
    idx = -1
    while True:
        u = rng.next_float()
        gap = int(math.log1p(-u) / log_q) + 1
        idx += gap
        if idx >= total:
            return out
        out.append(idx)


def gnp_graph(n: int, p: float, seed: int) -> Graph:
    """Erdos-Renyi G(n, p)."""
    rng = SplitMix64(seed)
    total = n * (n - 1) // 2
    edges = [_decode_pair(k, n) for k in _bernoulli_indices(total, p, rng)]
    return Graph.from_edges(n, edges)


def connected_gnp_graph(n: int, p: float, seed: int, max_tries: int = 500) -> Graph:
    """First connected G(n, p) along the derived stream sequence."""
    from .graph_core import is_connected

    for t in range(max_tries):
        g = gnp_graph(n, p, stream_seed(seed, t))
        if is_connected(g):
            return g
    raise PreconditionError(
        f"no connected G({n}, {p}) found in {max_tries} tries; raise p")


def random_bipartite_graph(n1: int, n2: int, p: float, seed: int) -> Graph:
    """Bipartite G(n1, n2, p): sides 0..n1-1 and n1..n1+n2-1."""
    rng = SplitMix64(seed)
    edges = [(k // n2, n1 + k % n2)
             for k in _bernoulli_indices(n1 * n2, p, rng)]
    return Graph.from_edges(n1 + n2, edges)


def random_regular_graph(n: int, d: int, seed: int, max_tries: int = 200) -> Graph:
    """Uniform-ish d-regular graph by the pairing model with rejection."""
    if d >= n or (n * d) % 2 == 1 or d < 1:
        raise PreconditionError(f"no d-regular graph with n={n}, d={d}")
    for t in range(max_tries):
        rng = SplitMix64(stream_seed(seed, t))
        stubs = [v for v in range(n) for _ in range(d)]
        _shuffle(stubs, rng)
        edges = set()
        ok = True
        for i in range(0, len(stubs), 2):
            u, v = stubs[i], stubs[i + 1]
            if u == v or (min(u, v), max(u, v)) in edges:
                ok = False
                break
            edges.add((min(u, v), max(u, v)))
        if ok:
            return Graph.from_edges(n, sorted(edges))
    raise PreconditionError(f"pairing model failed after {max_tries} tries")


def shift_regular_bipartite(n_side: int, d: int, seed: int) -> BipartiteGraph:
    """Union of d distinct cyclic-shift matchings: i -- n_side + (i+s) mod n_side.

    Exactly d-regular on both sides, so min-degree preconditions hold by
    construction. The shift set is a uniform d-subset of 0..n_side-1.
    """
    if not 1 <= d <= n_side:
        raise PreconditionError(f"need 1 <= d <= n_side, got d={d}, n={n_side}")
    rng = SplitMix64(seed)
    pool = list(range(n_side))
    for i in range(d):
        j = i + rng.next_below(n_side - i)
        pool[i], pool[j] = pool[j], pool[i]
    shifts = pool[:d]
    edges = [(i, n_side + (i + s) % n_side)
             for s in shifts for i in range(n_side)]
    g = Graph.from_edges(2 * n_side, sorted(edges))
    return BipartiteGraph(g, tuple([SIDE_X] * n_side + [SIDE_Y] * n_side))


def matching_union_bipartite(n_side: int, d: int, seed: int) -> BipartiteGraph:
    """Union of d random perfect matchings between two sides of size n_side.

    Collisions collapse, so degrees land in [d - few, d]; the result is
    comfortably 8-almost-regular for the d used in tests.
    """
    rng = SplitMix64(seed)
    edges = set()
    for _ in range(d):
        perm = list(range(n_side))
        _shuffle(perm, rng)
        for i in range(n_side):
            edges.add((i, n_side + perm[i]))
    g = Graph.from_edges(2 * n_side, sorted(edges))
    return BipartiteGraph(g, tuple([SIDE_X] * n_side + [SIDE_Y] * n_side))
