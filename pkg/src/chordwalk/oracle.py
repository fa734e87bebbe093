"""Exact reference computations in rational arithmetic.

Everything here is slow and small-n by design: these routines exist to
check the fast paths, never to be fast themselves. No floats appear in
any probability computation.

Walk matrices are handled as scaled integer matrices: with L the lcm of
all degrees, B = L * M has integer entries, and M^k = B^k / L^k exactly.
Python bigints keep this exact at any k.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator

from .errors import PreconditionError
from .graph_core import Graph, internal_edges

WALK_MATRIX_MAX_N = 64
WALK_MATRIX_MAX_K = 100
SELF_AVOID_TREE_LIMIT = 10_000_000
CYCLE_ENUM_MAX_N = 14


def transition_denominator(g: Graph) -> int:
    """lcm of all vertex degrees; scales the walk matrix to integers."""
    if any(d == 0 for d in g.degrees):
        raise PreconditionError("walk matrix needs positive degrees everywhere")
    return math.lcm(*g.degrees)


def scaled_walk_powers(g: Graph, k_max: int, absorb: Iterable[int] = ()
                       ) -> Iterator[tuple[int, list[list[int]], int]]:
    """Yield (k, B^k as row lists, L^k) for k = 1..k_max.

    With absorb nonempty, transitions INTO absorb are zeroed, so row sums
    of B^k / L^k give the probability that steps 1..k all avoid the set.
    """
    n = g.n
    L = transition_denominator(g)
    dead = set(absorb)
    # incoming transition weights per column: column u receives L/d(w)
    # from each neighbour w, unless u is absorbing
    in_weights: list[list[tuple[int, int]]] = [
        [] if u in dead else [(w, L // g.degrees[w]) for w in g.adj[u]]
        for u in range(n)
    ]
    base = [[0] * n for _ in range(n)]
    for v in range(n):
        w = L // g.degrees[v]
        for u in g.adj[v]:
            if u not in dead:
                base[v][u] = w
    rows = base
    den = L
    yield 1, rows, den
    for k in range(2, k_max + 1):
        nxt = [[0] * n for _ in range(n)]
        for v in range(n):
            row = rows[v]
            out = nxt[v]
            for u in range(n):
                acc = 0
                for w, c in in_weights[u]:
                    rw = row[w]
                    if rw:
                        acc += rw * c
                out[u] = acc
        rows = nxt
        den *= L
        yield k, rows, den


def exact_walk_matrix(g: Graph, k: int) -> list[list[Fraction]]:
    """M^k as exact Fractions. Rows sum to 1 exactly. k = 0 is identity."""
    if g.n > WALK_MATRIX_MAX_N:
        raise PreconditionError(f"walk matrix capped at n={WALK_MATRIX_MAX_N}")
    if not 0 <= k <= WALK_MATRIX_MAX_K:
        raise PreconditionError(f"walk matrix power k={k} outside [0, {WALK_MATRIX_MAX_K}]")
    if k == 0:
        return [[Fraction(int(i == j)) for j in range(g.n)] for i in range(g.n)]
    for kk, rows, den in scaled_walk_powers(g, k):
        if kk == k:
            return [[Fraction(x, den) for x in row] for row in rows]
    raise AssertionError("unreachable")


def exact_avoid_event(g: Graph, v: int, avoid: Iterable[int], k: int) -> Fraction:
    """P(steps 1..k of the walk from v all land outside `avoid`), exact."""
    return exact_avoid_event_all(g, avoid, k)[v]


def exact_avoid_event_all(g: Graph, avoid: Iterable[int], k: int) -> list[Fraction]:
    """The avoid-event probability for every start vertex at once."""
    if g.n > WALK_MATRIX_MAX_N:
        raise PreconditionError(f"avoid-event oracle capped at n={WALK_MATRIX_MAX_N}")
    if k < 1:
        raise PreconditionError("avoid-event needs k >= 1")
    dead = set(avoid)
    for kk, rows, den in scaled_walk_powers(g, k, absorb=dead):
        last = (kk, rows, den)
    _, rows, den = last
    return [Fraction(sum(row), den) for row in rows]


def exact_self_avoiding_prob(g: Graph, v: int, length: int,
                             avoid: Iterable[int] = ()) -> Fraction:
    """P(X_0..X_length all distinct and X_1..X_length outside `avoid`),
    by exhaustive walk-tree enumeration.

    The running path probability has denominator = product of degrees
    along the path, so leaves are bucketed by denominator and summed at
    the end; no per-leaf rational arithmetic.
    """
    if length < 0:
        raise PreconditionError("walk length must be nonnegative")
    dmax = max(g.degrees) if g.n else 0
    if dmax == 0:
        raise PreconditionError("self-avoiding oracle needs positive degrees")
    if dmax ** length > SELF_AVOID_TREE_LIMIT:
        raise PreconditionError(
            f"walk tree too large: {dmax}^{length} exceeds {SELF_AVOID_TREE_LIMIT}")
    banned = set(avoid)
    buckets: dict[int, int] = {}

    def descend(u: int, steps_left: int, den: int, path: set[int]) -> None:
        if steps_left == 0:
            buckets[den] = buckets.get(den, 0) + 1
            return
        d = g.degrees[u]
        for w in g.adj[u]:
            if w in path or w in banned:
                continue
            path.add(w)
            descend(w, steps_left - 1, den * d, path)
            path.remove(w)

    descend(v, length, 1, {v})
    return sum((Fraction(c, den) for den, c in buckets.items()), Fraction(0))


@dataclass(frozen=True)
class ChordSurplus:
    """Best cycle found by exhaustive enumeration."""
    cycle: tuple[int, ...]
    chords: int
    surplus: int
    cycles_enumerated: int


def max_chord_surplus(g: Graph) -> ChordSurplus:
    """Enumerate every simple cycle (n <= 14) and maximize
    chords(C) - |C|, where chords(C) = edges inside V(C) minus |C|.

    Canonical form: lowest vertex first and the lexicographically smaller
    of the two directions, so each cycle is counted once. Ties on surplus
    break toward more chords, then the lexicographically smallest cycle.
    Dense graphs near the cap have astronomically many cycles; keep inputs
    sparse or tiny.
    """
    if g.n > CYCLE_ENUM_MAX_N:
        raise PreconditionError(f"cycle enumeration capped at n={CYCLE_ENUM_MAX_N}")
    nbr = g.neighbor_sets()
    best: ChordSurplus | None = None
    count = 0

    def consider(path: tuple[int, ...]) -> None:
        nonlocal best, count
        count += 1
        inside = internal_edges(g, path)
        chords = inside - len(path)
        surplus = chords - len(path)
        # negated ids turn "lexicographically smallest cycle" into a max
        cand = (surplus, chords, tuple(-x for x in path))
        if best is None:
            best = ChordSurplus(path, chords, surplus, 0)
            return
        cur = (best.surplus, best.chords, tuple(-x for x in best.cycle))
        if cand > cur:
            best = ChordSurplus(path, chords, surplus, 0)

    for root in range(g.n):
        stack: list[tuple[int, ...]] = [(root,)]
        while stack:
            path = stack.pop()
            u = path[-1]
            for w in nbr[u]:
                if w <= root:
                    continue
                if w in path:
                    continue
                new = path + (w,)
                # close the cycle if w sees the root; direction dedup:
                # second vertex must be smaller than the closing vertex
                if len(new) >= 3 and root in nbr[w] and new[1] < w:
                    consider(new)
                stack.append(new)
    if best is None:
        raise PreconditionError("graph has no cycles")
    return ChordSurplus(best.cycle, best.chords, best.surplus, count)


@dataclass
class OracleResult:
    """Wrapper the CLI serializes; elapsed stays out of the JSON so reruns
    are byte-identical."""
    kind: str
    value: object
    enumeration_size: int
    elapsed_s: float = field(default=0.0, compare=False)

    def to_json_dict(self) -> dict:
        return {"kind": self.kind, "value": self.value,
                "enumeration_size": self.enumeration_size}


def run_oracle(kind: str, g: Graph, **params) -> OracleResult:
    """Dispatch used by the CLI oracle command."""
    t0 = time.perf_counter()
    if kind == "max_chord_surplus":
        r = max_chord_surplus(g)
        value = {"cycle": list(r.cycle), "chords": r.chords, "surplus": r.surplus}
        size = r.cycles_enumerated
    elif kind == "self_avoiding":
        p = exact_self_avoiding_prob(g, params["v"], params["length"],
                                     params.get("avoid", ()))
        value = {"probability": str(p)}
        size = max(g.degrees) ** params["length"]
    elif kind == "avoid_event":
        p = exact_avoid_event(g, params["v"], params["avoid"], params["k"])
        value = {"probability": str(p)}
        size = g.n ** 2 * params["k"]
    elif kind == "walk_matrix":
        mat = exact_walk_matrix(g, params["k"])
        value = {"rows": [[str(x) for x in row] for row in mat]}
        size = g.n ** 2 * params["k"]
    else:
        raise PreconditionError(f"unknown oracle kind {kind!r}")
    return OracleResult(kind, value, size, time.perf_counter() - t0)
