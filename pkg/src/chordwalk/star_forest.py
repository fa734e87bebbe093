"""Greedy star forests and root-disjoint families in bipartite graphs.

A star forest is a vertex-disjoint set of stars, roots on side X, leaves
on side Y. A root-disjoint family reuses leaves across forests but never
roots; after each round the used roots are deleted and vertices whose
degree fell below a quarter of the original minimum degree are pruned.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .errors import PreconditionError, StarForestError
from .graph_core import SIDE_X, BipartiteGraph, degree_stats
from .profiles import ConstantsProfile


@dataclass(frozen=True)
class Star:
    root: int
    leaves: tuple[int, ...]


@dataclass(frozen=True)
class StarForest:
    stars: tuple[Star, ...]

    def roots(self) -> tuple[int, ...]:
        return tuple(s.root for s in self.stars)

    def vertices(self) -> set[int]:
        out = set()
        for s in self.stars:
            out.add(s.root)
            out.update(s.leaves)
        return out

    def to_json(self) -> str:
        return json.dumps(
            [{"root": s.root, "leaves": list(s.leaves)} for s in self.stars],
            sort_keys=True)


def forest_is_valid(bg: BipartiteGraph, forest: StarForest, star_size: int) -> bool:
    """Vertex-disjoint, roots on X, every leaf adjacent to its root,
    every star exactly star_size leaves."""
    seen: set[int] = set()
    nbr = bg.graph.neighbor_sets()
    for s in forest.stars:
        if bg.side_of[s.root] != SIDE_X or len(s.leaves) != star_size:
            return False
        group = {s.root, *s.leaves}
        if len(group) != 1 + len(s.leaves) or group & seen:
            return False
        if any(leaf not in nbr[s.root] for leaf in s.leaves):
            return False
        seen |= group
    return True


def _greedy_forest(bg: BipartiteGraph, star_size: int, target_count: int,
                   blocked: set[int]) -> StarForest:
    """Scan X-side roots in ascending id order; claim the star_size lowest
    unused neighbours when enough are free. `blocked` vertices are treated
    as absent from the graph."""
    used: set[int] = set()
    stars: list[Star] = []
    for root in range(bg.graph.n):
        if len(stars) == target_count:
            break
        if bg.side_of[root] != SIDE_X or root in blocked or root in used:
            continue
        free = [b for b in bg.graph.adj[root] if b not in blocked and b not in used]
        if len(free) >= star_size:
            leaves = tuple(free[:star_size])
            used.add(root)
            used.update(leaves)
            stars.append(Star(root, leaves))
    return StarForest(tuple(stars))


def maximal_star_forest(bg: BipartiteGraph, star_size: int, target_count: int
                        ) -> StarForest:
    """Greedy forest; stops at target_count or when no root qualifies.

    On an unmet target the result is maximal: every unused X vertex has
    fewer than star_size unused neighbours (see :func:`is_maximal`).
    """
    if star_size < 1 or target_count < 1:
        raise PreconditionError("star size and target count must be >= 1")
    return _greedy_forest(bg, star_size, target_count, set())


def is_maximal(bg: BipartiteGraph, forest: StarForest, star_size: int,
               blocked: set[int] | None = None) -> bool:
    """Certificate for an unmet target: no unused root could start a star."""
    blocked = blocked or set()
    used = forest.vertices() | blocked
    for root in range(bg.graph.n):
        if bg.side_of[root] != SIDE_X or root in used:
            continue
        free = sum(1 for b in bg.graph.adj[root] if b not in used)
        if free >= star_size:
            return False
    return True


def root_disjoint_family(bg: BipartiteGraph, profile: ConstantsProfile
                         ) -> list[StarForest]:
    """d/forest_count_divisor rounds of star extraction with cumulative
    root removal and quarter-degree pruning between rounds.

    All sizes come from the profile with d = min degree of the input:
    each forest has n/(star_count_divisor * d) stars of size
    d/star_size_divisor. A short round raises StarForestError naming the
    round and the achieved count.
    """
    g = bg.graph
    dmin, dmax, _ = degree_stats(g)
    d = dmin
    if d < profile.min_degree_floor:
        raise PreconditionError(
            f"min degree {d} below profile floor {profile.min_degree_floor}")
    if Fraction(dmax) > Fraction(profile.K_final) * dmin:
        raise PreconditionError(
            f"input not {profile.K_final}-almost-regular (degrees {dmin}..{dmax})")
    count = profile.star_count(g.n, d)
    size = profile.star_size(d)
    rounds = profile.forest_count(d)
    if count < 1 or size < 1 or rounds < 1:
        raise PreconditionError(
            f"degenerate star-forest parameters: count={count}, size={size}, "
            f"rounds={rounds}")

    removed_roots: set[int] = set()
    family: list[StarForest] = []
    for r in range(1, rounds + 1):
        # prune: recompute degrees without the removed roots, cascade
        # out anything under d/4
        blocked = set(removed_roots)
        deg = [0] * g.n
        for v in range(g.n):
            if v not in blocked:
                deg[v] = sum(1 for w in g.adj[v] if w not in blocked)
        changed = True
        while changed:
            changed = False
            drop = [v for v in range(g.n)
                    if v not in blocked and 4 * deg[v] < d]
            for v in drop:
                blocked.add(v)
                for w in g.adj[v]:
                    if w not in blocked:
                        deg[w] -= 1
                changed = True
        forest = _greedy_forest(bg, size, count, blocked)
        if len(forest.stars) < count:
            raise StarForestError(r, len(forest.stars), count)
        family.append(forest)
        removed_roots.update(forest.roots())
    return family
