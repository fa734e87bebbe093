"""Regularization pipeline: bipartition, almost-regular trim, density
increment, and expander certification.

The end product of :func:`extract_expander` is a connected bipartite
K-almost-regular subgraph whose minimum degree is at least half its
average degree and which carries either an exhaustive no-sparse-cut
certificate (small n) or a spectral certificate.

Every stage logs steps into a :class:`CleanupReport`. Step records use
original input ids throughout, so a report can be replayed against the
input graph line by line.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from .errors import ExtractionError
from .graph_core import (BipartiteGraph, Graph, connected_components,
                         degree_stats, greedy_bipartition, induced_subgraph,
                         internal_edges, is_connected, largest_component,
                         sparse_cut_scan)
from .profiles import ConstantsProfile
from .spectral import SpectralProfile, lambda2_with_vector, spectral_certificate

logger = logging.getLogger(__name__)

EXACT_CUT_LIMIT = 24


@dataclass
class CleanupStep:
    stage: str
    action: str
    size_before: int
    size_after: int
    avg_before: Fraction
    avg_after: Fraction
    detail: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "type": "step",
            "stage": self.stage,
            "action": self.action,
            "size_before": self.size_before,
            "size_after": self.size_after,
            "avg_before": str(self.avg_before),
            "avg_after": str(self.avg_after),
            "detail": self.detail,
        }


@dataclass
class CleanupReport:
    input_fingerprint: str
    preset: str
    input_n: int
    input_m: int
    steps: list[CleanupStep] = field(default_factory=list)
    mapping: tuple[int, ...] = ()
    certification: str = "none"
    lambda_step_value: float = 0.0
    cut_threshold: float = 0.0
    achieved_increment_ratio: float | None = None
    total_claim_ok: bool | None = None
    component_restricted: bool = False
    spectral: SpectralProfile | None = None

    def add(self, step: CleanupStep) -> None:
        self.steps.append(step)

    def to_json_lines(self) -> str:
        lines = [json.dumps({
            "type": "meta",
            "tool_version": __version__,
            "input_hash": self.input_fingerprint,
            "preset": self.preset,
            "n": self.input_n,
            "m": self.input_m,
        }, sort_keys=True)]
        lines.extend(json.dumps(s.to_json_dict(), sort_keys=True) for s in self.steps)
        summary = {
            "type": "summary",
            "mapping": list(self.mapping),
            "certification": self.certification,
            "lambda_step": self.lambda_step_value,
            "cut_threshold": self.cut_threshold,
            "achieved_increment_ratio": self.achieved_increment_ratio,
            "total_claim_ok": self.total_claim_ok,
            "component_restricted": self.component_restricted,
            "spectral": self.spectral.to_json_dict() if self.spectral else None,
        }
        lines.append(json.dumps(summary, sort_keys=True))
        return "\n".join(lines) + "\n"


@dataclass
class ExtractResult:
    subgraph: BipartiteGraph
    mapping: tuple[int, ...]   # final id -> original input id
    profile: SpectralProfile
    report: CleanupReport


# ---------------------------------------------------------------------------
# almost-regular subgraph by dyadic degree bucketing
# ---------------------------------------------------------------------------

def _band_trim(g: Graph, members: list[int], k0: float) -> list[int]:
    """Batch-delete vertices below Delta/K0 in the induced subgraph until
    stable. Returns surviving original-coordinate members (maybe empty)."""
    alive = set(members)
    deg = {v: sum(1 for w in g.adj[v] if w in alive) for v in alive}
    while alive:
        dmax = max(deg[v] for v in alive)
        drop = [v for v in alive if deg[v] * k0 < dmax]
        if not drop:
            break
        for v in drop:
            alive.discard(v)
            for w in g.adj[v]:
                if w in alive:
                    deg[w] -= 1
        for v in drop:
            del deg[v]
    return sorted(alive)


def almost_regular_subgraph(g: Graph, profile: ConstantsProfile
                            ) -> tuple[Graph, tuple[int, ...], list[CleanupStep]]:
    """Induced subgraph that is K0-almost-regular with average degree at
    least d(G) / (divisor * ln n).

    Vertices are grouped into dyadic degree classes [2^i, 2^(i+1)); the
    class pair (i, j), j <= i+1, retaining the most edges is tried first,
    trimmed to the K0 band, and checked against the postconditions; on
    failure the remaining pairs are scanned in retained-edge order.
    """
    if g.m == 0:
        raise ExtractionError("almost_regular", "input has no edges")
    n0, m0 = g.n, g.m
    d0 = Fraction(2 * m0, n0)
    needed = float(d0) / profile.almost_reg_divisor_at(max(2, n0))
    k0 = profile.almost_reg_K0

    buckets: dict[int, list[int]] = {}
    for v in range(g.n):
        if g.degrees[v] > 0:
            buckets.setdefault(g.degrees[v].bit_length() - 1, []).append(v)
    pairs = []
    for i in sorted(buckets):
        pairs.append((i, i))
        if i + 1 in buckets:
            pairs.append((i, i + 1))

    def members_of(pair):
        lo, hi = pair
        out = []
        for b in range(lo, hi + 1):
            out.extend(buckets.get(b, []))
        return sorted(out)

    ranked = sorted(pairs,
                    key=lambda p: (-internal_edges(g, members_of(p)), p))
    steps: list[CleanupStep] = []
    for pair in ranked:
        cand = members_of(pair)
        kept = _band_trim(g, cand, k0)
        if not kept:
            continue
        sub, mapping = induced_subgraph(g, kept)
        if sub.m == 0:
            continue
        dmin, dmax, avg = degree_stats(sub)
        if Fraction(dmax) <= Fraction(k0) * dmin and float(avg) >= needed:
            steps.append(CleanupStep(
                stage="almost_regular", action="bucket_select",
                size_before=n0, size_after=sub.n,
                avg_before=d0, avg_after=avg,
                detail={"pair": list(pair),
                        "degree_range": [1 << pair[0], 1 << (pair[1] + 1)],
                        "candidates": len(cand),
                        "kept": len(mapping)}))
            return sub, mapping, steps
    raise ExtractionError(
        "almost_regular",
        f"no dyadic bucket pair met the K0={k0} band with avg >= {needed:.3f}")


# ---------------------------------------------------------------------------
# sparse cuts
# ---------------------------------------------------------------------------

def find_sparse_cut(g: Graph, threshold: float, exact_limit: int = EXACT_CUT_LIMIT
                    ) -> tuple[tuple[int, ...] | None, bool]:
    """Find U with |U| <= n/2 and e(U, comp) < threshold * d(G) * |U|.

    Returns (cut, exhaustive). With n <= exact_limit the search is a full
    subset scan, so (None, True) certifies no sparse cut exists. Larger
    graphs get a spectral sweep plus a connectivity shortcut; None is then
    only "none found".
    """
    if g.n <= exact_limit:
        return sparse_cut_scan(g, threshold, exact_limit), True
    if g.m == 0:
        return None, False
    comps = connected_components(g)
    if len(comps) > 1:
        # any union of whole components has an empty cut
        comps_sorted = sorted(comps, key=len)
        chosen: list[int] = []
        for comp in comps_sorted:
            if len(chosen) + len(comp) <= g.n // 2:
                chosen.extend(comp)
            else:
                break
        if not chosen:
            chosen = list(comps_sorted[0])
        return tuple(sorted(chosen)), False

    _, vec, _ = lambda2_with_vector(g)
    order = [int(v) for v in np.argsort(vec, kind="stable")]
    d_avg = 2.0 * g.m / g.n
    in_prefix = [False] * g.n
    cut = 0
    best = None  # (ratio, size_key, members)
    for s, v in enumerate(order[:-1], start=1):
        inside = sum(1 for w in g.adj[v] if in_prefix[w])
        cut += g.degrees[v] - 2 * inside
        in_prefix[v] = True
        size = s if s <= g.n // 2 else g.n - s
        if size == 0:
            continue
        ratio = cut / (d_avg * size)
        if ratio < threshold and (best is None or (ratio, size) < best[:2]):
            members = (tuple(sorted(order[:s])) if s <= g.n // 2
                       else tuple(sorted(order[s:])))
            best = (ratio, size, members)
    return (best[2] if best else None), False


# ---------------------------------------------------------------------------
# density increment
# ---------------------------------------------------------------------------

def density_increment(g: Graph, profile: ConstantsProfile,
                      exact_limit: int = EXACT_CUT_LIMIT,
                      step_cap: int | None = None
                      ) -> tuple[Graph, tuple[int, ...], list[CleanupStep], dict]:
    """Shrink toward a subgraph with no low-degree vertex and no sparse cut.

    Loop: remove the lowest-id vertex of degree < d(H)/2 while one exists
    (average degree never drops); otherwise search for a cut U with
    e(U, comp) < (lambda/3) d(H) |U| and keep whichever side the degree
    dichotomy allows, preferring the complement. Lambda is fixed from the
    input size. Terminates when neither rule fires, or raises after
    10 * n steps.
    """
    if g.m == 0:
        raise ExtractionError("density_increment", "input has no edges")
    n0 = g.n
    lam = profile.lambda_step_at(max(2, n0))
    threshold = lam / 3.0
    cap = step_cap if step_cap is not None else 10 * n0

    alive = [True] * n0
    deg = list(g.degrees)
    n_cur, e_cur = n0, g.m
    steps: list[CleanupStep] = []
    spent = 0
    exhaustive_cert = False

    def avg() -> Fraction:
        return Fraction(2 * e_cur, n_cur)

    while True:
        # phase 1: strip low-degree vertices one at a time
        while True:
            victim = -1
            for v in range(n0):
                # deg < d/2 = e/n, exactly: deg * n < e
                if alive[v] and deg[v] * n_cur < e_cur:
                    victim = v
                    break
            if victim < 0:
                break
            if spent >= cap:
                raise ExtractionError(
                    "density_increment", f"step budget {cap} exhausted",
                    report=steps)
            before_avg, before_n = avg(), n_cur
            detail = {"vertex": victim, "degree_at_removal": deg[victim],
                      "n_alive": n_cur, "e_alive": e_cur}
            alive[victim] = False
            e_cur -= deg[victim]
            n_cur -= 1
            for w in g.adj[victim]:
                if alive[w]:
                    deg[w] -= 1
            deg[victim] = 0
            if n_cur == 0 or e_cur == 0:
                raise ExtractionError("density_increment",
                                      "graph collapsed during degree trim")
            steps.append(CleanupStep(
                stage="density_increment", action="remove_low_degree_vertex",
                size_before=before_n, size_after=n_cur,
                avg_before=before_avg, avg_after=avg(), detail=detail))
            spent += 1

        # phase 2: sparse cut search on the current subgraph
        members = [v for v in range(n0) if alive[v]]
        sub, mapping = induced_subgraph(g, members)
        cut, exhaustive_cert = find_sparse_cut(sub, threshold, exact_limit)
        if cut is None:
            final_map = tuple(mapping)
            info = {"lambda": lam, "threshold": threshold,
                    "certification": "exhaustive" if exhaustive_cert else "sweep"}
            return sub, final_map, steps, info

        if spent >= cap:
            raise ExtractionError(
                "density_increment", f"step budget {cap} exhausted", report=steps)
        u_local = set(cut)
        e_u = sum(1 for a in range(sub.n) for b in sub.adj[a]
                  if a < b and a in u_local and b in u_local)
        cut_sz = sum(1 for a in u_local for b in sub.adj[a] if b not in u_local)
        e_comp = e_cur - e_u - cut_sz
        size_u = len(u_local)
        size_comp = n_cur - size_u
        before_avg, before_n = avg(), n_cur

        # dichotomy: complement keeps the average; else U keeps (1-lam) of it
        if e_comp * n_cur >= e_cur * size_comp:
            keep_local = [a for a in range(sub.n) if a not in u_local]
            action = "keep_complement"
        else:
            du = 2.0 * e_u / size_u
            if du + 1e-12 < (1.0 - lam) * float(before_avg):
                raise ExtractionError(
                    "density_increment",
                    "cut dichotomy violated: neither side keeps enough degree")
            keep_local = sorted(u_local)
            action = "keep_U"
        keep_orig = {mapping[a] for a in keep_local}
        for v in range(n0):
            if alive[v] and v not in keep_orig:
                alive[v] = False
                for w in g.adj[v]:
                    if alive[w]:
                        deg[w] -= 1
                deg[v] = 0
        n_cur = len(keep_orig)
        e_cur = sum(deg[v] for v in keep_orig) // 2
        if n_cur == 0 or e_cur == 0:
            raise ExtractionError("density_increment",
                                  "graph collapsed after cut step")
        steps.append(CleanupStep(
            stage="density_increment", action=action,
            size_before=before_n, size_after=n_cur,
            avg_before=before_avg, avg_after=avg(),
            detail={"cut_size": cut_sz, "u_size": size_u,
                    "u_members": [int(mapping[a]) for a in sorted(u_local)],
                    "lambda": lam}))
        spent += 1


# ---------------------------------------------------------------------------
# full extraction
# ---------------------------------------------------------------------------

def extract_expander(g: Graph, profile: ConstantsProfile, strict: bool = True,
                     exact_limit: int = EXACT_CUT_LIMIT) -> ExtractResult:
    """Bipartition, regularize, run the density increment, certify.

    Output postconditions: connected bipartite subgraph, K_final-almost-
    regular, min degree >= half the average degree, no cut below
    (lambda/3) d |U| (exhaustively certified when the final graph is small,
    else backed by the spectral certificate in the report).
    """
    report = CleanupReport(
        input_fingerprint=g.fingerprint(), preset=profile.preset,
        input_n=g.n, input_m=g.m)
    if g.n < 2 or g.m == 0:
        raise ExtractionError("bipartition", "input needs at least one edge",
                              report=report)
    d_in = Fraction(2 * g.m, g.n)
    floor = profile.min_avg_degree_at(max(2, g.n))
    if float(d_in) < floor:
        msg = f"average degree {float(d_in):.2f} below profile floor {floor:.2f}"
        if strict:
            raise ExtractionError("bipartition", msg, report=report)
        logger.warning("extract_expander: %s; proceeding anyway", msg)

    bg0, map0 = greedy_bipartition(g)
    g0 = bg0.graph
    report.add(CleanupStep(
        stage="bipartition", action="greedy_max_cut",
        size_before=g.n, size_after=g0.n,
        avg_before=d_in, avg_after=Fraction(2 * g0.m, g0.n),
        detail={"edges_kept": g0.m, "edges_in": g.m}))
    if 2 * g0.m < g.m:
        raise ExtractionError("bipartition",
                              "local-move cut kept under half the edges",
                              report=report)

    g1, map1, ar_steps = almost_regular_subgraph(g0, profile)
    for s in ar_steps:
        report.add(s)
    map01 = tuple(map0[i] for i in map1)
    d1 = Fraction(2 * g1.m, g1.n)

    current, cur_map = g1, tuple(range(g1.n))
    info: dict = {}
    for _round in range(10):
        g2, map2, di_steps, info = density_increment(current, profile, exact_limit)
        for s in di_steps:
            # rewrite detail ids into original input coordinates
            det = dict(s.detail)
            if "vertex" in det:
                det["vertex"] = int(map01[cur_map[det["vertex"]]])
            if "u_members" in det:
                det["u_members"] = [int(map01[cur_map[a]]) for a in det["u_members"]]
            report.add(CleanupStep(s.stage, s.action, s.size_before, s.size_after,
                                   s.avg_before, s.avg_after, det))
        cur_map = tuple(cur_map[i] for i in map2)
        current = g2
        if is_connected(current):
            break
        current, comp_map = largest_component(current)
        cur_map = tuple(cur_map[i] for i in comp_map)
        report.component_restricted = True
        report.add(CleanupStep(
            stage="certify", action="restrict_largest_component",
            size_before=g2.n, size_after=current.n,
            avg_before=Fraction(2 * g2.m, g2.n),
            avg_after=Fraction(2 * current.m, current.n), detail={}))
    else:
        raise ExtractionError("certify", "could not reach a connected output",
                              report=report)

    g2 = current
    final_map = tuple(map01[i] for i in cur_map)
    report.mapping = final_map
    report.lambda_step_value = info["lambda"]
    report.cut_threshold = info["threshold"]
    report.certification = info["certification"]

    dmin, dmax, d2 = degree_stats(g2)
    if Fraction(dmax) > Fraction(profile.K_final) * dmin:
        raise ExtractionError(
            "certify", f"final graph not {profile.K_final}-almost-regular "
            f"(degrees {dmin}..{dmax})", report=report)
    if 2 * dmin * g2.n < 2 * g2.m:   # dmin < d/2 should be impossible here
        raise ExtractionError("certify", "min degree below half the average",
                              report=report)

    ratio = float(d2 / d1)
    report.achieved_increment_ratio = ratio
    if profile.preset == "paper" and ratio < 0.5:
        raise ExtractionError(
            "certify", f"density increment kept only {ratio:.3f} of d(G1)",
            report=report)
    report.total_claim_ok = bool(
        float(d2) >= float(d_in) / profile.total_divisor_at(max(2, g.n)))

    side_by_orig = {map0[i]: bg0.side_of[i] for i in range(g0.n)}
    sides = tuple(side_by_orig[v] for v in final_map)
    bg_final = BipartiteGraph(g2, sides)
    # exact ratio: a float here can land a hair under dmax/dmin and make
    # the certificate reject its own graph
    spectral = spectral_certificate(bg_final, Fraction(dmax, dmin))
    report.spectral = spectral
    return ExtractResult(bg_final, final_map, spectral, report)


# ---------------------------------------------------------------------------
# report verification helpers
# ---------------------------------------------------------------------------

def verify_trajectory(report: CleanupReport) -> bool:
    """Check the recorded average-degree trajectory of the density
    increment: removals and complement-keeps never lose average degree,
    keep_U steps lose at most a (1 - lambda) factor, and every removal
    fired at degree < d(H)/2 (exact integer replay of the inequality)."""
    lam = report.lambda_step_value
    for s in report.steps:
        if s.stage != "density_increment":
            continue
        if s.action in ("remove_low_degree_vertex", "keep_complement"):
            if s.avg_after < s.avg_before:
                return False
        elif s.action == "keep_U":
            if float(s.avg_after) < (1.0 - lam) * float(s.avg_before) - 1e-9:
                return False
        if s.action == "remove_low_degree_vertex":
            d = s.detail
            if d["degree_at_removal"] * d["n_alive"] >= d["e_alive"]:
                return False
    return True


def verify_trajectory_lines(text: str) -> bool:
    """Same check, straight from serialized JSON lines."""
    lam = None
    rows = [json.loads(line) for line in text.splitlines() if line.strip()]
    for row in rows:
        if row.get("type") == "summary":
            lam = row["lambda_step"]
    if lam is None:
        return False
    for row in rows:
        if row.get("type") != "step" or row["stage"] != "density_increment":
            continue
        before = Fraction(row["avg_before"])
        after = Fraction(row["avg_after"])
        if row["action"] in ("remove_low_degree_vertex", "keep_complement"):
            if after < before:
                return False
        elif row["action"] == "keep_U":
            if float(after) < (1.0 - lam) * float(before) - 1e-9:
                return False
        if row["action"] == "remove_low_degree_vertex":
            d = row["detail"]
            if d["degree_at_removal"] * d["n_alive"] >= d["e_alive"]:
                return False
    return True
