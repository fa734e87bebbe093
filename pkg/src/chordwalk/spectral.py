"""Spectral machinery: second eigenvalue, conductance, mixing certificates.

The walk matrix is M = D^-1 A (row-stochastic). Its spectrum matches the
symmetric normalization N with N[u,v] = A[u,v] / sqrt(d(u) d(v)), which is
what actually gets eigensolved.

The mixing chain: exact conductance (small n) or the expansion-based lower
bound, Cheeger-type upper bound on lambda2, and a certified step count k
with sqrt(K) * lambda2^k <= 1/n^2, after which every k-step distribution
sits within 1/n^2 of the bipartite parity target.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.linalg
import scipy.sparse

from .errors import PreconditionError
from .graph_core import (BipartiteGraph, Graph, SIDE_X, conductance_profile,
                         degree_stats, is_connected)

DENSE_EIG_LIMIT = 4096
POWER_ITER_TOL = 1e-9
POWER_ITER_CAP = 100_000


@dataclass(frozen=True)
class SpectralProfile:
    lambda2: float
    conductance: float
    conductance_is_exact: bool
    mixing_time_bound: int
    certified: bool

    def to_json_dict(self) -> dict:
        return {
            "lambda2": self.lambda2,
            "conductance": self.conductance,
            "conductance_is_exact": self.conductance_is_exact,
            "mixing_time_bound": self.mixing_time_bound,
            "certified": self.certified,
        }


def _check_walk_ready(g: Graph) -> None:
    if g.n < 2:
        raise PreconditionError("spectral analysis needs at least 2 vertices")
    if any(d == 0 for d in g.degrees):
        raise PreconditionError("isolated vertex: walk matrix undefined")
    if not is_connected(g):
        raise PreconditionError("graph must be connected")


def normalized_adjacency(g: Graph) -> np.ndarray:
    d = np.array(g.degrees, dtype=np.float64)
    N = np.zeros((g.n, g.n))
    for u in range(g.n):
        for v in g.adj[u]:
            N[u, v] = 1.0
    scale = 1.0 / np.sqrt(d)
    return N * scale[:, None] * scale[None, :]


def _sparse_normalized(g: Graph) -> scipy.sparse.csr_matrix:
    d = np.array(g.degrees, dtype=np.float64)
    rows, cols = [], []
    for u in range(g.n):
        rows.extend([u] * len(g.adj[u]))
        cols.extend(g.adj[u])
    vals = 1.0 / np.sqrt(d[rows] * d[cols])
    return scipy.sparse.csr_matrix((vals, (rows, cols)), shape=(g.n, g.n))


def _power_iteration_lambda2(g: Graph) -> tuple[float, np.ndarray, bool]:
    """Shifted power iteration on (N + I)/2 with the known top eigenvector
    (proportional to sqrt(d)) deflated out. Returns (lambda2, vector,
    converged)."""
    N = _sparse_normalized(g)
    n = g.n
    phi = np.sqrt(np.array(g.degrees, dtype=np.float64))
    phi /= np.linalg.norm(phi)
    rng_free = np.cos(np.arange(1, n + 1))  # fixed deterministic start
    x = rng_free - (rng_free @ phi) * phi
    x /= np.linalg.norm(x)
    mu_prev = math.inf
    for _ in range(POWER_ITER_CAP):
        y = 0.5 * (N @ x + x)
        y -= (y @ phi) * phi
        norm = np.linalg.norm(y)
        if norm < 1e-300:
            # deflated operator annihilated x: lambda2 of the shift is 0
            return -1.0, x, True
        x = y / norm
        mu = x @ (0.5 * (N @ x + x))
        if abs(mu - mu_prev) <= POWER_ITER_TOL:
            return 2.0 * mu - 1.0, x, True
        mu_prev = mu
    warnings.warn("power iteration for lambda2 did not converge; "
                  "returning the last iterate", RuntimeWarning)
    return 2.0 * mu_prev - 1.0, x, False


def lambda2(g: Graph, dense_limit: int = DENSE_EIG_LIMIT) -> float:
    """Second-largest eigenvalue of the normalized walk operator."""
    val, _, _ = lambda2_with_vector(g, dense_limit)
    return val


def lambda2_with_vector(g: Graph, dense_limit: int = DENSE_EIG_LIMIT
                        ) -> tuple[float, np.ndarray, bool]:
    """(lambda2, eigenvector of N for it, converged flag)."""
    _check_walk_ready(g)
    if g.n <= dense_limit:
        N = normalized_adjacency(g)
        vals, vecs = scipy.linalg.eigh(N, subset_by_index=(g.n - 2, g.n - 1))
        return float(vals[0]), vecs[:, 0], True
    return _power_iteration_lambda2(g)


def conductance_exact(g: Graph, limit: int = 24) -> tuple[Fraction, tuple[int, ...]]:
    """Exhaustive conductance with a minimizing witness set (small n)."""
    return conductance_profile(g, limit)


def conductance_lower_bound(lam: float, k: float) -> float:
    """Conductance >= lambda / K for a K-almost-regular lambda-expander."""
    if k < 1 or lam <= 0:
        raise PreconditionError("need K >= 1 and lambda > 0")
    return lam / k


def lambda2_upper_bound(phi: float) -> float:
    """lambda2 <= 1 - phi^2 / 8 (discrete-curvature bound)."""
    if phi < 0:
        raise PreconditionError("conductance cannot be negative")
    return 1.0 - phi * phi / 8.0


def mixing_time_bound(k: float, lam: float, n) -> int:
    """ceil(30 K^2 lambda^-2 ln n): steps until within-1/n^2 mixing."""
    if k < 1 or lam <= 0 or n <= 1:
        raise PreconditionError("need K >= 1, lambda > 0, n > 1")
    return math.ceil(30.0 * k * k * math.log(n) / (lam * lam))


# ---------------------------------------------------------------------------
# walk distributions and the mixing definition
# ---------------------------------------------------------------------------

def _dense_transition(g: Graph) -> np.ndarray:
    M = np.zeros((g.n, g.n))
    for v in range(g.n):
        w = 1.0 / g.degrees[v]
        for u in g.adj[v]:
            M[v, u] = w
    return M


def walk_distribution(bg: BipartiteGraph, v: int, k: int) -> np.ndarray:
    """Row v of M^k by k vector products. Entries of mismatched parity are
    structural zeros (never touched, so exactly 0.0)."""
    g = bg.graph
    _check_walk_ready(g)
    if not 0 <= v < g.n:
        raise PreconditionError(f"start vertex {v} out of range")
    if k < 0:
        raise PreconditionError("negative step count")
    p = np.zeros(g.n)
    p[v] = 1.0
    for _ in range(k):
        q = p / np.array(g.degrees, dtype=np.float64)
        nxt = np.zeros(g.n)
        for u in range(g.n):
            row = g.adj[u]
            if row:
                nxt[u] = q[list(row)].sum()
        p = nxt
    return p


def parity_targets(bg: BipartiteGraph, v: int, k: int) -> np.ndarray:
    """Stationary-with-parity target: d(u)/2m * (1 + (-1)^(k + [v in X] + [u in X]))."""
    g = bg.graph
    twom = 2.0 * g.m
    sx = np.array([1 if s == SIDE_X else 0 for s in bg.side_of])
    parity = (k + sx[v] + sx) % 2
    factor = np.where(parity == 0, 2.0, 0.0)
    return np.array(g.degrees, dtype=np.float64) / twom * factor


def _matrix_power_iter(g: Graph, k_max: int):
    M = _dense_transition(g)
    P = np.eye(g.n)
    for k in range(1, k_max + 1):
        P = P @ M
        yield k, P


def verify_mixing(bg: BipartiteGraph, k: int) -> bool:
    """True iff every entry of M^k is within 1/n^2 of its parity target."""
    g = bg.graph
    _check_walk_ready(g)
    if k < 1:
        raise PreconditionError("mixing check needs k >= 1")
    tol = 1.0 / (g.n * g.n)
    for kk, P in _matrix_power_iter(g, k):
        pass
    return _mixing_holds(bg, P, k, tol)


def _mixing_holds(bg: BipartiteGraph, P: np.ndarray, k: int, tol: float) -> bool:
    g = bg.graph
    twom = 2.0 * g.m
    sx = np.array([1 if s == SIDE_X else 0 for s in bg.side_of])
    deg = np.array(g.degrees, dtype=np.float64)
    parity = (k + sx[:, None] + sx[None, :]) % 2
    target = np.where(parity == 0, 2.0, 0.0) * deg[None, :] / twom
    return bool(np.abs(P - target).max() <= tol)


def empirical_mixing_time(bg: BipartiteGraph, k_max: int) -> int | None:
    """Smallest k <= k_max passing verify_mixing, or None if none does."""
    g = bg.graph
    _check_walk_ready(g)
    tol = 1.0 / (g.n * g.n)
    for k, P in _matrix_power_iter(g, k_max):
        if _mixing_holds(bg, P, k, tol):
            return k
    return None


def exact_mixing_violations(bg: BipartiteGraph, k_max: int) -> int:
    """Count entries (k, v, u), k = 1..k_max, where the exact rational walk
    matrix breaks |M^k(v,u) - target| <= sqrt(d(u)/d(v)) * lam^k + 1e-9.

    lam is a rational sitting 2^-30 above the float second eigenvalue, so
    rounding in the eigensolve cannot manufacture a violation. The verdict
    itself is all-integer: with M^k(v,u) = N/(L^k 2m), the deviation check
    squares to

        (N * 10^9 - L^k 2m)^2 * d(v) * Q^2k <= d(u) * P^2k * (L^k 2m 10^9)^2

    whenever the deviation exceeds the 1e-9 slack on its own.
    """
    from .oracle import scaled_walk_powers

    g = bg.graph
    _check_walk_ready(g)
    if k_max < 1:
        raise PreconditionError("mixing check needs k_max >= 1")
    lam = Fraction(max(lambda2(g), 0.0)) + Fraction(1, 1 << 30)
    P, Q = lam.numerator, lam.denominator
    sx = bg.side_of
    deg = g.degrees
    m2 = 2 * g.m
    billion = 10**9
    violations = 0
    for k, rows, lk in scaled_walk_powers(g, k_max):
        p2k, q2k = P ** (2 * k), Q ** (2 * k)
        a = lk * m2
        a9_sq = (a * billion) ** 2
        for v in range(g.n):
            row = rows[v]
            dv = deg[v]
            par = (k + sx[v]) % 2
            for u in range(g.n):
                t_num = 2 * deg[u] if (par + sx[u]) % 2 == 0 else 0
                num = abs(row[u] * m2 - t_num * lk)  # deviation * a
                spread = num * billion - a
                if spread <= 0:
                    continue  # within the additive 1e-9 slack alone
                if spread * spread * dv * q2k > deg[u] * p2k * a9_sq:
                    violations += 1
    return violations


def spectral_certificate(bg: BipartiteGraph,
                         k_almost: float | Fraction) -> SpectralProfile:
    """Certified mixing bound: smallest k with sqrt(K) lambda2^k <= 1/n^2.

    Sound because deviations from the parity target are bounded by
    sqrt(d(u)/d(v)) * lambda2^k <= sqrt(K) * lambda2^k entrywise. The
    conductance field carries the (1 - lambda2)/2 lower bound, flagged
    non-exact.
    """
    g = bg.graph
    _check_walk_ready(g)
    dmin, dmax, _ = degree_stats(g)
    if Fraction(dmax) > Fraction(k_almost) * dmin:
        raise PreconditionError(
            f"graph is not {k_almost}-almost-regular (degrees {dmin}..{dmax})")
    lam2, _, converged = lambda2_with_vector(g)
    if lam2 >= 1.0 - 1e-12:
        raise PreconditionError("lambda2 too close to 1; no useful certificate")
    target = 1.0 / (g.n * g.n)
    root_k = math.sqrt(k_almost)
    if lam2 <= 0.0:
        k = 1
    else:
        k = max(1, math.ceil(math.log(target / root_k) / math.log(lam2)))
        while root_k * lam2 ** k > target:
            k += 1
        while k > 1 and root_k * lam2 ** (k - 1) <= target:
            k -= 1
    return SpectralProfile(
        lambda2=lam2,
        conductance=(1.0 - lam2) / 2.0,
        conductance_is_exact=False,
        mixing_time_bound=k,
        certified=converged,
    )
