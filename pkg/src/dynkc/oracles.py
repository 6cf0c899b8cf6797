"""Brute-force references for desk-scale instances.

None of these touch the evaluation counter, so they can be called on a live
algorithm's metric without disturbing its work accounting.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .metric import MetricSpace

OPT_MAX_N, OPT_MAX_K = 18, 4
MU_MAX_N, MU_MAX_K = 18, 3
SEQ_MAX_N = 14


class OracleScaleError(ValueError):
    pass


def cost(metric: MetricSpace, P, S) -> float:
    """max_p dist(p, S); 0 for empty P, inf for empty S."""
    P = sorted(P)
    if not P:
        return 0.0
    S = sorted(S)
    if not S:
        return float("inf")
    return float(metric.dist_matrix(P, S, count=False).min(axis=1).max())


def opt_kcenter(metric: MetricSpace, P, k: int) -> tuple[float, tuple[int, ...]]:
    """Exact optimum over all center sets of size at most k drawn from P."""
    P = sorted(P)
    if len(P) > OPT_MAX_N or k > OPT_MAX_K:
        raise OracleScaleError(f"opt_kcenter needs |P| <= {OPT_MAX_N}, k <= {OPT_MAX_K}")
    if not P:
        return 0.0, ()
    D = metric.dist_matrix(P, P, count=False)
    best, witness = np.inf, ()
    for size in range(1, min(k, len(P)) + 1):
        for X in combinations(range(len(P)), size):
            c = float(D[:, X].min(axis=1).max())
            w = tuple(P[i] for i in X)
            if c < best or (c == best and w < witness):
                best, witness = c, w
    return best, witness


def mu(metric: MetricSpace, U, zeta: float, P, k: int) -> float:
    """Smallest r such that some X in P, |X| <= k, has at least zeta|U| points
    of U in the closed ball of radius r and at least (1-zeta)|U| outside the
    open ball. Candidate radii are 0 and every realized distance."""
    U, P = sorted(U), sorted(P)
    if len(P) > MU_MAX_N or len(U) > MU_MAX_N or k > MU_MAX_K:
        raise OracleScaleError(f"mu needs |P|, |U| <= {MU_MAX_N}, k <= {MU_MAX_K}")
    if not U:
        return 0.0
    allpts = sorted(set(U) | set(P))
    radii = np.unique(np.concatenate([[0.0], metric.dist_matrix(allpts, allpts, count=False).ravel()]))
    lo = round(zeta * len(U), 9)
    hi = round((1 - zeta) * len(U), 9)
    D = metric.dist_matrix(U, P, count=False)
    best = np.inf
    for size in range(1, min(k, len(P)) + 1):
        for X in combinations(range(len(P)), size):
            d = D[:, X].min(axis=1)
            closed = (d[None, :] <= radii[:, None]).sum(axis=1)
            outside = (d[None, :] >= radii[:, None]).sum(axis=1)
            ok = np.flatnonzero((closed >= lo) & (outside >= hi))
            if len(ok):
                best = min(best, float(radii[ok[0]]))
    return best


def gonzalez(metric: MetricSpace, P, k: int) -> list[int]:
    """Farthest-first traversal seeded with the smallest id."""
    P = sorted(P)
    if not P:
        raise ValueError("gonzalez needs a nonempty point set")
    centers = [P[0]]
    d = metric.dists(P[0], P, count=False)
    while len(centers) < min(k, len(P)):
        j = int(np.argmax(d))
        if d[j] == 0:
            break
        centers.append(P[j])
        d = np.minimum(d, metric.dists(P[j], P, count=False))
    return centers


def exhaustive_seq_search(kc, root: int) -> list[list[int]]:
    """Every sequence p_1, c_2, p_2, ..., c_l, p_l in the graph the fast
    algorithm sees from the centerless slot `root`: point edges go to the
    heap minimum when it is within r, center edges go to the far non-center
    members of that center's cluster. Returns all of them (empty if none)."""
    if len(kc.P) > SEQ_MAX_N:
        raise OracleScaleError(f"exhaustive_seq_search needs n <= {SEQ_MAX_N}")
    r = kc.r
    found: list[list[int]] = []

    def far_members(slot: int) -> list[int]:
        s = kc.slots[slot]
        qs = sorted(s.members)
        if s.center is None:
            return qs
        d = kc.metric.dists(s.center, qs, count=False)
        return [q for q, dq in zip(qs, d.tolist()) if q != s.center and dq > r]

    def nearest(q: int):
        cs = sorted(kc.center_slot)
        if not cs:
            return None, np.inf
        d = kc.metric.dists(q, cs, count=False)
        j = int(np.argmin(d))
        return cs[j], float(d[j])

    def walk(slot: int, path: list[int], used: set[int]) -> None:
        for q in far_members(slot):
            if q in used:
                continue
            c, d = nearest(q)
            if d > r:
                found.append(path + [q])
                continue
            if c in used:
                continue
            walk(kc.center_slot[c], path + [q, c], used | {q, c})

    walk(root, [], set())
    return found
