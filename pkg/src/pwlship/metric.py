"""Shortest and bi-criteria non-dominated paths on the forward-arc DAG.

Matrices are upper triangular with ``None`` for missing arcs.  All paths
run forward (increasing indices).
"""
from __future__ import annotations

from typing import NamedTuple, Optional

from .pwl import EPS


def satisfies_triangle(m, tol: float = EPS) -> bool:
    """``m[i][k] <= m[i][j] + m[j][k]`` for every forward triple with all arcs present."""
    n = len(m)
    for i in range(n):
        for j in range(i + 1, n):
            a = m[i][j]
            if a is None:
                continue
            for k in range(j + 1, n):
                b = m[j][k]
                if b is None:
                    continue
                direct = m[i][k]
                if direct is None or direct > a + b + tol:
                    return False
    return True


def metric_closure(m, forbidden=()):
    """Shortest forward path weight for every pair ``i < j``.

    ``forbidden`` is an iterable of arcs ``(i, j)`` removed before the
    closure.  Unreachable pairs get ``None``.
    """
    dist, _ = shortest_paths(m, forbidden)
    return dist


def shortest_paths(m, forbidden=()):
    """Return ``(dist, via)`` where ``via[i][j]`` lists the intermediate nodes.

    Ties are resolved toward fewer hops and then lexicographically smaller
    intermediate sequences, because the DP visits predecessors in order.
    """
    n = len(m)
    forbidden = set(forbidden)
    dist = [[None] * n for _ in range(n)]
    via = [[None] * n for _ in range(n)]
    for i in range(n):
        # DAG in topological order: relax j in increasing order
        best = {i: (0, ())}
        for j in range(i + 1, n):
            cand = None
            for k in range(i, j):
                if k not in best:
                    continue
                w = m[k][j]
                if w is None or (k, j) in forbidden:
                    continue
                d, path = best[k]
                key = (d + w, len(path) + (k != i), path + ((k,) if k != i else ()))
                if cand is None or key[0] < cand[0] - EPS or (
                        abs(key[0] - cand[0]) <= EPS and key[1:] < cand[1:]):
                    cand = key
            if cand is not None:
                best[j] = (cand[0], cand[2])
                dist[i][j] = cand[0]
                via[i][j] = cand[2]
    return dist, via


class Path(NamedTuple):
    cost: object
    time: object
    via: tuple


def _undominated(paths: list[Path]) -> list[Path]:
    """Weak dominance filter; among equal (cost, time) keep the smallest via."""
    paths = sorted(paths, key=lambda p: (p.cost, p.time, p.via))
    out: list[Path] = []
    for p in paths:
        if any(q.cost <= p.cost + EPS and q.time <= p.time + EPS for q in out):
            continue
        out.append(p)
    return out


def pareto_paths(inst, forbidden=()) -> dict:
    """Non-dominated ``(cost, time)`` forward paths for every pair.

    Returns ``{(i, j): [Path, ...]}`` with lists sorted by cost.
    """
    n = inst.n
    forbidden = set(forbidden)
    out = {}
    for i in range(n):
        labels: dict[int, list[Path]] = {i: [Path(0, 0, ())]}
        for j in range(i + 1, n):
            cand = []
            for k in range(i, j):
                c = inst.cost[k][j]
                if k not in labels or c is None or (k, j) in forbidden:
                    continue
                t = inst.time[k][j]
                extra = (k,) if k != i else ()
                for p in labels[k]:
                    cand.append(Path(p.cost + c, p.time + t, p.via + extra))
            if cand:
                labels[j] = _undominated(cand)
                out[(i, j)] = labels[j]
    return out


def min_time_route(inst, allowed: Optional[set] = None, mandatory=()):
    """Fastest forward path from the first to the last node.

    ``allowed`` restricts which intermediate nodes may be used and every
    node of ``mandatory`` must be visited.  Loads are ignored.  Returns
    ``(time, visits)`` or ``None``.
    """
    n = inst.n
    mandatory = set(mandatory)
    best = {0: (0, (0,))}
    last = 0
    for j in range(1, n):
        if allowed is not None and j != n - 1 and j not in allowed:
            continue
        cand = None
        for k, (tk, path) in best.items():
            if k >= j or k < last or inst.time[k][j] is None:
                continue
            key = (tk + inst.time[k][j], path + (j,))
            if cand is None or key[0] < cand[0] - EPS or (abs(key[0] - cand[0]) <= EPS and key[1] < cand[1]):
                cand = key
        if cand is not None:
            best[j] = cand
        if j in mandatory:
            if cand is None:
                return None
            last = j
    return best.get(n - 1)
