"""Brute-force reference solvers for small instances.

Every visit subsequence is enumerated.  For a fixed subsequence the
transfers are searched on an integer grid (or a caller supplied step) by a
small DP over load states, which is exhaustive on the grid.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction

from .model import Infeasible, Instance, make_solution, route_cost, route_duration
from .pwl import EPS, evaluate


def _grid_points(lo, hi, step):
    k0 = math.ceil(Fraction(lo) / step - Fraction(1, 10 ** 9)) if not isinstance(lo, float) else math.ceil(lo / step - 1e-9)
    k1 = math.floor(Fraction(hi) / step + Fraction(1, 10 ** 9)) if not isinstance(hi, float) else math.floor(hi / step + 1e-9)
    return [k * step for k in range(k0, k1 + 1)]


def _domain_points(f, step):
    pts = set()
    for s in f.segments:
        pts.update(_grid_points(s.lo, s.hi, step))
    return sorted(pts)


def _subsets(n, mandatory=(), excluded=()):
    free = [i for i in range(1, n - 1) if i not in mandatory and i not in excluded]
    fixed = {0, n - 1} | set(mandatory)
    out = []
    for r in range(len(free) + 1):
        for comb in itertools.combinations(free, r):
            out.append(tuple(sorted(fixed | set(comb))))
    out.sort()
    return out


def _best_transfers(inst: Instance, visits, step, force_empty_end=False):
    """Cheapest transfers for a fixed subsequence, or ``None``."""
    vs = set(visits)
    qmax = inst.qmax
    # state: load -> (cost, y list)
    states = {0: (0, ())}
    for i in range(inst.n):
        nxt = {}
        if i in vs:
            f = inst.profit[i]
            ys = [(y, evaluate(f, y)) for y in _domain_points(f, step)]
            for q, (c, hist) in states.items():
                for y, v in ys:
                    q2 = q + y
                    if q2 < -EPS or q2 > qmax + EPS:
                        continue
                    cand = (c + v, hist + (y,))
                    if q2 not in nxt or cand[0] < nxt[q2][0] - EPS:
                        nxt[q2] = cand
        else:
            d, k = inst.skip_load[i], inst.skip_cost[i]
            for q, (c, hist) in states.items():
                q2 = q + d
                if q2 < -EPS or q2 > qmax + EPS:
                    continue
                cand = (c + k, hist + (d,))
                if q2 not in nxt or cand[0] < nxt[q2][0] - EPS:
                    nxt[q2] = cand
        states = nxt
        if not states:
            return None
    if force_empty_end:
        states = {q: v for q, v in states.items() if abs(q) <= EPS}
        if not states:
            return None
    return min(states.values(), key=lambda v: v[0])


def brute_force(inst: Instance, respect_tmax: bool = True, grid=None, *,
                mandatory=(), excluded=(), force_empty_end: bool = False):
    """Exhaustive optimum; ties go to the lexicographically smallest visit tuple.

    Without ``grid`` the data must be integral.  With a grid the result is
    only the best grid solution, i.e. an upper bound in general.
    """
    if inst.n > 14:
        raise ValueError("brute force is limited to small instances")
    if grid is None:
        if not inst.integral:
            raise ValueError("non-integral data needs an explicit grid step")
        step = 1
    else:
        step = grid
    tmax = inst.tmax if (respect_tmax and inst.tmax is not None) else None
    best = None
    for visits in _subsets(inst.n, set(mandatory), set(excluded)):
        c = route_cost(inst, visits)
        if c is None:
            continue
        if tmax is not None and route_duration(inst, visits) > tmax + EPS:
            continue
        res = _best_transfers(inst, visits, step, force_empty_end)
        if res is None:
            continue
        total = c + res[0]
        if best is None or total < best[0] - EPS:
            best = (total, visits, res[1])
    if best is None:
        raise Infeasible("no feasible subsequence")
    sol = make_solution(inst, best[1], best[2], exact=grid is None)
    return sol


def feasible_solutions(inst: Instance, respect_tmax: bool = True, mandatory=(), excluded=()):
    """Every (visits, best-transfer cost) pair that admits a feasible plan."""
    tmax = inst.tmax if respect_tmax else None
    out = []
    for visits in _subsets(inst.n, set(mandatory), set(excluded)):
        c = route_cost(inst, visits)
        if c is None:
            continue
        if tmax is not None and route_duration(inst, visits) > tmax + EPS:
            continue
        res = _best_transfers(inst, visits, 1)
        if res is not None:
            out.append((visits, c + res[0]))
    return out


def brute_force_lswrc(ls, respect_tmax: bool = True):
    """Enumerate setups and integer production directly on the lot-sizing data.

    Returns the cheapest :class:`lswrc.Plan`.
    """
    from .lswrc import evaluate_plan

    n = ls.n
    if n > 10:
        raise ValueError("brute force is limited to small instances")
    best = None
    for setups in _subsets(n):
        if any(ls.cost[a][b] is None for a, b in zip(setups, setups[1:])):
            continue
        st = sum(ls.time[a][b] for a, b in zip(setups, setups[1:]))
        if respect_tmax and ls.tmax is not None and st > ls.tmax + EPS:
            continue
        sset = set(setups)
        # DP over inventory with holding costs, exhaustive on integers
        states = {0: (0, ())}
        for i in range(n):
            nxt = {}
            f = ls.production[i]
            options = [(y, evaluate(f, y)) for y in _domain_points(f, 1)] if i in sset else [(0, 0)]
            for q, (c, hist) in states.items():
                for y, v in options:
                    q2 = q + y - ls.demand[i]
                    if q2 < 0 or q2 > ls.qmax:
                        continue
                    cand = (c + v + ls.holding[i] * q2, hist + (y,))
                    if q2 not in nxt or cand[0] < nxt[q2][0]:
                        nxt[q2] = cand
            states = nxt
            if not states:
                break
        if not states:
            continue
        c, prod = min(states.values(), key=lambda v: v[0])
        total = c + sum(ls.cost[a][b] for a, b in zip(setups, setups[1:]))
        if best is None or total < best[0] - EPS:
            best = (total, setups, prod)
    if best is None:
        raise Infeasible("no feasible production plan")
    return evaluate_plan(ls, best[1], best[2])
