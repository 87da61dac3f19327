"""Dynamic programs over piecewise-linear value functions.

``V[i](q)`` is the cheapest way to leave node ``i`` with load ``q`` after
visiting a subsequence that ends at ``i``.  Moving from ``j`` to ``i``
skips the nodes in between, which only matters when the instance carries
skip loads/costs (lot sizing).  Then the load must stay inside
``[0, qmax]`` after every skipped node, and the skip effects are added on
the way.

Segments of ``V[i]`` carry the tags written by :func:`pwl.superpose`, with
the predecessor key in the first slot.  That is enough to walk back from
the last node.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .model import Infeasible, Instance, Solution, make_solution
from .pwl import (EPS, PwlFunction, Segment, _drop_covered_points, dominates, envelope,
                  evaluate, integerize, restrict, superpose)


@dataclass
class ValueTable:
    V: list                       # per node PwlFunction or None
    inst: Instance
    weights: tuple
    integer: bool
    stats: dict = field(default_factory=dict)


@dataclass
class BudgetTable:
    U: list                       # per node: list of (threshold, PwlFunction)
    inst: Instance
    integer: bool
    stats: dict = field(default_factory=dict)


class Transfer:
    """Precomputed skip windows, skip loads and skip costs for every arc."""

    def __init__(self, inst: Instance):
        n = inst.n
        self.n = n
        self.qmax = inst.qmax
        self.window = {}
        self.load = {}
        self.cost = {}
        sl, sc = inst.skip_load, inst.skip_cost
        plain = inst.standard
        for j in range(n):
            lo, hi, acc, acc_c = 0, inst.qmax, 0, 0
            for i in range(j + 1, n):
                if plain:
                    self.window[j, i] = (0, inst.qmax)
                    self.load[j, i] = 0
                    self.cost[j, i] = 0
                    continue
                self.window[j, i] = (lo, hi) if lo <= hi else None
                self.load[j, i] = acc
                self.cost[j, i] = acc_c
                # node i skipped on longer arcs out of j
                acc += sl[i]
                acc_c += sc[i]
                lo = max(lo, -acc)
                hi = min(hi, inst.qmax - acc)

    def apply(self, V: PwlFunction, j: int, i: int, w, tag) -> Optional[PwlFunction]:
        """Value function at arrival in ``i`` coming straight from ``j``.

        Clip to the skip window, move right by the skip load and add the
        arc weight plus skip cost, all in one pass.
        """
        win = self.window[j, i]
        if win is None:
            return None
        lo, hi = win
        dq = self.load[j, i]
        c = w + self.cost[j, i]
        out = []
        clipped = False
        for s in V.segments:
            a, b, k, d = s[0], s[1], s[2], s[3]
            if a < lo:
                a, clipped = lo, True
            if b > hi:
                b, clipped = hi, True
            if a > b:
                continue
            out.append(Segment(a + dq, b + dq, k, d - k * dq + c, tag))
        if not out:
            return None
        if clipped:
            out = _drop_covered_points(out)
        return PwlFunction(out, check=False)


def _allowed_preds(n: int, mandatory, excluded):
    """``preds[i]`` = nodes that may directly precede ``i``."""
    mandatory = set(mandatory) | {0, n - 1}
    excluded = set(excluded)
    preds = [[] for _ in range(n)]
    last = 0
    for i in range(1, n):
        if i not in excluded:
            preds[i] = [j for j in range(last, i) if j not in excluded]
        if i in mandatory:
            last = i
    return preds


def _check_sets(n, mandatory, excluded):
    mandatory, excluded = set(mandatory), set(excluded)
    if 0 in excluded or n - 1 in excluded:
        raise ValueError("first and last node cannot be excluded")
    if mandatory & excluded:
        raise ValueError("mandatory and excluded sets overlap")
    return mandatory, excluded


def _clean(f: PwlFunction, qmax, integer: bool) -> PwlFunction:
    f = restrict(f, 0, qmax)
    return integerize(f) if integer else f


def solve_no_duration(inst: Instance, mandatory=(), excluded=(), *, weights=None,
                      integer: Optional[bool] = None, force_empty_end: bool = False,
                      transfer: Optional[Transfer] = None, lam=None):
    """Optimal route ignoring the duration limit.

    ``weights`` replaces the arc costs inside the recursion; ``lam`` prices
    travel time, i.e. weights ``c + lam * t`` computed on the fly.  The
    returned objective always uses the original costs.  Returns
    ``(ValueTable, Solution)``.
    """
    n = inst.n
    mandatory, excluded = _check_sets(n, mandatory, excluded)
    if integer is None:
        integer = inst.integral
    w = weights if weights is not None else inst.cost
    tm = inst.time if lam else None
    tr = transfer or Transfer(inst)
    preds = _allowed_preds(n, mandatory, excluded)
    V: list = [None] * n
    V[0] = _clean(inst.profit[0], inst.qmax, integer) or None
    segs = 0
    for i in range(1, n):
        if not preds[i]:
            continue
        cands = []
        for j in preds[i]:
            wji = w[j][i]
            if V[j] is None or wji is None:
                continue
            if tm is not None:
                wji = wji + lam * tm[j][i]
            g = tr.apply(V[j], j, i, wji, j)
            if g is not None:
                cands.append(g)
        if not cands:
            continue
        Vt = envelope(cands)
        if integer:
            Vt = integerize(Vt)
            if not Vt.segments:
                continue
        Vi = _clean(superpose(Vt, inst.profit[i]), inst.qmax, integer)
        V[i] = Vi if Vi.segments else None
        segs += len(Vi)
    table = ValueTable(V, inst, w, integer, {"segments": segs, "lam": lam})
    last = V[n - 1]
    if last is None:
        raise Infeasible("no feasible route reaches the last node")
    if force_empty_end:
        val = evaluate(last, 0)
        if val is None:
            raise Infeasible("last node cannot be left empty")
        q = 0
    else:
        q, val = last.argmin()
    sol = backtrack(table, q, tr)
    sol.meta["value"] = val
    return table, sol


def _pick(f: PwlFunction, q):
    segs = f.segments_at(q)
    if not segs:
        raise RuntimeError(f"backtrack: load {q} outside the value function")
    best = min(s(q) for s in segs)
    good = [s for s in segs if s(q) <= best + EPS * max(1, abs(best))]
    # smallest predecessor first
    return min(good, key=lambda s: _order(s.tag[0]))


def _order(key):
    return key if isinstance(key, tuple) else (key,)


def _walk(inst: Instance, tr: Transfer, q, i, lookup):
    """Follow tags from node ``i`` with leaving load ``q`` back to node 0."""
    n = inst.n
    y = [0] * n
    visits = [i]
    key = None
    f = lookup(i, None)
    while i != 0:
        seg = _pick(f, q)
        key, kind, val = seg.tag
        yi = val if kind == "y" else q - val
        y[i] = yi
        p = q - yi                       # load on arrival at i
        j = key[0] if isinstance(key, tuple) else key
        q = p - tr.load[j, i]
        i = j
        visits.append(i)
        f = lookup(i, key)
    y[0] = q
    visits.reverse()
    for k in range(n):
        if k not in visits:
            y[k] = inst.skip_load[k]
    return visits, y


def _snap(x):
    if isinstance(x, float) and abs(x - round(x)) <= 1e-7:
        return int(round(x))
    return x


def backtrack(table: ValueTable, q, transfer: Optional[Transfer] = None) -> Solution:
    """Recover visits and transfers leaving the last node with load ``q``."""
    inst = table.inst
    tr = transfer or Transfer(inst)
    visits, y = _walk(inst, tr, q, inst.n - 1, lambda i, key: table.V[i])
    if table.integer:
        y = [_snap(v) for v in y]
    return make_solution(inst, visits, y)


# ---------------------------------------------------------------------------
# duration budgets


def solve_with_duration(inst: Instance, mandatory=(), excluded=(), *,
                        integer: Optional[bool] = None, force_empty_end: bool = False):
    """Optimal route with total travel time at most ``inst.tmax``.

    For every node a list of ``(T, U)`` pairs is kept, ``U`` being the best
    value function over all routes of duration at most ``T``.  Pairs are
    only stored when they improve on the previous threshold somewhere.
    Returns ``(BudgetTable, Solution)``.
    """
    from .metric import min_time_route

    n = inst.n
    mandatory, excluded = _check_sets(n, mandatory, excluded)
    if integer is None:
        integer = inst.integral
    tmax = math.inf if inst.tmax is None else inst.tmax
    fastest = min_time_route(inst, allowed=set(range(n)) - excluded)
    if fastest is None or fastest[0] > tmax + EPS:
        raise Infeasible("even the fastest route exceeds the duration limit")
    tr = Transfer(inst)
    preds = _allowed_preds(n, mandatory, excluded)
    U: list = [[] for _ in range(n)]
    base = _clean(inst.profit[0], inst.qmax, integer)
    if base.segments:
        U[0] = [(0, base)]
    pairs = 0
    for i in range(1, n):
        cands = {}
        for j in preds[i]:
            tji = inst.time[j][i]
            if tji is None:
                continue
            for t0, W in U[j]:
                T = t0 + tji
                if T > tmax + EPS:
                    break
                g = tr.apply(W, j, i, inst.cost[j][i], (j, t0))
                if g is not None:
                    cands.setdefault(T, []).append(g)
        acc = None           # envelope of all arrivals so far
        cur = None           # current cumulative U
        out = []
        for T in sorted(cands):
            G = envelope(cands[T])
            if integer:
                G = integerize(G)
                if not G.segments:
                    continue
            if acc is not None and dominates(acc, G):
                continue
            acc = G if acc is None else envelope([acc, G])
            new = _clean(superpose(G, inst.profit[i]), inst.qmax, integer)
            if not new.segments:
                continue
            if cur is not None:
                if dominates(cur, new):
                    continue
                new = envelope([cur, new])
                if integer:
                    new = integerize(new)
            cur = new
            out.append((T, cur))
        U[i] = out
        pairs += len(out)
    table = BudgetTable(U, inst, integer, {"pairs": pairs})
    if not U[n - 1]:
        raise Infeasible("no route within the duration limit")
    T, last = U[n - 1][-1]
    if force_empty_end:
        val = evaluate(last, 0)
        if val is None:
            raise Infeasible("last node cannot be left empty")
        q = 0
    else:
        q, val = last.argmin()
    funcs = [dict(p) for p in U]

    def lookup(i, key):
        return last if key is None else funcs[i][key[1]]

    visits, y = _walk(inst, tr, q, n - 1, lookup)
    if integer:
        y = [_snap(v) for v in y]
    sol = make_solution(inst, visits, y)
    sol.meta["value"] = val
    return table, sol


def budget_value(table: BudgetTable, i: int, T, q):
    """``U_{i,T}(q)``: best value at node ``i`` with budget ``T``."""
    best = None
    for t0, f in table.U[i]:
        if t0 > T:
            break
        best = f
    return None if best is None else evaluate(best, q)
