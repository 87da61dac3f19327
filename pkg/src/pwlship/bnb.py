"""Branch and bound over customer inclusion with Lagrangian bounds.

A node fixes a set ``S`` of customers that must be visited and a set
``T`` that must be skipped.  Its lower bound is the Lagrangian dual of the
restricted problem.  Its upper bound comes from the dual's feasible route
padded with every further customer that still fits the duration limit
(the augmented tour); the plain DP restricted to that tour then picks the
best sub-route.
"""
from __future__ import annotations

import heapq
import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Optional

from .dp import Transfer, solve_no_duration
from .lagrangian import DualResult, solve_dual
from .model import Infeasible, Instance, Solution
from .pwl import EPS


@dataclass
class BranchNode:
    mandatory: frozenset = frozenset()
    excluded: frozenset = frozenset()
    lower_bound: float = -math.inf
    upper_bound: float = math.inf
    ub_solution: Optional[Solution] = None
    augmented_tour: tuple = ()
    tour_solution: Optional[Solution] = None
    dual: Optional[DualResult] = None
    depth: int = 0


@dataclass
class BBResult:
    solution: Solution
    nodes: int
    root_bound: float
    incumbents: list = field(default_factory=list)
    log: list = field(default_factory=list)


def _insert(inst: Instance, visits, node: BranchNode):
    """Add absent customers in route order while the duration allows it."""
    tour = list(visits)
    dur = sum(inst.time[a][b] for a, b in zip(tour, tour[1:]))
    for i in range(1, inst.n - 1):
        if i in node.excluded or i in tour:
            continue
        k = next(p for p, v in enumerate(tour) if v > i)
        a, b = tour[k - 1], tour[k]
        if inst.time[a][i] is None or inst.time[i][b] is None:
            continue
        d = dur - inst.time[a][b] + inst.time[a][i] + inst.time[i][b]
        if d <= inst.tmax + EPS:
            tour.insert(k, i)
            dur = d
    return tuple(tour)


def integral_objective(inst: Instance) -> bool:
    """True when every solution on integer loads has an integer objective.

    Integral data always has an optimum on integer loads, so lower bounds
    can then be rounded up.
    """
    def isint(x):
        return float(x).is_integer()
    if not inst.integral:
        return False
    if not all(isint(c) for row in inst.cost for c in row if c is not None):
        return False
    if not all(isint(c) for c in inst.skip_cost):
        return False
    return all(isint(s.slope) and isint(s.intercept) for f in inst.profit for s in f.segments)


def _fits(sol: Solution, S, T) -> bool:
    v = set(sol.visits)
    return S <= v and not (T & v)


def node_bounds(inst: Instance, node: BranchNode, transfer: Optional[Transfer] = None,
                hint=None, round_up: bool = False, parent: Optional[BranchNode] = None,
                cache: Optional[dict] = None, cutoff=None, integer=None,
                force_empty_end: bool = False) -> BranchNode:
    """Fill the Lagrangian lower bound and the insertion upper bound.

    With ``parent`` given, its dual evaluations and feasible routes that
    satisfy this node's sets are reused.  ``cache`` memoises the DP over
    augmented tours across nodes.  Once the bound reaches ``cutoff`` the
    dual search stops and the tour DP is skipped, the node being pruned.
    """
    tr = transfer or Transfer(inst)
    S, T = set(node.mandatory), set(node.excluded)
    known, refs, fast = [], [], None
    if parent is not None and parent.dual is not None:
        d = parent.dual
        known = [e for e in d.history if _fits(e.primal, S, T)]
        refs = [r for r in (d.feasible, parent.ub_solution, parent.tour_solution)
                if r is not None and _fits(r, S, T) and r.duration <= inst.tmax + EPS]
        if d.fast is not None and _fits(d.fast[1], S, T):
            fast = d.fast
        if hint is None and d.lo is not None:
            hint = (d.lo.lam, d.hi.lam)

    def rounded(v):
        return math.ceil(v - 1e-6) if round_up else v

    stop = None if cutoff is None else (lambda v: rounded(v) >= cutoff)
    try:
        dual = solve_dual(inst, mandatory=S, excluded=T, transfer=tr, hint=hint,
                          known=known, refs=refs, fast=fast, stop=stop, integer=integer,
                          force_empty_end=force_empty_end)
    except Infeasible:
        node.lower_bound = node.upper_bound = math.inf
        return node
    node.dual = dual
    node.lower_bound = rounded(dual.bound)
    best = dual.feasible
    for r in refs:
        if r.objective < best.objective:
            best = r
    if dual.stopped:
        node.ub_solution = best
        node.upper_bound = best.objective
        return node
    tour = _insert(inst, dual.feasible.visits, node)
    outside = frozenset(range(inst.n)) - set(tour)
    key = (frozenset(S), outside)
    if cache is not None and key in cache:
        sol = cache[key]
    else:
        try:
            _, sol = solve_no_duration(inst, S, outside, transfer=tr, integer=integer,
                                       force_empty_end=force_empty_end)
        except Infeasible:
            sol = None
        if cache is not None:
            cache[key] = sol
    node.augmented_tour = tour
    node.tour_solution = sol
    # without the triangle inequality a sub-route of the tour may be slower
    if sol is not None and sol.duration <= inst.tmax + EPS and sol.objective < best.objective:
        best = sol
    node.ub_solution = best
    node.upper_bound = best.objective
    return node


def _solved(inst: Instance, node: BranchNode) -> bool:
    sol = node.tour_solution
    return sol is not None and sol.duration <= inst.tmax + EPS


def branch(inst: Instance, node: BranchNode, rng: random.Random):
    """Two children fixing one random customer, or ``None`` when solved.

    Customers outside the augmented tour are preferred.  When every
    undecided customer is on the tour, the restricted DP over the tour is
    exact for the node; only if its route breaks the duration limit (no
    triangle inequality) the node is split further on tour customers.
    """
    decided = node.mandatory | node.excluded
    free = [i for i in range(1, inst.n - 1) if i not in decided]
    cand = [i for i in free if i not in node.augmented_tour]
    if not cand:
        if _solved(inst, node):
            return None
        cand = free
        if not cand:
            return None
    i = rng.choice(cand)
    child_in = BranchNode(node.mandatory | {i}, node.excluded, depth=node.depth + 1)
    child_out = BranchNode(node.mandatory, node.excluded | {i}, depth=node.depth + 1)
    return child_in, child_out


def solve_bbdp(inst: Instance, seed: int = 0, *, eps=None, max_nodes: Optional[int] = None,
               mandatory=(), excluded=(), integer: Optional[bool] = None,
               force_empty_end: bool = False) -> BBResult:
    """Exact optimum under the duration limit."""
    if inst.tmax is None:
        _, sol = solve_no_duration(inst, mandatory, excluded, integer=integer,
                                   force_empty_end=force_empty_end)
        return BBResult(sol, 1, sol.objective, [sol.objective])
    rng = random.Random(seed)
    tr = Transfer(inst)
    round_up = integral_objective(inst)
    cache: dict = {}
    root = node_bounds(inst, BranchNode(frozenset(mandatory), frozenset(excluded)), tr,
                       round_up=round_up, cache=cache, integer=integer,
                       force_empty_end=force_empty_end)
    if root.ub_solution is None:
        raise Infeasible("no route satisfies the duration limit")
    nodes = 1
    inc = root.ub_solution
    trail = [inc.objective]
    tol = eps if eps is not None else (1e-9 if inst.integral else 1e-9 * max(1, abs(float(inc.objective))))
    counter = itertools.count()
    heap = [(root.upper_bound, root.lower_bound, next(counter), root)]
    log = []
    while heap:
        _, _, _, node = heapq.heappop(heap)
        if node.lower_bound >= inc.objective - tol:
            continue
        kids = branch(inst, node, rng)
        if kids is None:
            continue
        for kid in kids:
            node_bounds(inst, kid, tr, round_up=round_up, parent=node, cache=cache,
                        cutoff=inc.objective - tol, integer=integer,
                        force_empty_end=force_empty_end)
            nodes += 1
            log.append((sorted(kid.mandatory), sorted(kid.excluded), kid.lower_bound, kid.upper_bound))
            if kid.ub_solution is not None and kid.ub_solution.objective < inc.objective:
                inc = kid.ub_solution
                trail.append(inc.objective)
            if kid.lower_bound < inc.objective - tol:
                heapq.heappush(heap, (kid.upper_bound, kid.lower_bound, next(counter), kid))
        if max_nodes is not None and nodes >= max_nodes:
            break
    return BBResult(inc, nodes, root.lower_bound, trail, log)
