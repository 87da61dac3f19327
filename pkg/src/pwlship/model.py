"""Problem data for the a-priori route evaluation problem.

Nodes are indexed ``0 .. n-1`` along the route.  Node ``0`` and node
``n-1`` are always visited.  ``cost[i][j]`` and ``time[i][j]`` are only
meaningful for ``i < j``; ``None`` marks a forbidden arc.

A visited node ``i`` changes the vehicle load by ``y_i`` in the domain of
``profit[i]`` and pays ``profit[i](y_i)``.  A skipped node normally leaves
the load alone and costs nothing.  ``skip_load`` / ``skip_cost`` generalise
this: a skipped node changes the load by ``skip_load[i]`` and costs
``skip_cost[i]``.  The lot-sizing reduction needs this because a period
without production still consumes its demand.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

from .pwl import EPS, PwlFunction, evaluate

Matrix = tuple  # tuple of tuples, None for forbidden / unused entries


class Infeasible(Exception):
    """Raised when an instance (or a restriction of it) has no solution."""


def _freeze(matrix, n) -> Matrix:
    if len(matrix) != n or any(len(row) != n for row in matrix):
        raise ValueError(f"matrix must be {n}x{n}")
    return tuple(tuple(row[j] if j > i else None for j in range(n)) for i, row in enumerate(matrix))


@dataclass(frozen=True, eq=False)
class Instance:
    cost: Matrix
    time: Matrix
    profit: tuple
    qmax: Any
    tmax: Any = None
    skip_load: tuple = ()
    skip_cost: tuple = ()
    cost_metric: Optional[bool] = None
    time_metric: Optional[bool] = None
    name: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.profit)
        if n < 2:
            raise ValueError("an instance needs at least two nodes")
        set_ = object.__setattr__
        set_(self, "profit", tuple(self.profit))
        set_(self, "cost", _freeze(self.cost, n))
        set_(self, "time", _freeze(self.time if self.time is not None else self.cost, n))
        set_(self, "skip_load", tuple(self.skip_load) if self.skip_load else (0,) * n)
        set_(self, "skip_cost", tuple(self.skip_cost) if self.skip_cost else (0,) * n)
        if len(self.skip_load) != n or len(self.skip_cost) != n:
            raise ValueError("skip_load / skip_cost must have one entry per node")
        if self.qmax < 0:
            raise ValueError("qmax must be non-negative")
        for i in range(n):
            for j in range(i + 1, n):
                c, t = self.cost[i][j], self.time[i][j]
                if (c is None) != (t is None):
                    raise ValueError(f"arc ({i},{j}) forbidden in only one of cost/time")
                if t is not None and t < 0:
                    raise ValueError(f"negative travel time on arc ({i},{j})")
        for i, f in enumerate(self.profit):
            if not isinstance(f, PwlFunction) or not f.segments:
                raise ValueError(f"node {i} needs a non-empty profit function")
            if self.standard and (f.lo > 0 or f.hi < 0 or evaluate(f, 0) is None):
                raise ValueError(f"node {i}: profit domain must contain 0 (a_i <= 0 <= b_i)")
        if self.cost_metric is None:
            from .metric import satisfies_triangle
            set_(self, "cost_metric", satisfies_triangle(self.cost))
        if self.time_metric is None:
            from .metric import satisfies_triangle
            set_(self, "time_metric", satisfies_triangle(self.time))

    @property
    def n(self) -> int:
        return len(self.profit)

    @property
    def standard(self) -> bool:
        """No skip effects, i.e. the plain transhipment model."""
        return not any(self.skip_load) and not any(self.skip_cost)

    @property
    def metric(self) -> bool:
        return bool(self.cost_metric and self.time_metric)

    @property
    def integral(self) -> bool:
        """Profit borders, capacity and skip loads are all integers."""
        def isint(x):
            return float(x).is_integer()
        if not isint(self.qmax) or not all(isint(s) for s in self.skip_load):
            return False
        return all(isint(s.lo) and isint(s.hi) for f in self.profit for s in f.segments)

    def replace(self, **changes) -> "Instance":
        data = {k: getattr(self, k) for k in (
            "cost", "time", "profit", "qmax", "tmax", "skip_load", "skip_cost",
            "name", "meta")}
        if "cost" not in changes and "time" not in changes:
            data["cost_metric"] = self.cost_metric
            data["time_metric"] = self.time_metric
        data.update(changes)
        return Instance(**data)

    def arcs(self):
        """All non-forbidden forward arcs ``(i, j, cost, time)``."""
        n = self.n
        for i in range(n):
            for j in range(i + 1, n):
                if self.cost[i][j] is not None:
                    yield i, j, self.cost[i][j], self.time[i][j]


@dataclass(frozen=True)
class Solution:
    visits: tuple
    y: tuple
    objective: Any = None
    duration: Any = None
    load_profile: tuple = ()
    meta: dict = field(default_factory=dict, compare=False)

    def as_dict(self) -> dict:
        return {
            "objective": _plain(self.objective),
            "visits": list(self.visits),
            "y": [_plain(v) for v in self.y],
            "duration": _plain(self.duration),
            "load_profile": [_plain(v) for v in self.load_profile],
        }


def _plain(x):
    if x is None or isinstance(x, (int, float)):
        return x
    if float(x).is_integer():
        return int(x)
    return float(x)


def route_duration(inst: Instance, visits: Sequence[int]):
    total = 0
    for a, b in zip(visits, visits[1:]):
        t = inst.time[a][b]
        if t is None:
            return None
        total += t
    return total


def route_cost(inst: Instance, visits: Sequence[int]):
    total = 0
    for a, b in zip(visits, visits[1:]):
        c = inst.cost[a][b]
        if c is None:
            return None
        total += c
    return total


def load_profile(inst: Instance, visits: Sequence[int], y: Sequence) -> tuple:
    vs = set(visits)
    load, out = 0, []
    for i in range(inst.n):
        load += y[i] if i in vs else inst.skip_load[i]
        out.append(load)
    return tuple(out)


def make_solution(inst: Instance, visits: Sequence[int], y: Sequence, **meta) -> Solution:
    """Fill objective, duration and load profile from a route and transfers."""
    visits = tuple(visits)
    y = tuple(y)
    obj = objective(inst, visits, y)
    return Solution(visits, y, obj, route_duration(inst, visits), load_profile(inst, visits, y), meta)


def _structure(inst: Instance, visits, y) -> list[str]:
    errs = []
    n = inst.n
    if len(y) != n:
        errs.append(f"y has {len(y)} entries, expected {n}")
    if not visits or visits[0] != 0 or visits[-1] != n - 1:
        errs.append("route must start at node 0 and end at node n-1")
    if any(b <= a for a, b in zip(visits, visits[1:])):
        errs.append("visits must be strictly increasing")
    if any(v < 0 or v >= n for v in visits):
        errs.append("visit index out of range")
    for a, b in zip(visits, visits[1:]):
        if 0 <= a < b < n and inst.cost[a][b] is None:
            errs.append(f"forbidden arc ({a},{b})")
    return errs


def objective(inst: Instance, visits, y=None):
    """Travel cost plus transfer cost of visited nodes plus skip costs."""
    if isinstance(visits, Solution):
        visits, y = visits.visits, visits.y
    errs = _structure(inst, visits, y)
    if errs:
        raise ValueError("; ".join(errs))
    vs = set(visits)
    total = 0
    for i in range(inst.n):
        if i in vs:
            v = evaluate(inst.profit[i], y[i])
            if v is None:
                errs.append(f"y[{i}]={y[i]} outside the domain of node {i}")
                continue
            total += v
        else:
            total += inst.skip_cost[i]
    if errs:
        raise ValueError("; ".join(errs))
    return total + route_cost(inst, visits)


def validate(inst: Instance, sol: Solution, tol: float = EPS, check_objective: bool = True) -> list[str]:
    """Return every violated constraint; an empty list means feasible."""
    visits, y = tuple(sol.visits), tuple(sol.y)
    errs = _structure(inst, visits, y)
    if errs:
        return errs
    vs = set(visits)
    for i in range(inst.n):
        if i in vs:
            if evaluate(inst.profit[i], y[i]) is None:
                errs.append(f"y[{i}]={y[i]} outside the domain of node {i}")
        elif abs(y[i] - inst.skip_load[i]) > tol and abs(y[i]) > tol:
            errs.append(f"node {i} skipped but y[{i}]={y[i]}")
    load = 0
    for i in range(inst.n):
        load += y[i] if i in vs else inst.skip_load[i]
        if load < -tol:
            errs.append(f"load below 0 before node {i + 1}")
        if load > inst.qmax + tol:
            errs.append(f"load above qmax after node {i}")
    dur = route_duration(inst, visits)
    if sol.duration is not None and dur is not None and abs(sol.duration - dur) > tol:
        errs.append(f"duration {sol.duration} does not match route time {dur}")
    if inst.tmax is not None and dur is not None and dur > inst.tmax + tol:
        errs.append(f"duration limit: {dur} > {inst.tmax}")
    if check_objective and sol.objective is not None and not errs:
        obj = objective(inst, visits, y)
        if abs(obj - sol.objective) > tol * max(1, abs(obj)):
            errs.append(f"objective {sol.objective} does not match {obj}")
    return errs
