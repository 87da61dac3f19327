"""Lot sizing with requalification costs and its reduction to route evaluation.

Periods ``0 .. n-1``.  Producing in period ``i`` requires a setup there; a
setup in ``j`` following the previous setup in ``i`` costs ``cost[i][j]``
and uses ``time[i][j]`` of the setup resource.  The first and last
periods always carry a setup.  Inventory after period ``i`` is
``q_i = q_{i-1} + y_i - d_i`` and has to stay in ``[0, qmax]``.

Total cost = setups + production cost of setup periods + sum ``h_i q_i``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

from .model import Instance, Solution
from .pwl import EPS, PwlFunction, Segment, evaluate, translate


@dataclass(frozen=True, eq=False)
class LotSizingInstance:
    demand: tuple
    holding: tuple
    production: tuple            # PwlFunction per period on [a_i, b_i]
    cost: tuple
    qmax: Any
    tmax: Any = None
    time: Optional[tuple] = None
    name: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.demand)
        if len(self.holding) != n or len(self.production) != n:
            raise ValueError("demand, holding and production need one entry per period")
        if any(d < 0 for d in self.demand):
            raise ValueError("negative demand")
        if any(h < 0 for h in self.holding):
            raise ValueError("negative holding cost")
        object.__setattr__(self, "demand", tuple(self.demand))
        object.__setattr__(self, "holding", tuple(self.holding))
        object.__setattr__(self, "production", tuple(self.production))
        if self.time is None:
            object.__setattr__(self, "time", self.cost)

    @property
    def n(self):
        return len(self.demand)

    def cumulative_holding(self) -> list:
        """``H_i``: holding cost paid for one unit produced in ``i`` and kept to the end."""
        H, acc = [0] * self.n, 0
        for i in range(self.n - 1, -1, -1):
            acc += self.holding[i]
            H[i] = acc
        return H


@dataclass(frozen=True)
class Plan:
    setups: tuple
    production: tuple
    inventory: tuple
    prod_cost: Any
    setup_cost: Any
    inv_cost: Any
    setup_time: Any

    @property
    def cost(self):
        return self.prod_cost + self.setup_cost + self.inv_cost


def _shift_cost(f: PwlFunction, d, H) -> PwlFunction:
    """``g(y') = f(y' + d) + H * y'``."""
    g = translate(f, -d)
    return PwlFunction((Segment(s.lo, s.hi, s.slope + H, s.intercept, s.tag) for s in g.segments), check=False)


def reduce_to_areltp(ls: LotSizingInstance):
    """Route-evaluation instance with the same optimum; returns ``(inst, offset)``.

    Production deviations ``y' = y - d`` become transfers.  A period
    without setup consumes its demand, which is modelled by the skip load
    ``-d_i`` with skip cost ``-H_i d_i``.  Load equals inventory, so the
    capacity constraint carries over unchanged and the offset is zero.
    """
    H = ls.cumulative_holding()
    profit = [_shift_cost(f, d, h) for f, d, h in zip(ls.production, ls.demand, H)]
    skip_load = tuple(-d for d in ls.demand)
    skip_cost = tuple(-h * d for h, d in zip(H, ls.demand))
    inst = Instance(cost=ls.cost, time=ls.time, profit=profit, qmax=ls.qmax, tmax=ls.tmax,
                    skip_load=skip_load, skip_cost=skip_cost, name=ls.name,
                    meta=dict(ls.meta, source="lswrc"))
    return inst, 0


def plan_from_solution(ls: LotSizingInstance, sol: Solution) -> Plan:
    """Map a solution of the reduced instance back to production quantities."""
    vs = set(sol.visits)
    prod = [sol.y[i] + ls.demand[i] if i in vs else 0 for i in range(ls.n)]
    return evaluate_plan(ls, sol.visits, prod)


def evaluate_plan(ls: LotSizingInstance, setups: Sequence[int], production: Sequence) -> Plan:
    """Cost components of a production plan, computed directly."""
    setups = tuple(setups)
    vs = set(setups)
    inv, q = [], 0
    prod_cost = 0
    for i in range(ls.n):
        y = production[i]
        if i in vs:
            v = evaluate(ls.production[i], y)
            if v is None:
                raise ValueError(f"production {y} outside the bounds of period {i}")
            prod_cost += v
        elif abs(y) > EPS:
            raise ValueError(f"production in period {i} without setup")
        q = q + y - ls.demand[i]
        inv.append(q)
    setup_cost = sum(ls.cost[a][b] for a, b in zip(setups, setups[1:]))
    setup_time = sum(ls.time[a][b] for a, b in zip(setups, setups[1:]))
    inv_cost = sum(h * x for h, x in zip(ls.holding, inv))
    return Plan(setups, tuple(production), tuple(inv), prod_cost, setup_cost, inv_cost, setup_time)


def plan_violations(ls: LotSizingInstance, plan: Plan, tol: float = EPS) -> list[str]:
    errs = []
    if not plan.setups or plan.setups[0] != 0 or plan.setups[-1] != ls.n - 1:
        errs.append("first and last period need a setup")
    for i, q in enumerate(plan.inventory):
        if q < -tol:
            errs.append(f"negative inventory after period {i}")
        if q > ls.qmax + tol:
            errs.append(f"inventory above qmax after period {i}")
    if ls.tmax is not None and plan.setup_time > ls.tmax + tol:
        errs.append("setup resource budget exceeded")
    return errs


def l4l_plan(ls: LotSizingInstance) -> Plan:
    """Produce every period's demand in that period."""
    for i, (f, d) in enumerate(zip(ls.production, ls.demand)):
        if evaluate(f, d) is None:
            raise ValueError(f"L4L infeasible: demand {d} outside the bounds of period {i}")
    for i in range(ls.n - 1):
        if ls.cost[i][i + 1] is None:
            raise ValueError(f"L4L infeasible: no setup arc ({i},{i + 1})")
    return evaluate_plan(ls, range(ls.n), ls.demand)


def l4l_value(ls: LotSizingInstance):
    """Production cost of all demands plus consecutive setup costs."""
    return l4l_plan(ls).cost


@dataclass(frozen=True)
class Savings:
    dz: float
    prod: float
    setup: float
    inv: float


def savings_decomposition(ls: LotSizingInstance, plan) -> Savings:
    """Relative savings of ``plan`` against lot-for-lot, split by cost type.

    Savings are counted positive (a cheaper plan gives ``dz > 0``) and
    satisfy ``dz = prod - setup - inv``.  ``plan`` may be a :class:`Plan`
    or a solution of the reduced instance.
    """
    if isinstance(plan, Solution):
        plan = plan_from_solution(ls, plan)
    base = l4l_plan(ls)
    z = base.cost
    if z == 0:
        raise ZeroDivisionError("L4L value is zero, relative savings undefined")
    prod = (base.prod_cost - plan.prod_cost) / z
    setup = (plan.setup_cost - base.setup_cost) / z
    inv = plan.inv_cost / z
    dz = (z - plan.cost) / z
    return Savings(float(dz), float(prod), float(setup), float(inv))
