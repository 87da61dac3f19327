"""Lagrangian relaxation of the duration limit.

Pricing travel time at ``lam`` turns the constrained problem into the
plain DP on arc weights ``c + lam * t``:

    L(lam) = min_x  psi(x) + lam * (duration(x) - tmax)

``L`` is concave and piecewise linear in ``lam``; its slope at ``lam`` is
minus the slack of the minimising route.  The search keeps an infeasible
primal on the left of the bracket and a feasible one on the right and
jumps to the intersection of their tangents.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .dp import Transfer, solve_no_duration
from .metric import min_time_route
from .model import Infeasible, Instance, Solution
from .pwl import EPS, PwlFunction, Segment

LAMBDA_CAP = 1e9
QUICK_DOUBLINGS = 2


@dataclass
class DualEvaluation:
    lam: float
    value: float
    primal: Solution
    slack: float

    @property
    def feasible(self) -> bool:
        return self.slack >= -EPS


@dataclass
class DualResult:
    best: DualEvaluation
    feasible: Optional[Solution]
    lo: Optional[DualEvaluation] = None
    hi: Optional[DualEvaluation] = None
    iterations: int = 0
    history: list = field(default_factory=list)
    degenerate: bool = False
    collapsed: bool = False   # search stopped at a proven maximiser
    fast: Optional[tuple] = None   # (duration, best solution) of the fastest route, if computed
    stopped: bool = False     # ended early because ``stop`` accepted the bound

    @property
    def bound(self):
        return self.best.value

    @property
    def width(self):
        if self.lo is None or self.hi is None or self.collapsed:
            return 0.0
        return self.hi.lam - self.lo.lam


def evaluate_dual(inst: Instance, lam, mandatory=(), excluded=(), *, transfer=None,
                  integer=None, force_empty_end=False) -> DualEvaluation:
    """``L(lam)`` together with the minimising route."""
    if inst.tmax is None:
        raise ValueError("evaluate_dual needs a duration limit")
    if lam < 0:
        raise ValueError("multiplier must be non-negative")
    _, sol = solve_no_duration(inst, mandatory, excluded, lam=lam, transfer=transfer,
                               integer=integer, force_empty_end=force_empty_end)
    slack = inst.tmax - sol.duration
    # exact objective minus priced slack avoids cancelling lam * tmax terms
    value = sol.objective - lam * slack
    if isinstance(lam, float):
        slack, value = float(slack), float(value)
    return DualEvaluation(lam, value, sol, slack)


def lambda_upper_bound(route_cost, dual0, slack):
    """Largest multiplier worth searching.

    Any route with positive slack gives ``L(lam) <= route_cost - lam * slack``,
    which drops below ``L(0)`` beyond the returned value.
    """
    if slack <= 0:
        raise ValueError("need a route with positive slack")
    return (route_cost - dual0) / slack


def _fastest(inst: Instance, mandatory, excluded, transfer, opts=None):
    """Fastest load-feasible route and its best objective."""
    flat = [PwlFunction((Segment(s.lo, s.hi, 0, 0) for s in f.segments), check=False)
            for f in inst.profit]
    timed = inst.replace(cost=inst.time, profit=flat, skip_cost=(0,) * inst.n, tmax=None)
    opts = opts or {}
    _, route = solve_no_duration(timed, mandatory, excluded, **opts)
    keep = set(route.visits)
    others = set(range(inst.n)) - keep
    _, sol = solve_no_duration(inst, keep, others, transfer=transfer, **opts)
    return route.duration, sol


def initial_interval(inst: Instance, mandatory=(), excluded=(), *, transfer=None, dual0=None,
                     integer=None, force_empty_end=False):
    """Return ``(lam_lo, lam_hi, degenerate)`` bracketing an optimal multiplier."""
    tr = transfer or Transfer(inst)
    opts = {"integer": integer, "force_empty_end": force_empty_end}
    e0 = dual0 or evaluate_dual(inst, 0, mandatory, excluded, transfer=tr, **opts)
    if e0.feasible:
        return 0, 0, False
    try:
        t_fast, sol = _fastest(inst, mandatory, excluded, tr, opts)
    except Infeasible:
        raise Infeasible("no load-feasible route")
    slack = inst.tmax - t_fast
    if slack < -EPS:
        raise Infeasible("even the fastest route exceeds the duration limit")
    if slack <= EPS:
        return 0, LAMBDA_CAP, True
    return 0, max(lambda_upper_bound(sol.objective, e0.value, slack), EPS), False


def _upper_from(inst, lo: DualEvaluation, mandatory, excluded, tr, refs=(), fast=None,
                opts=None):
    """Multiplier bound from an infeasible point instead of ``lam = 0``.

    ``L(lam) <= psi_ref - lam * slack_ref`` for any feasible route with
    positive slack, and ``L(lam*) >= L(lo.lam)``.  ``refs`` are known
    feasible routes; the fastest route is only computed without one.
    """
    bounds = [float(lambda_upper_bound(r.objective, lo.value, inst.tmax - r.duration))
              for r in refs if inst.tmax - r.duration > EPS]
    if bounds:
        return max(min(bounds), lo.lam), False, fast
    fast = fast or _fastest(inst, mandatory, excluded, tr, opts)
    t_fast, sol = fast
    slack = inst.tmax - t_fast
    if slack < -EPS:
        raise Infeasible("even the fastest route exceeds the duration limit")
    if slack <= EPS:
        return LAMBDA_CAP, True, fast
    return float(lambda_upper_bound(sol.objective, lo.value, slack)), False, fast


def solve_dual(inst: Instance, eps=None, mandatory=(), excluded=(), *, eps_cs=1e-6,
               max_iter: int = 200, transfer=None, hint=None, known=(),
               refs=(), fast=None, stop=None, integer=None,
               force_empty_end=False) -> DualResult:
    """Maximise ``L`` by tangent intersection inside a slack-sign bracket.

    ``hint`` is a ``(lam_lo, lam_hi)`` pair from a related solve (a parent
    branch node).  When it still brackets a sign change of the slack the
    search starts there and skips computing the initial interval.
    ``known`` holds evaluations of a relaxation (fewer fixed customers)
    whose minimising route satisfies this problem's restrictions; those
    values are exact here and are reused instead of solving again.
    ``refs`` are feasible routes of this problem used to bound ``lam``;
    ``fast`` is a known fastest route ``(duration, solution)`` of it.
    ``stop(value)`` ends the search as soon as it accepts the best bound
    found so far (branch and bound pruning).
    """
    tr = transfer or Transfer(inst)
    history = []
    cache = {float(e.lam): e for e in known}
    opts = {"integer": integer, "force_empty_end": force_empty_end}

    def ev(lam):
        lam = float(lam)
        e = cache.get(lam)
        if e is None:
            e = evaluate_dual(inst, lam, mandatory, excluded, transfer=tr, **opts)
        history.append(e)
        return e

    lo = hi = None
    if hint is not None and hint[0] > 0:
        # slack never decreases with lam: a feasible hint bounds lam* from
        # above, an infeasible one makes lam = 0 infeasible as well
        a = ev(hint[0])
        if a.feasible:
            hi = a
        else:
            lo = a
            b = ev(hint[1])
            if b.feasible:
                hi = b
            else:
                lo = b
    if lo is None:
        e0 = ev(0)
        if e0.feasible:
            return DualResult(e0, e0.primal, e0, e0, 0, history)
        lo = e0
    if eps is None:
        eps = 1e-6 * (1 + abs(float(history[0].value)))
    degenerate = False
    if hi is None and lo.lam > 0 and not refs and fast is None:
        # near a related multiplier a few doublings are cheaper than the
        # fastest-route bound; a load-free time check catches hopeless cases
        quick = min_time_route(inst, set(range(inst.n)) - set(excluded), mandatory)
        if quick is None or quick[0] > inst.tmax + EPS:
            raise Infeasible("even the fastest route exceeds the duration limit")
        for _ in range(QUICK_DOUBLINGS):
            e = ev(lo.lam * 2)
            if e.feasible:
                hi = e
                break
            lo = e
    if hi is None:
        lam_hi, degenerate, fast = _upper_from(inst, lo, mandatory, excluded, tr, refs, fast, opts)
        hi = ev(max(lam_hi, lo.lam * 2, EPS))
    while not hi.feasible:
        if hi.lam >= LAMBDA_CAP:
            raise Infeasible("no multiplier yields a feasible route")
        lo = hi
        hi = ev(min(hi.lam * 2, LAMBDA_CAP))
    best = max(history, key=lambda e: e.value)
    feas = min((e.primal for e in history if e.feasible), key=lambda x: x.objective)
    it = 0
    collapsed = False
    stopped = stop is not None and stop(best.value)
    while not stopped and hi.lam - lo.lam >= eps and it < max_iter:
        it += 1
        s_lo, s_hi = lo.slack, hi.slack
        lam = (lo.value - hi.value + s_lo * lo.lam - s_hi * hi.lam) / (s_lo - s_hi)
        if not lo.lam < lam < hi.lam:
            lam = (lo.lam + hi.lam) / 2
        tangent = min(lo.value - s_lo * (lam - lo.lam), hi.value - s_hi * (lam - hi.lam))
        e = ev(lam)
        if e.value > best.value:
            best = e
            if stop is not None and stop(best.value):
                stopped = True
        if e.feasible:
            if e.primal.objective < feas.objective:
                feas = e.primal
            hi = e
            if lam * e.slack <= eps_cs:
                collapsed = True
                break
        else:
            lo = e
        if stopped:
            break
        if e.value >= tangent - 1e-9 * (1 + abs(tangent)):
            # both tangents meet on the curve, so lam maximises L
            collapsed = True
            break
    return DualResult(best, feas, lo, hi, it, history, degenerate, collapsed, fast, stopped)
