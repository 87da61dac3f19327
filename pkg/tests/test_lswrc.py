import random

import pytest

from pwlship import Infeasible, evaluate, validate
from pwlship.dp import solve_no_duration, solve_with_duration
from pwlship.bnb import solve_bbdp
from pwlship.instgen import generate_lswrc
from pwlship.lswrc import (LotSizingInstance, evaluate_plan, l4l_plan, l4l_value, plan_from_solution,
                           plan_violations, reduce_to_areltp, savings_decomposition)
from pwlship.oracle import brute_force, brute_force_lswrc

from instances import F


def rand_ls(rng, n, tmax=True):
    demand = [rng.randint(0, 4) for _ in range(n)]
    holding = [rng.randint(0, 3) for _ in range(n)]
    prod = []
    for d in demand:
        b = d + rng.randint(0, 4)
        xs = sorted({0, b, rng.randint(0, b)})
        v, pts = 0, [(0, 0)]
        for a, x in zip(xs, xs[1:]):
            v += rng.randint(0, 6) * (x - a)
            pts.append((x, v))
        prod.append(F(pts))
    cost = [[rng.randint(1, 8) + 2 * (j - i - 1) if j > i else None for j in range(n)] for i in range(n)]
    tm = sum(cost[i][i + 1] for i in range(n - 1))
    return LotSizingInstance(demand, holding, prod, cost, qmax=rng.randint(2, 8),
                             tmax=rng.randint(tm // 2, tm + 5) if tmax else None)


def test_zero_holding_is_shift():
    f = F([(0, 0), (3, 6), (5, 8)])
    ls = LotSizingInstance([2, 0], [0, 0], [f, F([(0, 0)])], [[None, 1], [None, None]], qmax=5)
    inst, off = reduce_to_areltp(ls)
    assert off == 0
    assert inst.profit[0].canonical() == ((-2, 1, 2, 4), (1, 3, 1, 5))


def test_holding_substitution():
    f1 = F([(0, 0), (4, 12)])
    ls = LotSizingInstance([2, 3], [1, 1], [f1, F([(0, 0), (5, 5)])], [[None, 1], [None, None]], qmax=5)
    assert ls.cumulative_holding() == [2, 1]
    g = reduce_to_areltp(ls)[0].profit[0]
    for yp in range(-2, 3):
        assert evaluate(g, yp) == evaluate(f1, yp + 2) + 2 * yp


def test_reduction_matches_direct_brute_force_100():
    rng = random.Random(400)
    done = 0
    for k in range(100):
        ls = rand_ls(rng, rng.randint(2, 6))
        try:
            plan = brute_force_lswrc(ls)
        except Infeasible:
            plan = None
        inst, _ = reduce_to_areltp(ls)
        try:
            sol = brute_force(inst)
        except Infeasible:
            sol = None
        assert (plan is None) == (sol is None), k
        if plan is None:
            continue
        assert sol.objective == plan.cost, k
        # and the solvers on the reduced instance
        assert solve_with_duration(inst)[1].objective == plan.cost
        assert solve_bbdp(inst).solution.objective == plan.cost
        back = plan_from_solution(ls, sol)
        assert back.cost == plan.cost and plan_violations(ls, back) == []
        done += 1
    assert done > 50


def test_inventory_equals_load():
    rng = random.Random(401)
    for _ in range(50):
        ls = rand_ls(rng, 5, tmax=False)
        inst, _ = reduce_to_areltp(ls)
        try:
            _, sol = solve_no_duration(inst)
        except Infeasible:
            continue
        assert validate(inst, sol) == []
        plan = plan_from_solution(ls, sol)
        assert plan.inventory == sol.load_profile
        assert plan.cost == sol.objective


def test_l4l_zero_demand():
    z = F([(0, 0), (3, 3)])
    c = [[None, 4, 9, 9], [None, None, 5, 9], [None, None, None, 6], [None] * 4]
    ls = LotSizingInstance([0] * 4, [1] * 4, [z] * 4, c, qmax=3)
    assert l4l_value(ls) == 15


def test_l4l_hand_instance():
    prod = [F([(0, 0), (1, 1)]), F([(0, 0), (2, 2)]), F([(0, 0), (3, 3)])]
    c = [[None, 4, 9], [None, None, 5], [None, None, None]]
    ls = LotSizingInstance([1, 2, 3], [1, 1, 1], prod, c, qmax=3)
    assert l4l_value(ls) == 1 + 2 + 3 + 4 + 5


def test_l4l_infeasible():
    c = [[None, 1], [None, None]]
    ls = LotSizingInstance([5, 0], [0, 0], [F([(0, 0), (2, 2)])] * 2, c, qmax=3)
    with pytest.raises(ValueError, match="L4L infeasible"):
        l4l_value(ls)


def test_l4l_matches_model_objective():
    rng = random.Random(402)
    for _ in range(30):
        ls = rand_ls(rng, 5)
        inst, _ = reduce_to_areltp(ls)
        plan = l4l_plan(ls)
        from pwlship import objective
        y = [p - d for p, d in zip(plan.production, ls.demand)]
        assert objective(inst, tuple(range(ls.n)), y) == plan.cost


def test_savings_self_comparison():
    ls = generate_lswrc(10, "small", "small", 0)
    s = savings_decomposition(ls, l4l_plan(ls))
    assert s.dz == s.inv == s.setup == s.prod == 0


def test_savings_identity_and_recomputation():
    for seed in range(5):
        ls = generate_lswrc(10, "medium", "large", seed)
        inst, _ = reduce_to_areltp(ls)
        sol = solve_bbdp(inst).solution
        s = savings_decomposition(ls, sol)
        assert abs(s.dz - (s.prod - s.setup - s.inv)) <= 1e-9
        # naive recomputation from the raw plan
        vs = set(sol.visits)
        prod = [sol.y[i] + ls.demand[i] if i in vs else 0 for i in range(ls.n)]
        z = sum(evaluate(f, d) for f, d in zip(ls.production, ls.demand)) + sum(
            ls.cost[i][i + 1] for i in range(ls.n - 1))
        pc = sum(evaluate(ls.production[i], prod[i]) for i in vs)
        sc = sum(ls.cost[a][b] for a, b in zip(sol.visits, sol.visits[1:]))
        inv, ic = 0, 0
        for i in range(ls.n):
            inv += prod[i] - ls.demand[i]
            ic += ls.holding[i] * inv
        assert abs(s.dz - float((z - pc - sc - ic) / z)) <= 1e-9
        assert abs(s.inv - float(ic / z)) <= 1e-9
        assert s.dz >= -1e-12       # the optimum is never worse than lot-for-lot


def test_zero_l4l_value_rejected():
    c = [[None, 0], [None, None]]
    ls = LotSizingInstance([0, 0], [0, 0], [F([(0, 0)])] * 2, c, qmax=0)
    with pytest.raises(ZeroDivisionError):
        savings_decomposition(ls, l4l_plan(ls))


def test_evaluate_plan_rejects_production_without_setup():
    ls = LotSizingInstance([1, 1, 1], [1] * 3, [F([(0, 0), (3, 3)])] * 3,
                           [[None, 1, 2], [None, None, 1], [None] * 3], qmax=3)
    with pytest.raises(ValueError):
        evaluate_plan(ls, (0, 2), (2, 1, 0))
