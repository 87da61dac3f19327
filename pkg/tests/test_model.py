import random

import pytest

from pwlship import Instance, Solution, make_solution, objective, validate
from pwlship.oracle import feasible_solutions

from instances import F, example1, rand_inst


def zero_inst(n=4, c=None):
    c = c or [[j - i if j > i else None for j in range(n)] for i in range(n)]
    return Instance(cost=c, time=c, profit=[F([(0, 0)])] * n, qmax=0)


def test_direct_trip_cost():
    inst = zero_inst(5)
    assert objective(inst, (0, 4), (0,) * 5) == 4


def test_example1_objective():
    inst = example1()
    assert objective(inst, (0, 1, 3), (1, 1, 0, -2)) == -4
    # the full route uses the forbidden arc (1, 2)
    with pytest.raises(ValueError, match="forbidden"):
        objective(inst, (0, 1, 2, 3), (1, 1, 0, -2))


def test_objective_naive_resummation():
    rng = random.Random(5)
    for _ in range(50):
        inst = rand_inst(rng, 6, 10)
        visits = (0, *sorted(rng.sample(range(1, 5), rng.randint(0, 4))), 5)
        if any(inst.cost[a][b] is None for a, b in zip(visits, visits[1:])):
            continue
        y = [rng.randint(int(f.lo), int(f.hi)) if i in visits else 0 for i, f in enumerate(inst.profit)]
        y = [v if inst.profit[i](v) is not None else 0 for i, v in enumerate(y)]
        naive = sum(inst.cost[a][b] for a, b in zip(visits, visits[1:]))
        for i in visits:
            naive += min(s.slope * y[i] + s.intercept for s in inst.profit[i].segments if s.lo <= y[i] <= s.hi)
        assert objective(inst, visits, y) == naive


def test_validate_ok():
    inst = example1()
    assert validate(inst, make_solution(inst, (0, 1, 3), (1, 1, 0, -2))) == []


def test_validate_negative_load():
    inst = example1()
    errs = validate(inst, Solution((0, 3), (0, 0, 0, -1)), check_objective=False)
    assert "load below 0 before node 4" in errs


def test_validate_duration_limit():
    c = [[None, 2, 5], [None, None, 2], [None, None, None]]
    inst = Instance(cost=c, time=c, profit=[F([(0, 0)])] * 3, qmax=0, tmax=4)
    errs = validate(inst, make_solution(inst, (0, 2), (0, 0, 0)))
    assert any(e.startswith("duration limit") for e in errs)


def test_objective_rejects_bad_structure():
    with pytest.raises(ValueError):
        objective(example1(), (0, 1, 2), (0, 0, 0, 0))   # does not end at the last node
    with pytest.raises(ValueError, match="forbidden"):
        objective(example1(), (0, 1, 2, 3), (0, 0, 0, 0))


def test_instance_checks():
    c = [[None, 1], [None, None]]
    with pytest.raises(ValueError):
        Instance(cost=c, time=c, profit=[F([(1, 0), (2, 0)]), F([(0, 0)])], qmax=1)
    with pytest.raises(ValueError):
        Instance(cost=c, time=[[None, None], [None, None]], profit=[F([(0, 0)])] * 2, qmax=1)
    with pytest.raises(ValueError):
        Instance(cost=c, time=c, profit=[F([(0, 0)])], qmax=1)


def test_validate_matches_oracle_enumeration():
    # a visit set admits a validating transfer vector iff the oracle lists it
    rng = random.Random(6)
    for _ in range(20):
        inst = rand_inst(rng, 5, rng.randint(0, 4))
        feas = {v for v, _ in feasible_solutions(inst)}
        for mask in range(8):
            visits = (0, *[k + 1 for k in range(3) if mask >> k & 1], 4)
            assert (visits in feas) == _has_plan(inst, visits)


def _has_plan(inst, visits):
    from itertools import product
    if any(inst.cost[a][b] is None for a, b in zip(visits, visits[1:])):
        return False
    rngs = [range(int(inst.profit[i].lo), int(inst.profit[i].hi) + 1) if i in visits else [0]
            for i in range(inst.n)]
    for y in product(*rngs):
        if all(inst.profit[i](y[i]) is not None for i in visits):
            if validate(inst, make_solution(inst, visits, y)) == []:
                return True
    return False
