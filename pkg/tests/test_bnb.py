import random

import pytest

from pwlship import Infeasible, validate
from pwlship.bnb import BranchNode, branch, node_bounds, solve_bbdp
from pwlship.dp import Transfer, solve_with_duration
from pwlship.oracle import brute_force, feasible_solutions

from instances import example1, instance_stream, rand_inst


def test_matches_oracle_200():
    rng = random.Random(300)
    for k in range(200):
        inst = rand_inst(rng, rng.randint(4, 10), rng.randint(0, 10))
        try:
            opt = brute_force(inst).objective
        except Infeasible:
            with pytest.raises(Infeasible):
                solve_bbdp(inst)
            continue
        r = solve_bbdp(inst, seed=k)
        assert r.solution.objective == opt, k
        assert validate(inst, r.solution) == []
        assert r.root_bound <= opt + 1e-9


def test_seed_independence():
    for inst in instance_stream(301, 40, nmin=6, nmax=9):
        try:
            objs = {solve_bbdp(inst, seed=s).solution.objective for s in range(5)}
        except Infeasible:
            continue
        assert len(objs) == 1


def test_inactive_tmax_single_node():
    for inst in instance_stream(302, 40, tmax=10 ** 6):
        r = solve_bbdp(inst)
        assert r.nodes == 1
    r = solve_bbdp(example1().replace(tmax=100))
    assert r.nodes == 1 and r.solution.objective == -4


def test_infeasible_root():
    inst = rand_inst(random.Random(4), 6, 5, tmax=0)
    with pytest.raises(Infeasible):
        solve_bbdp(inst)


def test_agrees_with_dp3d():
    for inst in instance_stream(303, 100, nmin=5, nmax=10):
        try:
            _, a = solve_with_duration(inst)
        except Infeasible:
            continue
        assert solve_bbdp(inst).solution.objective == a.objective


def test_children_partition_parent():
    rng = random.Random(304)
    done = 0
    for inst in instance_stream(304, 80, nmin=5, nmax=7):
        if not feasible_solutions(inst):
            continue
        tr = Transfer(inst)
        node = node_bounds(inst, BranchNode(), tr)
        kids = branch(inst, node, rng)
        if kids is None:
            continue
        a, b = kids
        (i,) = a.mandatory - node.mandatory
        assert b.excluded - node.excluded == {i}
        parent = {v for v, _ in feasible_solutions(inst, mandatory=node.mandatory, excluded=node.excluded)}
        ca = {v for v, _ in feasible_solutions(inst, mandatory=a.mandatory, excluded=a.excluded)}
        cb = {v for v, _ in feasible_solutions(inst, mandatory=b.mandatory, excluded=b.excluded)}
        assert ca | cb == parent and not ca & cb
        done += 1
    assert done >= 5


def test_node_bounds_sandwich():
    for inst in instance_stream(305, 60):
        try:
            opt = brute_force(inst).objective
        except Infeasible:
            continue
        node = node_bounds(inst, BranchNode(), Transfer(inst))
        assert node.lower_bound <= opt + 1e-9
        assert node.ub_solution is None or node.upper_bound >= opt
