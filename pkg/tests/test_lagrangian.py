import random

import pytest

from pwlship import Infeasible
from pwlship.dp import solve_no_duration
from pwlship.lagrangian import evaluate_dual, initial_interval, lambda_upper_bound, solve_dual
from pwlship.metric import min_time_route
from pwlship.oracle import brute_force

from instances import instance_stream, rand_inst


def constrained(seed, count, **kw):
    """Instances with a feasible duration limit, paired with their optimum."""
    for inst in instance_stream(seed, count, **kw):
        try:
            yield inst, brute_force(inst).objective
        except Infeasible:
            continue


def test_lambda_zero_is_unconstrained():
    for inst in instance_stream(200, 30):
        e = evaluate_dual(inst, 0)
        _, sol = solve_no_duration(inst)
        assert e.value == sol.objective
        assert e.slack == inst.tmax - e.primal.duration


def test_huge_lambda_gives_fastest_route():
    rng = random.Random(201)
    for _ in range(30):
        inst = rand_inst(rng, rng.randint(4, 7), rng.randint(0, 10), metric=True)
        e = evaluate_dual(inst, 1e6)
        assert e.primal.duration == min_time_route(inst)[0]


def test_weak_duality():
    rng = random.Random(202)
    for inst, opt in constrained(202, 60):
        for lam in [0, 0.1, 0.5, 1, 2, 5, 20] + [rng.uniform(0, 10) for _ in range(5)]:
            assert evaluate_dual(inst, lam).value <= opt + 1e-9


def test_interval_formula():
    assert lambda_upper_bound(5, -10, 3) == 5


def test_interval_inactive_constraint():
    for inst in instance_stream(203, 20, tmax=10 ** 6):
        assert initial_interval(inst)[:2] == (0, 0)


def test_interval_contains_maximiser():
    # fine scan at 1e-3 resolution over the returned interval
    checked = 0
    for inst, _ in constrained(204, 60, nmax=5):
        lo, hi, degenerate = initial_interval(inst)
        if hi == 0 or degenerate or hi > 3:
            continue
        steps = int(hi * 1000) + 1
        vals = [(evaluate_dual(inst, k / 1000).value, k / 1000) for k in range(steps + 1)]
        best = max(v for v, _ in vals)
        arg = min(l for v, l in vals if v >= best - 1e-9)
        assert lo <= arg <= hi + 1e-3
        checked += 1
        if checked == 8:
            break
    assert checked >= 3


def test_solve_dual_inactive():
    for inst in instance_stream(205, 20, tmax=10 ** 6):
        r = solve_dual(inst)
        _, sol = solve_no_duration(inst)
        assert r.bound == sol.objective == r.feasible.objective


def test_solve_dual_sandwich_and_termination():
    n = 0
    for inst, opt in constrained(206, 200):
        r = solve_dual(inst)
        eps = 1e-6 * (1 + abs(float(r.history[0].value)))
        assert all(e.value <= opt + 1e-9 for e in r.history)
        assert r.bound <= opt + 1e-9 <= r.feasible.objective + 2e-9
        assert r.feasible.duration <= inst.tmax
        assert r.width < eps
        assert r.lo.slack < 0 or r.lo.lam == 0 and r.lo.feasible
        assert r.hi.feasible
        n += 1
    assert n > 100


def test_slack_monotone_in_lambda():
    for inst, _ in constrained(207, 60):
        r = solve_dual(inst)
        pts = sorted((e.lam, e.slack) for e in r.history)
        assert all(b[1] >= a[1] - 1e-9 for a, b in zip(pts, pts[1:]))


def test_concavity_chords():
    rng = random.Random(208)
    for inst, _ in constrained(208, 25):
        for _ in range(20):
            l1, l2, l3 = sorted(rng.uniform(0, 10) for _ in range(3))
            if l3 - l1 < 1e-6:
                continue
            v1, v2, v3 = (evaluate_dual(inst, l).value for l in (l1, l2, l3))
            chord = v1 + (v3 - v1) * (l2 - l1) / (l3 - l1)
            assert v2 >= chord - 1e-9 * (1 + abs(chord))


def test_negative_lambda_rejected():
    inst = next(instance_stream(209, 1))
    with pytest.raises(ValueError):
        evaluate_dual(inst, -1)


def test_infeasible_duration():
    inst = rand_inst(random.Random(3), 5, 4, tmax=0)
    with pytest.raises(Infeasible):
        solve_dual(inst)
