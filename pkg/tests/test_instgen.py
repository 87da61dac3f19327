import json
import math
import random
from fractions import Fraction

import pytest

from pwlship.formats import instance_to_json
from pwlship.instgen import (generate_lswrc, generate_srltp, nearest_neighbour_route,
                             parse_orienteering, synthetic_orienteering, tmax_formula, write_orienteering)
from pwlship.lswrc import l4l_plan


def test_tmax_spot_check():
    # largest arc time 9, consecutive arcs summing to 40, theta = 2/5
    t = [[None] * 6 for _ in range(6)]
    for i, v in enumerate((9, 9, 9, 9, 4)):
        t[i][i + 1] = v
    t[0][5] = 7
    assert tmax_formula(t, Fraction(2, 5)) == 25


def test_generated_tmax_uses_formula():
    for th, val in (("small", Fraction(2, 5)), ("medium", Fraction(3, 5)), ("large", Fraction(4, 5))):
        ls = generate_lswrc(10, "small", th, 3)
        assert ls.tmax == tmax_formula(ls.time, val)
        assert ls.time is ls.cost or ls.time == ls.cost


def test_lswrc_determinism():
    a = json.dumps(instance_to_json(generate_lswrc(20, "medium", "large", 5)))
    b = json.dumps(instance_to_json(generate_lswrc(20, "medium", "large", 5)))
    c = json.dumps(instance_to_json(generate_lswrc(20, "medium", "large", 6)))
    assert a == b and a != c


def test_lswrc_concave_three_pieces():
    for seed in range(20):
        ls = generate_lswrc(10, "large", "small", seed)
        for f in ls.production:
            assert len(f) == 3
            slopes = [s.slope for s in f.segments]
            assert slopes[0] > slopes[1] > slopes[2]
            assert f(0) == 0


def test_theta_one_l4l_fits_budget():
    for seed in range(20):
        ls = generate_lswrc(10, "small", Fraction(1), seed)
        assert l4l_plan(ls).setup_time <= ls.tmax


def test_srltp_structure():
    count = 0
    for seed in range(5):
        for inst, route in generate_srltp(synthetic_orienteering(12, seed), 30, seed):
            count += 1
            assert inst.cost == inst.time
            for f in inst.profit:
                assert len(f) == 4
                assert f.lo <= 0 <= f.hi and f(0) == 0
            assert route[0] == 0 and route[-1] == 11 and sorted(route) == list(range(12))
    assert count == 100


def test_srltp_determinism():
    base = synthetic_orienteering(15, 1)
    a = [r for _, r in generate_srltp(base, 60, 4)]
    b = [r for _, r in generate_srltp(base, 60, 4)]
    assert a == b and len(a) == 20


def test_nearest_neighbour_k1():
    pts = [(0, 0, 0), (5, 0, 1), (1, 0, 1), (3, 0, 1), (10, 0, 0)]
    assert nearest_neighbour_route(pts, random.Random(0), k=1) == [0, 2, 3, 1, 4]


def test_route_costs_are_distances():
    base = synthetic_orienteering(10, 2)
    inst, route = generate_srltp(base, 30, 2)[0]
    for i in range(inst.n):
        for j in range(i + 1, inst.n):
            p, q = base.points[route[i]], base.points[route[j]]
            assert math.isclose(inst.cost[i][j], math.dist(p[:2], q[:2]), abs_tol=1e-6)


def test_parse_small_file(tmp_path):
    p = tmp_path / "o.txt"
    p.write_text("40 1\n0 0 0\n3.5 4 10\n10 0 0\n")
    d = parse_orienteering(p)
    assert d.tmax == 40 and d.points == [(0, 0, 0), (3.5, 4, 10), (10, 0, 0)]


def test_parse_header_only(tmp_path):
    p = tmp_path / "h.txt"
    p.write_text("25.5 2\n")
    d = parse_orienteering(p)
    assert d.tmax == 25.5 and d.paths == 2 and d.points == []


def test_parse_errors(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("40 1\n0 0 0\n1 2\n")
    with pytest.raises(ValueError, match=":3:"):
        parse_orienteering(p)
    p.write_text("40 1\n0 x 0\n")
    with pytest.raises(ValueError, match=":2:"):
        parse_orienteering(p)
    p.write_text("")
    with pytest.raises(ValueError):
        parse_orienteering(p)


def test_orienteering_round_trip(tmp_path):
    d = synthetic_orienteering(9, 3)
    write_orienteering(d, tmp_path / "s.txt")
    e = parse_orienteering(tmp_path / "s.txt")
    assert (e.tmax, e.paths, e.points) == (d.tmax, d.paths, d.points)
