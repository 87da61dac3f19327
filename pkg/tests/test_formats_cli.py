import csv
import json
import random
from fractions import Fraction

import pytest

from pwlship import Instance, PwlFunction, Segment
from pwlship.cli import BENCH_HEADER, REPORT_HEADER, main, qmax_tendency
from pwlship.formats import (function_from_json, function_to_json, instance_from_json, instance_to_json,
                             load_instance, save_instance)
from pwlship.instgen import generate_lswrc
from pwlship.lswrc import LotSizingInstance, reduce_to_areltp

from instances import example1, instance_stream, rand_inst


def same_instance(a, b):
    return instance_to_json(a) == instance_to_json(b)


def test_round_trip_integer(tmp_path):
    for k, inst in enumerate([example1(), *instance_stream(600, 20)]):
        save_instance(inst, tmp_path / f"{k}.json")
        back = load_instance(tmp_path / f"{k}.json")
        assert back.cost == inst.cost and back.time == inst.time and back.tmax == inst.tmax
        assert [f.canonical() for f in back.profit] == [f.canonical() for f in inst.profit]
        assert all(type(x) is int for row in back.cost for x in row if x is not None)


def test_round_trip_fractions_and_jumps(tmp_path):
    f = PwlFunction([Segment(-1, 0, Fraction(1, 3), Fraction(1, 3)), Segment(0, 2, 2, 0),
                     Segment(Fraction(5, 2), 3, 0, Fraction(7, 2))])
    assert function_from_json(function_to_json(f)).canonical() == f.canonical()
    c = [[None, Fraction(3, 2)], [None, None]]
    inst = Instance(cost=c, time=[[None, 1], [None, None]], profit=[f.__class__.point(0, 0), f], qmax=Fraction(5, 2),
                    tmax=2.5)
    save_instance(inst, tmp_path / "x.json")
    assert same_instance(load_instance(tmp_path / "x.json"), inst)


def test_round_trip_lswrc(tmp_path):
    ls = generate_lswrc(10, "medium", "small", 2)
    save_instance(ls, tmp_path / "l.json")
    back = load_instance(tmp_path / "l.json")
    assert isinstance(back, LotSizingInstance) and same_instance(back, ls)


def test_format_errors():
    with pytest.raises(ValueError):
        instance_from_json({"format": 2})
    with pytest.raises(ValueError, match="qmax"):
        instance_from_json({"cost": [[None]], "profit": []})
    with pytest.raises(ValueError):
        instance_from_json({"type": "lswrc", "cost": [[None, 1], [None, None]], "qmax": 1,
                            "profit": [{"breakpoints": [[0, 0]]}] * 2})


@pytest.fixture
def ex1_file(tmp_path):
    p = tmp_path / "example1.json"
    save_instance(example1(), p)
    return p


def test_cli_solve_example1(ex1_file, tmp_path, capsys):
    out = tmp_path / "sol.json"
    assert main(["solve", "--in", str(ex1_file), "--method", "dp", "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["objective"] == -4 and d["visits"] == [0, 1, 3] and d["method"] == "dp"
    assert "objective=-4" in capsys.readouterr().out


def test_cli_dp3d_vs_bbdp(tmp_path):
    rng = random.Random(601)
    done = 0
    while done < 5:
        inst = rand_inst(rng, 7, 8)
        save_instance(inst, tmp_path / "c.json")
        objs = []
        for m in ("dp3d", "bbdp"):
            code = main(["solve", "--in", str(tmp_path / "c.json"), "--method", m, "--out", str(tmp_path / f"{m}.json")])
            objs.append(code if code else json.loads((tmp_path / f"{m}.json").read_text())["objective"])
        if code == 0:
            done += 1
        assert objs[0] == objs[1]


def test_cli_missing_file(tmp_path, capsys):
    assert main(["solve", "--in", str(tmp_path / "nope.json")]) == 1
    assert "error" in capsys.readouterr().err


def test_cli_infeasible(tmp_path):
    save_instance(rand_inst(random.Random(3), 5, 4, tmax=0), tmp_path / "i.json")
    assert main(["solve", "--in", str(tmp_path / "i.json"), "--method", "bbdp"]) == 2


def test_cli_solve_lswrc_plan(tmp_path):
    save_instance(generate_lswrc(10, "small", "medium", 1), tmp_path / "l.json")
    assert main(["solve", "--in", str(tmp_path / "l.json"), "--out", str(tmp_path / "s.json")]) == 0
    d = json.loads((tmp_path / "s.json").read_text())
    assert d["plan"]["cost"] == d["objective"]


def test_gen_full_grid(tmp_path):
    out = tmp_path / "grid"
    assert main(["gen", "lswrc", "--out-dir", str(out)]) == 0
    files = sorted(out.glob("*.json"))
    assert len(files) == 5 * 3 * 3 * 11
    for f in files:
        ls = load_instance(f)
        reduce_to_areltp(ls)           # builds and checks the route instance
        assert ls.n in (10, 20, 30, 40, 50)


def test_gen_srltp(tmp_path):
    assert main(["gen", "srltp", "--synthetic", "--points", "10", "--routes", "3",
                 "--qmax", "30", "60", "--out-dir", str(tmp_path)]) == 0
    assert len(list(tmp_path.glob("*.json"))) == 6


def test_bench_csv(tmp_path):
    d = tmp_path / "in"
    d.mkdir()
    for k, inst in enumerate(instance_stream(602, 6, nmin=5, nmax=7)):
        save_instance(inst, d / f"r{k}.json")
    out = tmp_path / "b.csv"
    assert main(["bench", "--in", str(d), "--methods", "dp3d", "bbdp", "--out", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == BENCH_HEADER and len(rows) == 13
    by = {}
    for r in rows[1:]:
        by.setdefault(r[0], {})[r[1]] = (r[2], r[6])
    for name, res in by.items():
        assert res["dp3d"] == res["bbdp"]
    # objectives are stable across runs
    main(["bench", "--in", str(d), "--methods", "dp3d", "bbdp", "--out", str(tmp_path / "c.csv")])
    again = list(csv.reader((tmp_path / "c.csv").open()))
    assert [r[:3] for r in again] == [r[:3] for r in rows]


def test_report(tmp_path):
    d = tmp_path / "ls"
    main(["gen", "lswrc", "--n", "10", "--qmax-class", "small", "large", "--theta-class", "small",
          "--seeds", "2", "--out-dir", str(d)])
    out, plot = tmp_path / "r.csv", tmp_path / "p.json"
    assert main(["report", "--in", str(d), "--out", str(out), "--plot-data", str(plot)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert list(rows[0]) == REPORT_HEADER and len(rows) == 4
    for r in rows:
        assert abs(float(r["dz"]) - (float(r["dz_prod"]) - float(r["dz_setup"]) - float(r["dz_inv"]))) <= 1e-5
    cells = json.loads(plot.read_text())["cells"]
    assert {(c["qmax"], c["count"]) for c in cells} == {(10, 2), (100, 2)}


def test_report_empty(tmp_path, capsys):
    (tmp_path / "e").mkdir()
    assert main(["report", "--in", str(tmp_path / "e")]) == 0
    assert capsys.readouterr().out.strip() == ",".join(REPORT_HEADER)


def test_tendency_warning():
    means = [{"qmax": 10, "theta": "small", "dz": 0.2}, {"qmax": 50, "theta": "small", "dz": 0.1}]
    assert len(qmax_tendency(means)) == 1
    means[1]["dz"] = 0.3
    assert qmax_tendency(means) == []
