"""Command line: solve, generate, benchmark and report.

Exit codes: 0 solved, 2 infeasible, 1 any other error.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from statistics import mean

from .formats import load_instance, save_instance, save_solution, solution_to_json
from .instgen import (QMAX_CLASSES, THETA_CLASSES, generate_lswrc, generate_srltp,
                      parse_orienteering, synthetic_orienteering)
from .lswrc import LotSizingInstance, plan_from_solution, reduce_to_areltp, savings_decomposition
from .model import Infeasible, validate

METHODS = ("dp", "dp3d", "bbdp", "auto")
BENCH_HEADER = ["instance", "method", "objective", "dual_bound", "wall_ms", "nodes", "status"]
LSWRC_N = (10, 20, 30, 40, 50)


def _integer(flag):
    return None if flag is None else flag == "on"


def run_method(inst, method: str, seed: int = 0, integer=None, force_empty_end=False) -> dict:
    """Solve with one method; returns solution fields plus bookkeeping."""
    from .bnb import solve_bbdp
    from .dp import solve_no_duration, solve_with_duration

    if method == "auto":
        method = "dp" if inst.tmax is None else "bbdp"
    dual_bound = nodes = None
    if method == "dp":
        _, sol = solve_no_duration(inst, integer=integer, force_empty_end=force_empty_end)
    elif method == "dp3d":
        _, sol = solve_with_duration(inst, integer=integer, force_empty_end=force_empty_end)
    elif method == "bbdp":
        res = solve_bbdp(inst, seed=seed, integer=integer, force_empty_end=force_empty_end)
        sol, nodes, dual_bound = res.solution, res.nodes, res.root_bound
    else:
        raise ValueError(f"unknown method {method!r}")
    return {"solution": sol, "method": method, "dual_bound": dual_bound, "nodes": nodes}


def _as_route_instance(obj):
    if isinstance(obj, LotSizingInstance):
        return reduce_to_areltp(obj)[0]
    return obj


def cmd_solve(args) -> int:
    raw = load_instance(args.inp)
    inst = _as_route_instance(raw)
    try:
        out = run_method(inst, args.method, args.seed, _integer(args.integer_mode),
                         args.force_empty_end)
    except Infeasible as e:
        print(f"infeasible: {e}")
        return 2
    sol = out["solution"]
    extra = {}
    if isinstance(raw, LotSizingInstance):
        plan = plan_from_solution(raw, sol)
        extra["plan"] = {"setups": list(plan.setups), "production": list(plan.production),
                         "inventory": list(plan.inventory), "cost": plan.cost}
    d = solution_to_json(sol, out["method"], out["dual_bound"], out["nodes"], **extra)
    if args.out:
        save_solution(d, args.out)
    errs = validate(inst, sol)
    if out["method"] == "dp":
        errs = [e for e in errs if not e.startswith("duration limit")]
    print(f"{inst.name or args.inp}: method={out['method']} objective={d['objective']} "
          f"visits={len(sol.visits)}/{inst.n} duration={d['duration']}"
          + (f" nodes={out['nodes']}" if out["nodes"] is not None else ""))
    if out["method"] == "dp" and inst.tmax is not None and sol.duration > inst.tmax:
        print(f"note: dp ignores the duration limit ({d['duration']} > {inst.tmax})")
    for e in errs:
        print(f"warning: {e}")
    return 0


def cmd_gen(args) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    count = 0
    if args.kind == "lswrc":
        for n in args.n:
            for qc in args.qmax_class:
                for tc in args.theta_class:
                    for seed in range(args.seed0, args.seed0 + args.seeds):
                        ls = generate_lswrc(n, qc, tc, seed)
                        save_instance(ls, out / f"{ls.name}.json")
                        count += 1
    else:
        if args.base:
            base = parse_orienteering(args.base)
        else:
            base = synthetic_orienteering(args.points, args.seed0)
        for qmax in args.qmax:
            for inst, _ in generate_srltp(base, qmax, args.seed0, routes=args.routes, k=args.k):
                save_instance(inst, out / f"{inst.name}.json")
                count += 1
    print(f"wrote {count} instance files to {out}")
    return 0


def _collect(paths) -> list[Path]:
    files: list[Path] = []
    for p in map(Path, paths):
        if p.is_dir():
            files += sorted(p.glob("*.json"))
        elif p.exists():
            files.append(p)
        else:
            raise FileNotFoundError(f"{p}: no such file or directory")
    return files


def _bench_one(job):
    path, method, seed = job
    name = Path(path).stem
    try:
        inst = _as_route_instance(load_instance(path))
        t0 = time.perf_counter()
        out = run_method(inst, method, seed)
        ms = (time.perf_counter() - t0) * 1000
        sol = out["solution"]
        status = "ok"
        if out["method"] == "dp" and inst.tmax is not None and sol.duration > inst.tmax:
            status = "relaxed"
        db = out["dual_bound"]
        return [name, out["method"], float(sol.objective), "" if db is None else float(db),
                f"{ms:.1f}", "" if out["nodes"] is None else out["nodes"], status]
    except Infeasible:
        return [name, method, "", "", "", "", "infeasible"]
    except Exception as e:  # noqa: BLE001 - reported per row
        return [name, method, "", "", "", "", f"error: {e}"]


def threads() -> int:
    try:
        return max(1, int(os.environ.get("PWLSHIP_THREADS", "1")))
    except ValueError:
        return 1


def cmd_bench(args) -> int:
    files = _collect(args.inp)
    jobs = [(str(f), m, args.seed) for f in files for m in args.methods]
    workers = threads()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as ex:
            rows = list(ex.map(_bench_one, jobs))
    else:
        rows = [_bench_one(j) for j in jobs]
    # single writer
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(fh)
        w.writerow(BENCH_HEADER)
        w.writerows(rows)
    finally:
        if args.out:
            fh.close()
    bad = sum(1 for r in rows if r[-1].startswith("error"))
    if args.out:
        print(f"{len(rows)} rows written to {args.out}" + (f", {bad} errors" if bad else ""))
    return 1 if bad else 0


REPORT_HEADER = ["instance", "n", "qmax", "theta", "seed", "dz", "dz_prod", "dz_setup", "dz_inv"]


def report_rows(files, method="auto") -> list[dict]:
    rows = []
    for f in files:
        ls = load_instance(f)
        if not isinstance(ls, LotSizingInstance):
            continue
        inst = reduce_to_areltp(ls)[0]
        sol = run_method(inst, method)["solution"]
        s = savings_decomposition(ls, sol)
        meta = ls.meta or {}
        rows.append({"instance": ls.name or Path(f).stem, "n": ls.n, "qmax": ls.qmax,
                     "theta": meta.get("theta_class", ""), "seed": meta.get("seed", ""),
                     "dz": s.dz, "dz_prod": s.prod, "dz_setup": s.setup, "dz_inv": s.inv})
    return rows


def cell_means(rows) -> list[dict]:
    cells = defaultdict(list)
    for r in rows:
        cells[(r["qmax"], r["theta"])].append(r)
    out = []
    for (q, th), rs in sorted(cells.items(), key=lambda kv: (kv[0][0], str(kv[0][1]))):
        out.append({"qmax": q, "theta": th, "count": len(rs),
                     **{k: mean(r[k] for r in rs) for k in ("dz", "dz_prod", "dz_setup", "dz_inv")}})
    return out


def qmax_tendency(means) -> list[str]:
    """Warnings where mean savings do not grow with qmax inside a theta class."""
    warn = []
    by_theta = defaultdict(list)
    for m in means:
        by_theta[m["theta"]].append((m["qmax"], m["dz"]))
    for th, pts in sorted(by_theta.items(), key=lambda kv: str(kv[0])):
        pts.sort()
        for (q0, a), (q1, b) in zip(pts, pts[1:]):
            if b < a:
                warn.append(f"theta={th}: mean dz drops from {a:.4f} (qmax={q0}) to {b:.4f} (qmax={q1})")
    return warn


def cmd_report(args) -> int:
    files = _collect(args.inp)
    rows = report_rows(files, args.method)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.DictWriter(fh, REPORT_HEADER)
        w.writeheader()
        for r in rows:
            w.writerow({k: (f"{v:.6f}" if isinstance(v, float) else v) for k, v in r.items()})
    finally:
        if args.out:
            fh.close()
    means = cell_means(rows)
    if args.plot_data:
        Path(args.plot_data).write_text(json.dumps({"cells": means}, indent=1) + "\n")
    for wmsg in qmax_tendency(means):
        print(f"warning: {wmsg}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pwlship", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("solve", help="solve one instance file")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--method", choices=METHODS, default="auto")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--force-empty-end", action="store_true")
    s.add_argument("--integer-mode", choices=("on", "off"), default=None,
                   help="default: on for integral data")
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    g = sub.add_parser("gen", help="generate instance files")
    gs = g.add_subparsers(dest="kind", required=True)
    gl = gs.add_parser("lswrc")
    gl.add_argument("--n", type=int, nargs="+", default=list(LSWRC_N))
    gl.add_argument("--qmax-class", nargs="+", choices=list(QMAX_CLASSES), default=list(QMAX_CLASSES))
    gl.add_argument("--theta-class", nargs="+", choices=list(THETA_CLASSES), default=list(THETA_CLASSES))
    gl.add_argument("--seeds", type=int, default=11)
    gl.add_argument("--seed0", type=int, default=0)
    gl.add_argument("--out-dir", required=True)
    gr = gs.add_parser("srltp")
    src = gr.add_mutually_exclusive_group(required=True)
    src.add_argument("--base")
    src.add_argument("--synthetic", action="store_true")
    gr.add_argument("--points", type=int, default=32)
    gr.add_argument("--qmax", type=int, nargs="+", default=[30])
    gr.add_argument("--routes", type=int, default=20)
    gr.add_argument("--k", type=int, default=3)
    gr.add_argument("--seed0", type=int, default=0)
    gr.add_argument("--out-dir", required=True)
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="solve many files with several methods, write CSV")
    b.add_argument("--in", dest="inp", nargs="+", required=True)
    b.add_argument("--methods", nargs="+", choices=METHODS, default=["dp3d", "bbdp"])
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)

    r = sub.add_parser("report", help="savings decomposition for lot-sizing files")
    r.add_argument("--in", dest="inp", nargs="+", required=True)
    r.add_argument("--method", choices=METHODS, default="auto")
    r.add_argument("--out")
    r.add_argument("--plot-data")
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Infeasible as e:
        print(f"infeasible: {e}", file=sys.stderr)
        return 2
    except (OSError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
