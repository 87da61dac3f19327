"""JSON instance and solution files.

Instance files carry ``"format": 1``.  Numbers stay integers where the data
is integral; non-integer rationals are written as ``"p/q"`` strings so that
exact data survives a round trip.  Forbidden arcs are ``null``.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Union

from .lswrc import LotSizingInstance
from .model import Instance, Solution
from .pwl import PwlFunction, Segment

FORMAT = 1


def enc(v):
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, (list, tuple)):
        return [enc(x) for x in v]
    if isinstance(v, dict):
        return {str(k): enc(x) for k, x in v.items()}
    return v


def dec(v):
    if isinstance(v, str) and "/" in v:
        try:
            return Fraction(v)
        except ValueError:
            return v
    if isinstance(v, list):
        return [dec(x) for x in v]
    return v


def function_to_json(f: PwlFunction) -> dict:
    pts = [(s.lo, s(s.lo)) for s in f.segments[:1]]
    for s in f.segments:
        if s.lo != pts[-1][0] or s(s.lo) != pts[-1][1]:
            pts.append((s.lo, s(s.lo)))
        if s.hi != s.lo:
            pts.append((s.hi, s(s.hi)))
    try:
        same = PwlFunction.from_breakpoints(pts).segments == tuple(
            Segment(s.lo, s.hi, s.slope, s.intercept) for s in f.segments)
    except ValueError:
        same = False
    if same:
        return {"breakpoints": enc([list(p) for p in pts])}
    return {"segments": enc([[s.lo, s.hi, s.slope, s.intercept] for s in f.segments])}


def function_from_json(d: dict) -> PwlFunction:
    if "breakpoints" in d:
        return PwlFunction.from_breakpoints(dec(d["breakpoints"]))
    if "segments" in d:
        return PwlFunction(Segment(*dec(s)) for s in d["segments"])
    raise ValueError("profit entry needs 'breakpoints' or 'segments'")


def _matrix(m):
    return [[enc(v) for v in row] for row in m]


def instance_to_json(inst: Union[Instance, LotSizingInstance]) -> dict:
    if isinstance(inst, LotSizingInstance):
        d = {"format": FORMAT, "type": "lswrc", "name": inst.name, "n": inst.n,
             "cost": _matrix(inst.cost), "qmax": enc(inst.qmax), "tmax": enc(inst.tmax),
             "profit": [function_to_json(f) for f in inst.production],
             "demand": enc(list(inst.demand)), "holding": enc(list(inst.holding))}
        if inst.time is not inst.cost and tuple(map(tuple, inst.time)) != tuple(map(tuple, inst.cost)):
            d["time"] = _matrix(inst.time)
    else:
        d = {"format": FORMAT, "type": "areltp", "name": inst.name, "n": inst.n,
             "cost": _matrix(inst.cost), "qmax": enc(inst.qmax), "tmax": enc(inst.tmax),
             "profit": [function_to_json(f) for f in inst.profit]}
        if inst.time != inst.cost:
            d["time"] = _matrix(inst.time)
        if not inst.standard:
            d["skip_load"] = enc(list(inst.skip_load))
            d["skip_cost"] = enc(list(inst.skip_cost))
    d["meta"] = enc(dict(inst.meta))
    return d


def instance_from_json(d: dict) -> Union[Instance, LotSizingInstance]:
    fmt = d.get("format", FORMAT)
    if fmt != FORMAT:
        raise ValueError(f"unsupported instance format {fmt}")
    kind = d.get("type", "areltp")
    for key in ("cost", "qmax", "profit"):
        if key not in d:
            raise ValueError(f"instance file lacks '{key}'")
    cost = dec(d["cost"])
    time = dec(d["time"]) if d.get("time") is not None else None
    profit = [function_from_json(p) for p in d["profit"]]
    if "n" in d and d["n"] != len(profit):
        raise ValueError(f"n = {d['n']} but {len(profit)} profit functions")
    qmax, tmax = dec(d["qmax"]), dec(d.get("tmax"))
    meta = d.get("meta") or {}
    name = d.get("name", "")
    if kind == "lswrc":
        for key in ("demand", "holding"):
            if key not in d:
                raise ValueError(f"lswrc instance lacks '{key}'")
        n = len(profit)
        full = lambda m: tuple(tuple(m[i][j] if j > i else None for j in range(n)) for i in range(n))  # noqa: E731
        return LotSizingInstance(tuple(dec(d["demand"])), tuple(dec(d["holding"])), tuple(profit),
                                 full(cost), qmax, tmax, full(time) if time is not None else None,
                                 name=name, meta=meta)
    if kind != "areltp":
        raise ValueError(f"unknown instance type {kind!r}")
    return Instance(cost=cost, time=time, profit=profit, qmax=qmax, tmax=tmax,
                    skip_load=tuple(dec(d.get("skip_load") or ())),
                    skip_cost=tuple(dec(d.get("skip_cost") or ())), name=name, meta=meta)


def load_instance(path) -> Union[Instance, LotSizingInstance]:
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ValueError(f"{path}: not valid JSON ({e})") from None
    return instance_from_json(d)


def save_instance(inst, path) -> None:
    Path(path).write_text(json.dumps(instance_to_json(inst), indent=1) + "\n")


def solution_to_json(sol: Solution, method: str, dual_bound=None, nodes=None, **extra) -> dict:
    d = {"objective": enc(sol.objective), "visits": list(sol.visits), "y": enc(list(sol.y)),
         "duration": enc(sol.duration), "load_profile": enc(list(sol.load_profile)),
         "method": method}
    if dual_bound is not None:
        d["dual_bound"] = enc(dual_bound)
    if nodes is not None:
        d["nodes_expanded"] = nodes
    d.update(enc(extra))
    return d


def save_solution(d: dict, path) -> None:
    Path(path).write_text(json.dumps(d, indent=1) + "\n")
