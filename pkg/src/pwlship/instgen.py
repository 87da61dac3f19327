"""Seeded instance generators and the orienteering text format.

All randomness goes through ``random.Random(seed)`` integer draws, so the
same arguments give the same instance everywhere.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .lswrc import LotSizingInstance
from .model import Instance
from .pwl import PwlFunction

QMAX_CLASSES = {"small": 10, "medium": 50, "large": 100}
THETA_CLASSES = {"small": Fraction(2, 5), "medium": Fraction(3, 5), "large": Fraction(4, 5)}
SRLTP_QMAX = (30, 60, 120)

LSWRC_DEFAULTS = {
    "demand": (1, 9),
    "holding": (1, 3),
    "setup": (5, 15),
    "gap_growth": 2,
    "setup_noise": (0, 5),
    "first_slope": (8, 12),
    "slope_drop": (1, 3),
}

SRLTP_DEFAULTS = {
    "k": 3,
    "routes": 20,
    "slope": (1, 6),
}


def tmax_formula(time, theta):
    """Largest arc time plus ``theta`` times the consecutive-arc total."""
    n = len(time)
    big = max(time[i][j] for i in range(n) for j in range(i + 1, n) if time[i][j] is not None)
    l4l = sum(time[i][i + 1] for i in range(n - 1))
    t = big + theta * l4l
    if isinstance(t, Fraction) and t.denominator == 1:
        return int(t)
    return t


def _concave_cost(rng, hi, cfg):
    """Three-piece concave cost on ``[0, hi]`` with integer breakpoints and ``f(0) = 0``."""
    x1, x2 = sorted(rng.sample(range(1, hi), 2))
    s1 = rng.randint(*cfg["first_slope"])
    s2 = s1 - rng.randint(*cfg["slope_drop"])
    s3 = s2 - rng.randint(*cfg["slope_drop"])
    pts = [(0, 0), (x1, s1 * x1)]
    pts.append((x2, pts[-1][1] + s2 * (x2 - x1)))
    pts.append((hi, pts[-1][1] + s3 * (hi - x2)))
    return PwlFunction.from_breakpoints(pts)


def _cls(table, key):
    if isinstance(key, str):
        return table[key]
    return key


def generate_lswrc(n: int, qmax_class="small", theta_class="small", seed: int = 0,
                   config: Optional[dict] = None) -> LotSizingInstance:
    """Lot-sizing instance with idle-time dependent setup costs (``t = c``)."""
    if n < 2:
        raise ValueError("need at least two periods")
    cfg = dict(LSWRC_DEFAULTS, **(config or {}))
    qmax = _cls(QMAX_CLASSES, qmax_class)
    theta = _cls(THETA_CLASSES, theta_class)
    rng = random.Random(f"lswrc-{n}-{qmax}-{theta}-{seed}")
    demand = [rng.randint(*cfg["demand"]) for _ in range(n)]
    holding = [rng.randint(*cfg["holding"]) for _ in range(n)]
    base = [rng.randint(*cfg["setup"]) for _ in range(n - 1)]
    cost = [[None] * n for _ in range(n)]
    for i in range(n - 1):
        cost[i][i + 1] = base[i]
        for j in range(i + 2, n):
            cost[i][j] = base[i] + cfg["gap_growth"] * (j - i - 1) + rng.randint(*cfg["setup_noise"])
    production = [_concave_cost(rng, qmax + d, cfg) for d in demand]
    tmax = tmax_formula(cost, theta)
    meta = {"generator": "lswrc", "seed": seed, "qmax_class": qmax_class,
            "theta_class": theta_class, "theta": str(theta), "config": cfg}
    return LotSizingInstance(tuple(demand), tuple(holding), tuple(production),
                             tuple(tuple(r) for r in cost), qmax, tmax,
                             name=f"lswrc_n{n}_q{qmax}_th{theta_class}_s{seed}", meta=meta)


# ---------------------------------------------------------------------------
# orienteering data and route-evaluation instances


@dataclass
class Orienteering:
    tmax: float
    paths: int
    points: list          # (x, y, score)
    name: str = ""


def parse_orienteering(path) -> Orienteering:
    """Read the classic layout: a ``tmax paths`` header, then ``x y score`` lines."""
    text = Path(path).read_text()
    lines = [(k + 1, ln.split()) for k, ln in enumerate(text.splitlines())]
    lines = [(k, p) for k, p in lines if p]
    if not lines:
        raise ValueError(f"{path}: empty file")
    k, head = lines[0]
    if len(head) < 1 or len(head) > 2:
        raise ValueError(f"{path}:{k}: header must be 'tmax [paths]'")
    try:
        tmax = _num(head[0])
        paths = int(head[1]) if len(head) > 1 else 1
    except ValueError:
        raise ValueError(f"{path}:{k}: malformed header") from None
    pts = []
    for k, parts in lines[1:]:
        if len(parts) != 3:
            raise ValueError(f"{path}:{k}: expected 'x y score', got {len(parts)} fields")
        try:
            pts.append(tuple(_num(p) for p in parts))
        except ValueError:
            raise ValueError(f"{path}:{k}: non-numeric field") from None
    return Orienteering(tmax, paths, pts, Path(path).stem)


def write_orienteering(data: Orienteering, path) -> None:
    rows = [f"{data.tmax}\t{data.paths}"]
    rows += ["\t".join(str(v) for v in p) for p in data.points]
    Path(path).write_text("\n".join(rows) + "\n")


def _num(s: str):
    try:
        return int(s)
    except ValueError:
        return float(s)


def synthetic_orienteering(n: int = 32, seed: int = 0, tmax: float = 250) -> Orienteering:
    """Random points in a 100 x 100 square with scores in 1..10."""
    rng = random.Random(f"orienteering-{n}-{seed}")
    pts = [(rng.randint(0, 100), rng.randint(0, 100), rng.randint(1, 10)) for _ in range(n)]
    pts[0] = pts[0][:2] + (0,)
    pts[-1] = pts[-1][:2] + (0,)
    return Orienteering(tmax, 1, pts, f"synthetic{n}_s{seed}")


def nearest_neighbour_route(points, rng: random.Random, k: int = 3) -> list[int]:
    """Start at the first point, end at the last, pick among the ``k`` nearest unvisited."""
    n = len(points)
    todo = set(range(1, n - 1))
    route = [0]
    while todo:
        x, y = points[route[-1]][:2]
        near = sorted(todo, key=lambda j: (math.dist((x, y), points[j][:2]), j))[:k]
        nxt = near[rng.randrange(len(near))]
        route.append(nxt)
        todo.remove(nxt)
    route.append(n - 1)
    return route


def _four_step_profit(rng, score, qmax, cfg):
    """Four pieces, ``f(0) = 0``, cheaper the more of the node's imbalance is served."""
    span = max(4, min(qmax // 3, 4 + 2 * int(score)))
    lo_pt, hi_pt = cfg["slope"]
    if rng.random() < 0.5:            # surplus node: pick-ups pay off
        b = rng.randint(2, span)
        a = -rng.randint(2, max(2, span // 3))
    else:                             # deficit node: deliveries pay off
        a = -rng.randint(2, span)
        b = rng.randint(2, max(2, span // 3))
    left = sorted(rng.sample(range(a + 1, 0), 1)) if a < -1 else []
    right = sorted(rng.sample(range(1, b), 1)) if b > 1 else []
    xs = [a] + left + [0] + right + [b]
    # marginal gains shrink with distance from zero on the useful side,
    # the other side costs money
    useful_right = b > -a
    pts = {0: 0}
    val = 0
    g = rng.randint(lo_pt, hi_pt)
    for x0, x1 in zip(xs[xs.index(0):], xs[xs.index(0) + 1:]):
        slope = -g if useful_right else rng.randint(lo_pt, hi_pt)
        val += slope * (x1 - x0)
        pts[x1] = val
        g = max(0, g - rng.randint(1, 2))
    val = 0
    g = rng.randint(lo_pt, hi_pt)
    rev = xs[:xs.index(0) + 1][::-1]
    for x0, x1 in zip(rev, rev[1:]):
        slope = g if not useful_right else -rng.randint(lo_pt, hi_pt)
        val += slope * (x1 - x0)
        pts[x1] = val
        g = max(0, g - rng.randint(1, 2))
    return PwlFunction.from_breakpoints(sorted(pts.items()))


def generate_srltp(base: Optional[Orienteering] = None, qmax: int = 30, seed: int = 0, *,
                   routes: Optional[int] = None, k: Optional[int] = None,
                   config: Optional[dict] = None) -> list[tuple[Instance, list]]:
    """Route-evaluation instances on randomized nearest-neighbour routes.

    Returns ``[(instance, route), ...]`` where ``route`` maps instance node
    positions to indices of ``base.points``.
    """
    cfg = dict(SRLTP_DEFAULTS, **(config or {}))
    if k is not None:
        cfg["k"] = k
    if routes is not None:
        cfg["routes"] = routes
    if base is None:
        base = synthetic_orienteering(seed=seed)
    if len(base.points) < 2:
        raise ValueError("need at least a start and an end point")
    rng = random.Random(f"srltp-{base.name}-{qmax}-{seed}")
    profits = [_four_step_profit(rng, p[2], qmax, cfg) for p in base.points]
    out = []
    for r in range(cfg["routes"]):
        route = nearest_neighbour_route(base.points, rng, cfg["k"])
        n = len(route)
        pos = [base.points[v][:2] for v in route]
        dist = [[round(math.dist(pos[i], pos[j]), 6) if j > i else None for j in range(n)] for i in range(n)]
        prof = [profits[v] for v in route]
        inst = Instance(cost=dist, time=dist, profit=prof, qmax=qmax, tmax=base.tmax,
                        name=f"{base.name}_q{qmax}_r{r}_s{seed}",
                        meta={"generator": "srltp", "seed": seed, "route": route, "config": cfg})
        out.append((inst, route))
    return out
