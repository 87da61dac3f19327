"""MIP export in the text LP format, plus a small reader for checking.

Variables (node indices are 0-based):

    x_i_j    arc i -> j used (binary)
    y_i      transfer at node i (free)
    Y_i      cost change f_i(y_i) at node i (free)
    lam_i_k  weight of breakpoint k of f_i, in [0, 1]
    alp_i_k  breakpoint k may carry weight (binary, alpha and beta variants)
    bet_i_k  piece k between breakpoints k and k+1 is active (binary, beta variant)
    ONE      fixed to 1, carries constant objective terms

The profit functions of the instance are cost changes, so ``Y_i`` enters
the objective with a plus sign.  The convex combination sums to the visit
indicator ``v_i`` (out-degree of ``i``, or 1 for the last node), which lets
unvisited nodes keep ``Y_i = 0`` even when ``f_i(0) != 0``.  Skip loads and
skip costs of unvisited nodes enter through ``1 - v_i``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .model import Instance
from .pwl import PwlFunction

VARIANTS = ("sos2", "alpha", "beta")
WRAP = 8   # terms per line


def breakpoints(f: PwlFunction) -> list[tuple]:
    """``f`` as a point sequence; equal consecutive ``x`` encode a jump."""
    pts: list[tuple] = []
    prev_hi = None
    for s in f.segments:
        if prev_hi is not None and s.lo > prev_hi:
            raise ValueError(f"domain gap ({prev_hi}, {s.lo}) cannot be written as one point sequence")
        for x in ((s.lo,) if s.lo == s.hi else (s.lo, s.hi)):
            p = (x, s(x))
            if not pts or pts[-1] != p:
                pts.append(p)
        prev_hi = s.hi
    if not pts:
        raise ValueError("empty profit function")
    return pts


def _num(v) -> str:
    if isinstance(v, Fraction):
        v = v.numerator if v.denominator == 1 else float(v)
    if isinstance(v, float):
        if v.is_integer() and abs(v) < 1e15:
            return str(int(v))
        return repr(v)
    return str(v)


def _expr(terms) -> str:
    """``[(coef, name), ...]`` as an LP expression, wrapped every few terms."""
    parts = []
    for k, (c, name) in enumerate(terms):
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = -c if c < 0 else c
        body = name if mag == 1 else f"{_num(mag)} {name}"
        if not parts:
            parts.append(body if sign == "+" else f"- {body}")
        else:
            parts.append(f"{sign} {body}")
    if not parts:
        return "0 ONE"
    lines = [" ".join(parts[i:i + WRAP]) for i in range(0, len(parts), WRAP)]
    return "\n   ".join(lines)


class _Model:
    def __init__(self):
        self.rows: list[tuple] = []    # (name, terms, sense, rhs)
        self.binaries: list[str] = []
        self.free: list[str] = []
        self.bounds: list[tuple] = []  # (name, lo, hi)
        self.sos: list[tuple] = []     # (name, [(var, weight)])

    def row(self, name, terms, sense, rhs):
        self.rows.append((name, list(terms), sense, rhs))


def build(inst: Instance, variant: str = "beta"):
    """Return ``(model, objective_terms)`` for ``inst``."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    n = inst.n
    m = _Model()
    arcs = [(i, j) for i, j, _, t in inst.arcs() if t is not None or inst.tmax is None]
    out = {i: [] for i in range(n)}
    inn = {i: [] for i in range(n)}
    for i, j in arcs:
        out[i].append(f"x_{i}_{j}")
        inn[j].append(f"x_{i}_{j}")
        m.binaries.append(f"x_{i}_{j}")
    obj = [(inst.cost[i][j], f"x_{i}_{j}") for i, j in arcs]
    const = 0

    def visit(i):
        # v_i as (terms, constant)
        if i == n - 1:
            return [], 1
        return [(1, x) for x in out[i]], 0

    # flow
    m.row("src", [(1, x) for x in out[0]], "=", 1)
    m.row("sink", [(1, x) for x in inn[n - 1]], "=", 1)
    for i in range(1, n - 1):
        m.row(f"flow_{i}", [(1, x) for x in inn[i]] + [(-1, x) for x in out[i]], "=", 0)

    pts = [breakpoints(f) for f in inst.profit]
    for i in range(n):
        vt, vc = visit(i)
        sl, sc = inst.skip_load[i], inst.skip_cost[i]
        m.free += [f"y_{i}", f"Y_{i}"]
        P = pts[i]
        lam = [f"lam_{i}_{k}" for k in range(len(P))]
        for v in lam:
            m.bounds.append((v, 0, 1))
        # y_i = sum lam X + skip_load (1 - v_i)
        m.row(f"defy_{i}", [(1, f"y_{i}")] + [(-x, v) for (x, _), v in zip(P, lam)]
              + [(sl, v) for _, v in vt], "=", sl * (1 - vc))
        m.row(f"defY_{i}", [(1, f"Y_{i}")] + [(-y, v) for (_, y), v in zip(P, lam)], "=", 0)
        m.row(f"cvx_{i}", [(1, v) for v in lam] + [(-c, v) for c, v in vt], "=", vc)
        # visit linking: a_i v_i <= y_i - skip part <= b_i v_i
        a, b = P[0][0], P[-1][0]
        m.row(f"vlo_{i}", [(1, f"y_{i}")] + [(sl - a, v) for _, v in vt], ">=", sl * (1 - vc) + a * vc)
        m.row(f"vhi_{i}", [(1, f"y_{i}")] + [(sl - b, v) for _, v in vt], "<=", sl * (1 - vc) + b * vc)
        obj.append((1, f"Y_{i}"))
        const += sc * (1 - vc)
        obj += [(-sc * c, v) for c, v in vt]
        if len(P) > 1:
            _linearize(m, i, lam, variant)
    # load after every node
    for i in range(n):
        terms = [(1, f"y_{j}") for j in range(i + 1)]
        m.row(f"caplo_{i}", terms, ">=", 0)
        m.row(f"caphi_{i}", terms, "<=", inst.qmax)
    if inst.tmax is not None:
        m.row("dur", [(inst.time[i][j], f"x_{i}_{j}") for i, j in arcs], "<=", inst.tmax)
    if const:
        obj.append((const, "ONE"))
    return m, obj


def _linearize(m: _Model, i: int, lam: list, variant: str):
    K = len(lam)
    if variant == "sos2":
        m.sos.append((f"sos_{i}", [(v, k + 1) for k, v in enumerate(lam)]))
        return
    alp = [f"alp_{i}_{k}" for k in range(K)]
    m.binaries += alp
    for k in range(K):
        m.row(f"lamalp_{i}_{k}", [(1, lam[k]), (-1, alp[k])], "<=", 0)
    m.row(f"alpsum_{i}", [(1, a) for a in alp], "=", 2)
    if variant == "alpha":
        for k in range(K - 2):
            for k2 in range(k + 2, K):
                m.row(f"alppair_{i}_{k}_{k2}", [(1, alp[k]), (1, alp[k2])], "<=", 1)
        return
    bet = [f"bet_{i}_{k}" for k in range(K - 1)]
    m.binaries += bet
    m.row(f"betsum_{i}", [(1, b) for b in bet], "=", 1)
    for k in range(K - 1):
        m.row(f"betlink_{i}_{k}", [(2, bet[k]), (-1, alp[k]), (-1, alp[k + 1])], "<=", 0)


def render(inst: Instance, variant: str = "beta") -> str:
    m, obj = build(inst, variant)
    lines = [
        f"\\ instance: {inst.name or 'unnamed'}",
        f"\\ variant: {variant}",
        "\\ Y_i is the cost change f_i(y_i) of node i and enters the objective with +1.",
        "\\ The objective equals the route objective (arc costs + cost changes + skip costs).",
        "Minimize",
        f" obj: {_expr(obj)}",
        "Subject To",
    ]
    for name, terms, sense, rhs in m.rows:
        lines.append(f" {name}: {_expr(terms)} {sense} {_num(rhs)}")
    lines.append("Bounds")
    for v in m.free:
        lines.append(f" {v} free")
    for v, lo, hi in m.bounds:
        lines.append(f" {_num(lo)} <= {v} <= {_num(hi)}")
    lines.append(" ONE = 1")
    lines.append("Binaries")
    for k in range(0, len(m.binaries), WRAP):
        lines.append(" " + " ".join(m.binaries[k:k + WRAP]))
    if m.sos:
        lines.append("SOS")
        for name, members in m.sos:
            lines.append(f" {name}: S2:: " + " ".join(f"{v}:{w}" for v, w in members))
    lines.append("End")
    return "\n".join(lines) + "\n"


def export(inst: Instance, variant: str = "beta", path=None) -> str:
    """Write the model to ``path`` (if given) and return the text."""
    text = render(inst, variant)
    if path is not None:
        Path(path).write_text(text)
    return text


# ---------------------------------------------------------------------------
# reader


@dataclass
class LpModel:
    objective: dict = field(default_factory=dict)
    rows: dict = field(default_factory=dict)        # name -> (terms dict, sense, rhs)
    bounds: dict = field(default_factory=dict)      # name -> (lo, hi)
    binaries: list = field(default_factory=list)
    sos: dict = field(default_factory=dict)
    variables: set = field(default_factory=set)

    def counts(self) -> dict:
        return {"variables": len(self.variables), "constraints": len(self.rows),
                "binaries": len(self.binaries), "sos": len(self.sos)}

    def check(self, values: dict, tol: float = 1e-6) -> list[str]:
        """Violated rows, bounds and integrality for an assignment."""
        bad = []
        val = lambda v: values.get(v, 1 if v == "ONE" else 0)  # noqa: E731
        for name, (terms, sense, rhs) in self.rows.items():
            lhs = sum(c * val(v) for v, c in terms.items())
            if (sense == "<=" and lhs > rhs + tol) or (sense == ">=" and lhs < rhs - tol) \
                    or (sense == "=" and abs(lhs - rhs) > tol):
                bad.append(f"{name}: {lhs} {sense} {rhs}")
        for v, (lo, hi) in self.bounds.items():
            x = val(v)
            if x < lo - tol or x > hi + tol:
                bad.append(f"bound {v}: {x} not in [{lo}, {hi}]")
        for v in self.binaries:
            if min(abs(val(v)), abs(val(v) - 1)) > tol:
                bad.append(f"binary {v}: {val(v)}")
        for name, members in self.sos.items():
            nz = [k for k, (v, _) in enumerate(members) if abs(val(v)) > tol]
            if nz and nz[-1] - nz[0] > 1:
                bad.append(f"sos {name}: nonzeros {nz}")
        return bad

    def objective_value(self, values: dict) -> float:
        return sum(c * values.get(v, 1 if v == "ONE" else 0) for v, c in self.objective.items())


_TERM = re.compile(r"([+-]?)\s*([0-9.eE+-]*\d[0-9.eE+-]*)?\s*([A-Za-z_][\w.]*)")
_SECTIONS = {"minimize": "obj", "subject to": "rows", "bounds": "bounds",
             "binaries": "bin", "sos": "sos", "end": "end"}


def _parse_expr(text: str) -> dict:
    terms: dict = {}
    for sign, coef, name in _TERM.findall(text):
        c = float(coef) if coef else 1.0
        if sign == "-":
            c = -c
        terms[name] = terms.get(name, 0) + c
    return terms


def read_lp(path_or_text) -> LpModel:
    """Parse the subset of the LP format written by :func:`export`."""
    text = str(path_or_text)
    if "\n" not in text and Path(text).exists():
        text = Path(text).read_text()
    model = LpModel()
    section = None
    stmts: list[tuple] = []
    for raw in text.splitlines():
        line = raw.split("\\", 1)[0].strip()
        if not line:
            continue
        key = line.lower()
        if key in _SECTIONS:
            section = _SECTIONS[key]
            continue
        if section in ("obj", "rows") and stmts and stmts[-1][0] == section and ":" not in line:
            stmts[-1] = (section, stmts[-1][1] + " " + line)
        else:
            stmts.append((section, line))
    for section, line in stmts:
        if section == "obj":
            model.objective = _parse_expr(line.split(":", 1)[1])
        elif section == "rows":
            name, body = (s.strip() for s in line.split(":", 1))
            mt = re.search(r"(<=|>=|=)\s*(\S+)\s*$", body)
            if mt is None:
                raise ValueError(f"row {name}: no sense")
            model.rows[name] = (_parse_expr(body[:mt.start()]), mt.group(1), float(mt.group(2)))
        elif section == "bounds":
            parts = line.split()
            if len(parts) == 2 and parts[1] == "free":
                model.bounds[parts[0]] = (float("-inf"), float("inf"))
            elif len(parts) == 5:
                model.bounds[parts[2]] = (float(parts[0]), float(parts[4]))
            elif len(parts) == 3 and parts[1] == "=":
                model.bounds[parts[0]] = (float(parts[2]), float(parts[2]))
            else:
                raise ValueError(f"unsupported bound line: {line}")
        elif section == "bin":
            model.binaries += line.split()
        elif section == "sos":
            name, body = line.split(":", 1)
            members = body.split("::", 1)[1].split()
            model.sos[name.strip()] = [(v.split(":")[0], float(v.split(":")[1])) for v in members]
    names = set(model.objective)
    for terms, _, _ in model.rows.values():
        names |= set(terms)
    names |= set(model.bounds) | set(model.binaries)
    model.variables = names
    return model


def solution_values(inst: Instance, sol, variant: str = "beta") -> dict:
    """Variable assignment of the exported model that represents ``sol``."""
    n = inst.n
    vals: dict = {"ONE": 1}
    vis = list(sol.visits)
    for a, b in zip(vis, vis[1:]):
        vals[f"x_{a}_{b}"] = 1
    for i in range(n):
        P = breakpoints(inst.profit[i])
        vals[f"y_{i}"] = float(sol.y[i])
        if i not in vis:
            continue
        y = sol.y[i]
        w = _weights_at(P, y)
        vals[f"Y_{i}"] = float(sum(wk * P[k][1] for k, wk in w.items()))
        for k, wk in w.items():
            vals[f"lam_{i}_{k}"] = float(wk)
        if len(P) > 1 and variant != "sos2":
            ks = sorted(w)
            k0 = ks[0] if ks[0] < len(P) - 1 else ks[0] - 1
            vals[f"alp_{i}_{k0}"] = vals[f"alp_{i}_{k0 + 1}"] = 1
            if variant == "beta":
                vals[f"bet_{i}_{k0}"] = 1
    for i in range(n):
        if i not in vis and len(breakpoints(inst.profit[i])) > 1 and variant != "sos2":
            vals[f"alp_{i}_0"] = vals[f"alp_{i}_1"] = 1
            if variant == "beta":
                vals[f"bet_{i}_0"] = 1
    return vals


def _weights_at(P, y) -> dict:
    """Convex weights of ``y`` on the cheapest piece containing it."""
    best = None
    for k in range(len(P)):
        if P[k][0] == y and (best is None or P[k][1] < best[0]):
            best = (P[k][1], {k: 1})
    for k in range(len(P) - 1):
        (x0, v0), (x1, v1) = P[k], P[k + 1]
        if x0 < y < x1:
            t = (y - x0) / (x1 - x0)
            v = v0 + t * (v1 - v0)
            if best is None or v < best[0]:
                best = (v, {k: 1 - t, k + 1: t})
    if best is None:
        raise ValueError(f"transfer {y} outside the profit domain")
    return best[1]
