"""Piecewise-linear functions on closed interval pieces.

A function is an ordered tuple of :class:`Segment` objects.  Consecutive
segments may touch (``prev.hi == next.lo``) or leave a gap, but never
overlap.  Where two segments share a border both are defined there and the
function value is the smaller one, which is how lower semicontinuity is
represented.  Point segments (``lo == hi``) are allowed.

Numbers are whatever the caller supplies.  ``int`` and ``Fraction`` inputs
stay exact (divisions produce ``Fraction``), ``float`` inputs stay float.
"""
from __future__ import annotations

import heapq
import math
from bisect import bisect_left
from fractions import Fraction
from numbers import Rational
from typing import Any, Iterable, NamedTuple, Sequence

EPS = 1e-9
SWEEP_LIMIT = 64   # below this many edges one sweep beats pairwise merging


class Segment(NamedTuple):
    lo: Any
    hi: Any
    slope: Any
    intercept: Any
    tag: Any = None

    def __call__(self, q):
        return self.slope * q + self.intercept


def div(a, b):
    """Divide, staying exact for rational operands."""
    if isinstance(a, Rational) and isinstance(b, Rational):
        r = Fraction(a) / b
        return r.numerator if r.denominator == 1 else r
    return a / b


def _normal(x):
    if type(x) is Fraction and x.denominator == 1:
        return x.numerator
    return x


class PwlFunction:
    """Immutable piecewise-linear function."""

    __slots__ = ("segments", "_his")

    def __init__(self, segments: Iterable[Segment] = (), check: bool = True):
        segs = tuple(segments)
        if check:
            prev_hi = None
            for s in segs:
                if s.lo > s.hi:
                    raise ValueError(f"segment with lo > hi: {s}")
                if prev_hi is not None and s.lo < prev_hi:
                    raise ValueError(f"overlapping segments at {s.lo}")
                prev_hi = s.hi
        self.segments = segs
        self._his = None

    # construction helpers
    @classmethod
    def from_breakpoints(cls, points: Sequence[Sequence], tag=None) -> "PwlFunction":
        """Build from ``[(x0, y0), (x1, y1), ...]``.

        Consecutive points with equal ``x`` encode a jump.  A single point
        gives a point-domain function.
        """
        pts = [(p[0], p[1]) for p in points]
        if not pts:
            return cls()
        if len(pts) == 1:
            x, y = pts[0]
            return cls([Segment(x, x, 0, y, tag)])
        segs = []
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            if x1 < x0:
                raise ValueError("breakpoints must be sorted by x")
            if x1 == x0:
                continue
            k = div(y1 - y0, x1 - x0)
            segs.append(Segment(x0, x1, k, _normal(y0 - k * x0), tag))
        if not segs:
            x, y = pts[0]
            ymin = min(p[1] for p in pts)
            return cls([Segment(x, x, 0, ymin, tag)])
        return cls(segs)

    @classmethod
    def linear(cls, slope, intercept, lo, hi, tag=None) -> "PwlFunction":
        return cls([Segment(lo, hi, slope, intercept, tag)])

    @classmethod
    def point(cls, x, value, tag=None) -> "PwlFunction":
        return cls([Segment(x, x, 0, value, tag)])

    # basic queries
    def __len__(self):
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)

    def __bool__(self):
        return bool(self.segments)

    def __repr__(self):
        body = "; ".join(f"{s.slope}q{'+' if s.intercept >= 0 else ''}{s.intercept} on [{s.lo}, {s.hi}]"
                         for s in self.segments)
        return f"PwlFunction({body})"

    def __eq__(self, other):
        if not isinstance(other, PwlFunction):
            return NotImplemented
        return self.segments == other.segments

    def __hash__(self):
        return hash(self.segments)

    @property
    def lo(self):
        return self.segments[0].lo if self.segments else None

    @property
    def hi(self):
        return self.segments[-1].hi if self.segments else None

    def __call__(self, q):
        return evaluate(self, q)

    def breakpoints(self) -> list:
        xs = set()
        for s in self.segments:
            xs.add(s.lo)
            xs.add(s.hi)
        return sorted(xs)

    def segments_at(self, q) -> list[Segment]:
        """All segments whose closed domain contains ``q``."""
        if self._his is None:
            self._his = [s.hi for s in self.segments]
        segs = self.segments
        i = bisect_left(self._his, q)
        out = []
        while i < len(segs) and segs[i].lo <= q:
            out.append(segs[i])
            i += 1
        return out

    def contains(self, q) -> bool:
        return bool(self.segments_at(q))

    def intervals(self) -> list[tuple]:
        """Domain as a list of maximal closed intervals."""
        out = []
        for s in self.segments:
            if out and s.lo <= out[-1][1]:
                out[-1] = (out[-1][0], max(out[-1][1], s.hi))
            else:
                out.append((s.lo, s.hi))
        return out

    def argmin(self):
        """Return ``(q, value)`` of the global minimum, smallest ``q`` on ties."""
        best = None
        for s in self.segments:
            for q in (s.lo, s.hi):
                v = s.slope * q + s.intercept
                if best is None or v < best[1] - EPS or (abs(v - best[1]) <= EPS and q < best[0]):
                    best = (q, v)
        if best is None:
            raise ValueError("argmin of an empty function")
        return best

    def min_value(self):
        return self.argmin()[1]

    def max_value(self):
        return max(max(s(s.lo), s(s.hi)) for s in self.segments)

    def canonical(self) -> tuple:
        """Tag-free representation with collinear touching pieces merged.

        Two functions with equal canonical forms have the same values
        everywhere.
        """
        out: list[list] = []
        for s in self.segments:
            if (out and out[-1][1] == s.lo and out[-1][2] == s.slope
                    and out[-1][3] == s.intercept):
                out[-1][1] = s.hi
            else:
                out.append([s.lo, s.hi, s.slope, s.intercept])
        return tuple(tuple(x) for x in out)

    def retag(self, tag) -> "PwlFunction":
        return PwlFunction((s._replace(tag=tag) for s in self.segments), check=False)

    def _limits(self):
        """Left limit, value and right limit at every breakpoint, in order."""
        seq = []
        for x in self.breakpoints():
            segs = self.segments_at(x)
            left = [s(x) for s in segs if s.lo < x]
            right = [s(x) for s in segs if s.hi > x]
            seq.append((x, min(left) if left else None, min(s(x) for s in segs),
                        min(right) if right else None))
        return seq

    def is_nondecreasing(self, tol=EPS) -> bool:
        if any(s.lo < s.hi and s.slope < -tol for s in self.segments):
            return False
        prev = None
        for _, left, value, right in self._limits():
            for v in (left, value, right):
                if v is None:
                    continue
                if prev is not None and v < prev - tol:
                    return False
                prev = v
        return True

    def is_continuous(self, tol=EPS) -> bool:
        """True when the domain is one interval and no jumps occur."""
        if len(self.intervals()) > 1:
            return False
        for _, left, value, right in self._limits():
            vals = [v for v in (left, value, right) if v is not None]
            if max(vals) - min(vals) > tol:
                return False
        return True


def evaluate(f: PwlFunction, q):
    """Value of ``f`` at ``q`` or ``None`` outside the domain."""
    segs = f.segments_at(q)
    if not segs:
        return None
    return min(s.slope * q + s.intercept for s in segs)


def shift(f: PwlFunction, c, tag=None, retag: bool = False) -> PwlFunction:
    """Add the constant ``c`` to every value."""
    if retag:
        return PwlFunction((Segment(s.lo, s.hi, s.slope, s.intercept + c, tag) for s in f.segments), check=False)
    if c == 0:
        return f
    return PwlFunction((s._replace(intercept=s.intercept + c) for s in f.segments), check=False)


def translate(f: PwlFunction, dq) -> PwlFunction:
    """Move the graph right by ``dq``: result(q) = f(q - dq)."""
    if dq == 0:
        return f
    return PwlFunction(
        (Segment(s.lo + dq, s.hi + dq, s.slope, s.intercept - s.slope * dq, s.tag) for s in f.segments),
        check=False)


def restrict(f: PwlFunction, lo=None, hi=None) -> PwlFunction:
    """Clip the domain to ``[lo, hi]`` (either bound may be ``None``)."""
    out = []
    changed = False
    for s in f.segments:
        a, b = s.lo, s.hi
        if lo is not None and a < lo:
            a = lo
        if hi is not None and b > hi:
            b = hi
        if a > b:
            changed = True
            continue
        if a == s.lo and b == s.hi:
            out.append(s)
        else:
            changed = True
            out.append(s._replace(lo=a, hi=b))
    if not changed:
        return f
    return PwlFunction(_drop_covered_points(out), check=False)


def _drop_covered_points(segs: list[Segment]) -> list[Segment]:
    """Remove point segments that a touching neighbour already covers."""
    if not any(s.lo == s.hi for s in segs):
        return segs
    out: list[Segment] = []
    for i, s in enumerate(segs):
        if s.lo != s.hi:
            out.append(s)
            continue
        x, v = s.lo, s(s.lo)
        # earlier kept neighbours win ties, later ones only when strictly lower
        prev = [t(x) for t in out[-2:] if t.lo <= x <= t.hi]
        nxt = [t(x) + (EPS if t.lo == t.hi else -EPS) for t in segs[i + 1:i + 3] if t.lo <= x <= t.hi]
        if (prev and min(prev) <= v + EPS) or (nxt and min(nxt) <= v):
            continue
        # a later point at x that is lower replaces this one
        while out and out[-1].lo == out[-1].hi == x and out[-1](x) > v + EPS:
            out.pop()
        out.append(s)
    return out


# ---------------------------------------------------------------------------
# envelope


def _merge2(A: Sequence[Segment], B: Sequence[Segment]):
    """Lower envelope of two segment sequences.

    Returns ``(segments, used_a, used_b)``.  Ties go to ``A``.
    """
    if not B:
        return tuple(A), bool(A), False
    if not A:
        return tuple(B), False, True
    if A[-1][1] < B[0][0]:
        return tuple(A) + tuple(B), True, True
    if B[-1][1] < A[0][0]:
        return tuple(B) + tuple(A), True, True

    xs = set()
    a_iv, a_pt, b_iv, b_pt = [], [], [], []
    for s in A:
        xs.add(s[0])
        xs.add(s[1])
        (a_pt if s[0] == s[1] else a_iv).append(s)
    for s in B:
        xs.add(s[0])
        xs.add(s[1])
        (b_pt if s[0] == s[1] else b_iv).append(s)
    xs = sorted(xs)

    out: list[Segment] = []
    used_a = used_b = False
    ia = ib = pa = pb = 0
    na, nb, npa, npb = len(a_iv), len(b_iv), len(a_pt), len(b_pt)
    nx = len(xs)
    for k in range(nx):
        x0 = xs[k]
        # pieces on the open interval (x0, x1)
        pieces = ()
        if k + 1 < nx:
            x1 = xs[k + 1]
            while ia < na and a_iv[ia][1] <= x0:
                ia += 1
            while ib < nb and b_iv[ib][1] <= x0:
                ib += 1
            sa = a_iv[ia] if ia < na and a_iv[ia][0] <= x0 else None
            sb = b_iv[ib] if ib < nb and b_iv[ib][0] <= x0 else None
            if sa is not None and sb is not None:
                ka, da = sa[2], sa[3]
                kb, db = sb[2], sb[3]
                d0 = (ka - kb) * x0 + (da - db)
                d1 = (ka - kb) * x1 + (da - db)
                if d0 <= EPS and d1 <= EPS:
                    pieces = ((x0, x1, sa, True),)
                elif d0 >= -EPS and d1 >= -EPS:
                    pieces = ((x0, x1, sb, False),)
                else:
                    xc = div(db - da, ka - kb)
                    if xc <= x0 or xc >= x1:
                        # numerically degenerate crossing: decide by midpoint
                        xm = (x0 + x1) / 2
                        pieces = ((x0, x1, sa, True),) if sa(xm) <= sb(xm) else ((x0, x1, sb, False),)
                    elif d0 < 0:
                        pieces = ((x0, xc, sa, True), (xc, x1, sb, False))
                    else:
                        pieces = ((x0, xc, sb, False), (xc, x1, sa, True))
            elif sa is not None:
                pieces = ((x0, x1, sa, True),)
            elif sb is not None:
                pieces = ((x0, x1, sb, False),)

        # isolated point segments at x0
        best = None
        while pa < npa and a_pt[pa][0] < x0:
            pa += 1
        while pa < npa and a_pt[pa][0] == x0:
            v = a_pt[pa](x0)
            if best is None or v < best[0]:
                best = (v, a_pt[pa], True)
            pa += 1
        while pb < npb and b_pt[pb][0] < x0:
            pb += 1
        while pb < npb and b_pt[pb][0] == x0:
            v = b_pt[pb](x0)
            if best is None or v < best[0] - EPS:
                best = (v, b_pt[pb], False)
            pb += 1
        if best is not None:
            neigh = []
            if out and out[-1][1] == x0:
                neigh.append(out[-1](x0))
            if pieces:
                neigh.append(pieces[0][2](x0))
            if not neigh or best[0] < min(neigh) - EPS:
                s = best[1]
                out.append(Segment(x0, x0, s[2], s[3], s[4]))
                if best[2]:
                    used_a = True
                else:
                    used_b = True

        for lo, hi, s, from_a in pieces:
            k, d, tag = s[2], s[3], s[4]
            if out:
                last = out[-1]
                if last[1] == lo and last[2] == k and last[3] == d and last[4] == tag:
                    out[-1] = Segment(last[0], hi, k, d, tag)
                else:
                    out.append(Segment(lo, hi, k, d, tag))
            else:
                out.append(Segment(lo, hi, k, d, tag))
            if from_a:
                used_a = True
            else:
                used_b = True
    return tuple(out), used_a, used_b


def envelope(fs: Sequence[PwlFunction]) -> PwlFunction:
    """Pointwise minimum over the union of domains.

    Pairs are merged level by level; where values tie the earlier input wins.
    """
    if not fs:
        raise ValueError("empty envelope")
    return PwlFunction(_envelope_segs([f.segments for f in fs]), check=False)


def _envelope_segs(level: list) -> tuple:
    if len(level) == 1:
        return tuple(level[0])
    while len(level) > 1:
        nxt = [_merge2(level[i], level[i + 1])[0] for i in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    return level[0]


def _sweep(groups: list) -> tuple:
    """Lower envelope of a handful of segment sequences in one sweep.

    Same result as the pairwise merge (earlier groups win ties) but with
    far less per-call overhead on tiny inputs.
    """
    ivs, pts, xs = [], [], set()
    for rank, g in enumerate(groups):
        for s in g:
            lo, hi = s[0], s[1]
            xs.add(lo)
            xs.add(hi)
            if lo == hi:
                pts.append((lo, rank, s))
            else:
                ivs.append((lo, rank, hi, s[2], s[3], s))
    xs = sorted(xs)
    ivs.sort(key=lambda e: (e[0], e[1]))
    pts.sort(key=lambda e: (e[0], e[1]))
    out: list = []
    active: list = []
    ii = ip = 0
    niv, npt, nx = len(ivs), len(pts), len(xs)
    for k in range(nx):
        x0 = xs[k]
        while ii < niv and ivs[ii][0] <= x0:
            active.append(ivs[ii])
            ii += 1
        if active:
            active = [e for e in active if e[2] > x0]
        pieces = []
        if k + 1 < nx and active:
            x1 = xs[k + 1]
            # winner just right of x0: lowest value, then lowest slope, then rank
            cur = None
            for e in active:
                v = e[3] * x0 + e[4]
                if cur is None or v < cv - EPS:
                    cur, cv = e, v
                elif v <= cv + EPS:
                    if e[3] < cur[3] - EPS or (e[3] <= cur[3] + EPS and e[1] < cur[1]):
                        if v < cv:
                            cv = v
                        cur = e
            x = x0
            while True:
                kc, dc = cur[3], cur[4]
                nxt, xn = None, x1
                for e in active:
                    ke = e[3]
                    if ke < kc - EPS:
                        xc = div(e[4] - dc, kc - ke)
                        if x < xc < xn or (nxt is not None and xc == xn and ke < nxt[3]):
                            if xc - x > EPS * max(1, abs(x)):
                                nxt, xn = e, xc
                pieces.append((x, xn, cur[5]))
                if nxt is None:
                    break
                cur, x = nxt, xn
        # isolated points at x0
        if ip < npt:
            best = None
            while ip < npt and pts[ip][0] < x0:
                ip += 1
            while ip < npt and pts[ip][0] == x0:
                sp = pts[ip][2]
                v = sp[2] * x0 + sp[3]
                if best is None or v < best[0] - EPS:
                    best = (v, sp)
                ip += 1
            if best is not None:
                neigh = []
                if out and out[-1][1] == x0:
                    neigh.append(out[-1](x0))
                if pieces:
                    sg = pieces[0][2]
                    neigh.append(sg[2] * x0 + sg[3])
                if not neigh or best[0] < min(neigh) - EPS:
                    sp = best[1]
                    out.append(Segment(x0, x0, sp[2], sp[3], sp[4]))
        for lo, hi, sg in pieces:
            kk, dd, tag = sg[2], sg[3], sg[4]
            if out:
                last = out[-1]
                if last[1] == lo and last[2] == kk and last[3] == dd and last[4] == tag:
                    out[-1] = Segment(last[0], hi, kk, dd, tag)
                    continue
            out.append(Segment(lo, hi, kk, dd, tag))
    return tuple(out)


def dominates(f: PwlFunction, g: PwlFunction) -> bool:
    """True if ``f`` is defined wherever ``g`` is and never larger."""
    return not _merge2(f.segments, g.segments)[2]


# ---------------------------------------------------------------------------
# superposition


def _pack(edges: list) -> list[list]:
    """Split possibly overlapping edges into non-overlapping chains."""
    edges.sort(key=lambda s: (s[0], s[1]))
    chains: list[list[Segment]] = []
    heap: list = []
    for e in edges:
        if heap and heap[0][0] <= e[0]:
            _, idx = heapq.heappop(heap)
        else:
            idx = len(chains)
            chains.append([])
        chains[idx].append(e)
        heapq.heappush(heap, (e[1], idx))
    return chains


def superpose(V: PwlFunction, f: PwlFunction) -> PwlFunction:
    """Infimal convolution ``(V ⊞ f)(q) = min_y V(q - y) + f(y)``.

    Each pair of segments spans a parallelogram of feasible states whose
    lower boundary is two edges: along ``V`` then along ``f`` when ``V`` is
    flatter, otherwise the other way round.  For every segment of ``f`` the
    edges along ``V`` with ``y`` pinned to one end of the ``f``-segment form
    two proper functions; the edges along ``f`` overlap and are packed into
    chains.  The result is the envelope of the per-segment envelopes.

    Output tags are ``(vtag, 'y', y0)`` meaning ``y = y0`` or
    ``(vtag, 'p', p0)`` meaning ``y = q - p0``.
    """
    if not V.segments or not f.segments:
        return PwlFunction()
    per_f = []
    vsegs = V.segments
    for fs in f.segments:
        c, d, kf, df = fs[0], fs[1], fs[2], fs[3]
        along_v_lo: list = []   # y pinned at c; plain tuples until the envelope
        along_v_hi: list = []   # y pinned at d
        along_f: list = []
        for vs in vsegs:
            a, b, kv, dv, vt = vs
            if a == b and c == d:
                along_f.append((a + c, a + c, 0, kv * a + dv + kf * c + df, (vt, "y", c)))
            elif a == b:
                along_f.append((a + c, a + d, kf, kv * a + dv - kf * a + df, (vt, "p", a)))
            elif c == d:
                along_v_lo.append((a + c, b + c, kv, dv - kv * c + kf * c + df, (vt, "y", c)))
            elif kv < kf:
                along_v_lo.append((a + c, b + c, kv, dv - kv * c + kf * c + df, (vt, "y", c)))
                along_f.append((b + c, b + d, kf, kv * b + dv - kf * b + df, (vt, "p", b)))
            else:
                along_f.append((a + c, a + d, kf, kv * a + dv - kf * a + df, (vt, "p", a)))
                along_v_hi.append((a + d, b + d, kv, dv - kv * d + kf * d + df, (vt, "y", d)))
        groups = []
        if along_v_lo:
            groups.append(along_v_lo)
        if along_v_hi:
            groups.append(along_v_hi)
        if along_f:
            groups.extend(_pack(along_f))
        per_f.append(groups)
    flat = [g for groups in per_f for g in groups]
    if sum(len(g) for g in flat) <= SWEEP_LIMIT:
        return PwlFunction(_sweep(flat), check=False)
    per_f = [[[Segment(*e) for e in g] for g in groups] for groups in per_f]
    return PwlFunction(_envelope_segs([_envelope_segs(groups) for groups in per_f]), check=False)


# ---------------------------------------------------------------------------
# integer domains


def _ceil(x):
    if isinstance(x, float):
        r = round(x)
        if abs(x - r) <= EPS:
            return int(r)
    return math.ceil(x)


def _floor(x):
    if isinstance(x, float):
        r = round(x)
        if abs(x - r) <= EPS:
            return int(r)
    return math.floor(x)


def integerize(f: PwlFunction) -> PwlFunction:
    """Shrink every segment to integer borders without losing an integer.

    Borders are rounded inward and empty segments dropped.  Where two
    segments then touch at an integer with different values, the one with
    the larger value there gives up that point.  A point segment whose value
    a touching neighbour already attains is dropped.
    """
    out: list[Segment] = []
    for s in f.segments:
        lo, hi = _ceil(s.lo), _floor(s.hi)
        if lo > hi:
            continue
        k, d, tag = s.slope, s.intercept, s.tag
        while out and out[-1].hi == lo:
            prev = out[-1]
            vp = prev.slope * lo + prev.intercept
            vs = k * lo + d
            if vp > vs + EPS:
                if prev.lo > lo - 1:
                    out.pop()
                    continue
                out[-1] = prev._replace(hi=lo - 1)
            elif vs > vp + EPS:
                lo += 1
            break
        if lo > hi:
            continue
        out.append(Segment(lo, hi, k, d, tag))
    out = _drop_covered_points(out)
    if len(out) == len(f.segments) and all(a == b for a, b in zip(out, f.segments)):
        return f
    return PwlFunction(out, check=False)


def is_integral_domain(f: PwlFunction) -> bool:
    return all(float(s.lo).is_integer() and float(s.hi).is_integer() for s in f.segments)
