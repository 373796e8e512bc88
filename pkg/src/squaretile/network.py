"""Square tilings as unit-resistor networks, and back.

Vertices of the network are the maximal horizontal segments of a tiling,
edges are its squares (from the segment on a square's top to the one on its
bottom).  Poles: ``a`` is the top side of the rectangle, ``b`` the bottom.
With potential equal to height, every square's current is its side, so the
effective resistance between the poles is height / width.

Everything here is exact: potentials come from rational Gaussian
elimination, spanning-tree counts from an integer (Bareiss) determinant.
"""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Optional

from .exactmath import PreconditionError, as_fraction
from .tiler.geometry import PlacedSquare, Tiling
from .tiler.validate import validate_tiling


class NetworkError(ValueError):
    pass


@dataclass
class ResistorNetwork:
    """Multigraph with unit resistors; edges are (upper, lower) vertex pairs.

    ``rotation`` (optional) lists, for each vertex, its edge indices in
    clockwise order starting from the left end of the vertex's segment:
    edges above the segment left to right, then edges below it right to left.
    """

    vertices: list
    edges: list[tuple]
    a: object
    b: object
    rotation: Optional[dict] = None
    segments: Optional[dict] = field(default=None, compare=False)  # vertex -> (y, x0, x1)

    def __post_init__(self):
        if self.a == self.b:
            raise NetworkError("poles must differ")
        known = set(self.vertices)
        for u, v in self.edges:
            if u not in known or v not in known:
                raise NetworkError(f"edge ({u}, {v}) uses an unknown vertex")

    @property
    def index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    def is_connected(self) -> bool:
        adj = defaultdict(set)
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        seen, todo = {self.vertices[0]}, [self.vertices[0]]
        while todo:
            for w in adj[todo.pop()]:
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return len(seen) == len(self.vertices)

    def to_json(self) -> str:
        body = {
            "vertices": list(self.vertices),
            "edges": [list(e) for e in self.edges],
            "a": self.a,
            "b": self.b,
            "rotation": {str(k): list(v) for k, v in (self.rotation or {}).items()},
        }
        return json.dumps(body, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ResistorNetwork":
        body = json.loads(text)
        verts = body["vertices"]
        by_name = {str(v): v for v in verts}
        rot = {by_name[k]: list(v) for k, v in body.get("rotation", {}).items()} or None
        return cls(verts, [tuple(e) for e in body["edges"]], body["a"], body["b"], rot)


@dataclass
class HarmonicSolution:
    potentials: dict
    currents: list[Fraction]  # per edge, flowing from edge[0] to edge[1]
    net_current: Fraction


# ---------------------------------------------------------------------------
# tiling -> network
# ---------------------------------------------------------------------------


def _merge(intervals):
    """Merge closed intervals that overlap or touch."""
    out = []
    for lo, hi in sorted(intervals):
        if out and lo <= out[-1][1]:
            if hi > out[-1][1]:
                out[-1][1] = hi
        else:
            out.append([lo, hi])
    return out


def tiling_to_network(t: Tiling) -> ResistorNetwork:
    report = validate_tiling(t)
    if not report.complete:
        raise PreconditionError(f"tiling must be complete and valid: {report.first or 'residual present'}")
    by_y = defaultdict(list)
    for s in t.squares:
        by_y[s.y].append((s.x, s.x + s.side))
        by_y[s.y + s.side].append((s.x, s.x + s.side))
    segments = {}  # y -> list of [x0, x1]
    for y, ivs in by_y.items():
        segments[y] = _merge(ivs)

    ys = sorted(segments, reverse=True)
    vid = {}
    seg_info = {}
    for y in ys:
        for x0, x1 in segments[y]:
            vid[(y, x0)] = len(vid)
            seg_info[vid[(y, x0)]] = (y, x0, x1)

    def find(y, x):
        for x0, x1 in segments[y]:
            if x0 <= x < x1:
                return vid[(y, x0)]
        raise AssertionError(f"no segment at y={y} covering x={x}")

    edges = []
    ups = defaultdict(list)  # vertex -> (x, edge) of squares sitting on it
    downs = defaultdict(list)  # vertex -> (x, edge) of squares hanging below it
    for s in t.squares:
        top, bottom = find(s.y + s.side, s.x), find(s.y, s.x)
        e = len(edges)
        edges.append((top, bottom))
        downs[top].append((s.x, e))
        ups[bottom].append((s.x, e))
    rotation = {}
    for v in seg_info:
        above = [e for _, e in sorted(ups[v])]
        below = [e for _, e in sorted(downs[v], reverse=True)]
        rotation[v] = above + below
    a, b = find(t.height, 0), find(0, 0)
    return ResistorNetwork(list(range(len(vid))), edges, a, b, rotation, seg_info)


# ---------------------------------------------------------------------------
# exact linear algebra
# ---------------------------------------------------------------------------


def _eliminate(matrix, rhs=None):
    """Sparse Gaussian elimination over the rationals.

    Returns ``(det, x)`` with ``x`` the solution of ``matrix @ x = rhs`` (None
    when no right-hand side is given or the matrix is singular). Rows are kept
    as dicts and the sparsest candidate row is pivoted on, so the near-path
    graphs produced by tilings stay cheap even with hundreds of vertices.
    """
    n = len(matrix)
    rows = [{c: Fraction(v) for c, v in enumerate(r) if v} for r in matrix]
    b = None if rhs is None else [Fraction(v) for v in rhs]
    active = set(range(n))
    order = []
    det = Fraction(1)
    for col in range(n):
        cands = [r for r in active if col in rows[r]]
        if not cands:
            return Fraction(0), None
        piv = min(cands, key=lambda r: (len(rows[r]), r))
        active.discard(piv)
        order.append(piv)
        prow = rows[piv]
        pv = prow[col]
        det *= pv
        for r in cands:
            if r == piv:
                continue
            row = rows[r]
            f = row[col] / pv
            for c, v in prow.items():
                nv = row.get(c, 0) - f * v
                if nv:
                    row[c] = nv
                else:
                    row.pop(c, None)
            if b is not None:
                b[r] -= f * b[piv]
    seen, cycles = [False] * n, 0
    for i in range(n):
        if not seen[i]:
            cycles += 1
            j = i
            while not seen[j]:
                seen[j] = True
                j = order[j]
    if (n - cycles) % 2:
        det = -det
    if b is None:
        return det, None
    x = [Fraction(0)] * n
    for col in range(n - 1, -1, -1):
        r = order[col]
        row = rows[r]
        x[col] = (b[r] - sum(v * x[c] for c, v in row.items() if c != col)) / row[col]
    return det, x


def _solve(matrix, rhs):
    det, x = _eliminate(matrix, rhs)
    if not det:
        raise NetworkError("singular system (is the network connected?)")
    return x


def bareiss_det(matrix) -> int:
    """Determinant of an integer matrix by fraction-free elimination."""
    m = [list(map(int, row)) for row in matrix]
    n = len(m)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if m[r][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _laplacian(vertices, edges):
    idx = {v: i for i, v in enumerate(vertices)}
    n = len(vertices)
    L = [[0] * n for _ in range(n)]
    for u, v in edges:
        i, j = idx[u], idx[v]
        if i == j:
            continue
        L[i][i] += 1
        L[j][j] += 1
        L[i][j] -= 1
        L[j][i] -= 1
    return L


# ---------------------------------------------------------------------------
# Kirchhoff, resistance, spanning trees
# ---------------------------------------------------------------------------


def solve_kirchhoff(g: ResistorNetwork, pa=1, pb=0) -> HarmonicSolution:
    pa, pb = as_fraction(pa), as_fraction(pb)
    if pa == pb:
        raise PreconditionError("pole potentials must differ")
    if not g.is_connected():
        raise NetworkError("network is disconnected")
    inner = [v for v in g.vertices if v not in (g.a, g.b)]
    pos = {v: i for i, v in enumerate(inner)}
    fixed = {g.a: pa, g.b: pb}
    n = len(inner)
    A = [[0] * n for _ in range(n)]
    rhs = [Fraction(0)] * n
    for u, v in g.edges:
        if u == v:
            continue
        for x, y in ((u, v), (v, u)):
            if x in pos:
                A[pos[x]][pos[x]] += 1
                if y in pos:
                    A[pos[x]][pos[y]] -= 1
                else:
                    rhs[pos[x]] += fixed[y]
    sol = _solve(A, rhs) if n else []
    pot = dict(fixed)
    pot.update({v: sol[i] for i, v in enumerate(inner)})
    currents = [pot[u] - pot[v] for u, v in g.edges]
    # residual check: net flow zero at every internal vertex
    flow = defaultdict(Fraction)
    for (u, v), c in zip(g.edges, currents):
        flow[u] -= c
        flow[v] += c
    if any(flow[v] != 0 for v in inner):
        raise AssertionError("Kirchhoff residual is not zero")
    net = -flow[g.a] if pa > pb else flow[g.a]
    return HarmonicSolution(pot, currents, abs(net))


def effective_resistance(g: ResistorNetwork) -> Fraction:
    r1 = Fraction(1) / solve_kirchhoff(g, 1, 0).net_current
    s2 = solve_kirchhoff(g, 5, 2)
    r2 = Fraction(3) / s2.net_current
    if r1 != r2:
        raise AssertionError(f"resistance depends on the boundary values: {r1} vs {r2}")
    return r1


def spanning_tree_count(g: ResistorNetwork, glue_poles: bool = False) -> int:
    """Spanning trees of g, or of g with its poles identified (self-loops dropped)."""
    if glue_poles:
        merged = [v for v in g.vertices if v != g.b]
        edges = [(g.a if u == g.b else u, g.a if v == g.b else v) for u, v in g.edges]
        edges = [(u, v) for u, v in edges if u != v]
        L = _laplacian(merged, edges)
        drop = merged.index(g.a)
    else:
        L = _laplacian(g.vertices, g.edges)
        drop = g.vertices.index(g.b)
    minor = [row[:drop] + row[drop + 1:] for i, row in enumerate(L) if i != drop]
    det, _ = _eliminate(minor)
    if det.denominator != 1:
        raise AssertionError("determinant of an integer matrix came out fractional")
    return int(det)


@dataclass
class BoundReport:
    passed: bool
    count: int
    ratio_margin: Fraction  # count - q/p
    log_margin: int  # 2^count - q

    def __bool__(self):
        return self.passed


def lower_bound_check(p: int, q: int, count: int) -> BoundReport:
    """Pass iff count >= q/p and 2^count >= q, in integer arithmetic."""
    if gcd(p, q) != 1:
        raise PreconditionError("p and q must be coprime")
    ratio_ok = count * p >= q
    log_ok = (1 << count) >= q if count >= 0 else False
    return BoundReport(ratio_ok and log_ok, count, Fraction(count) - Fraction(q, p), (1 << max(count, 0)) - q)


# ---------------------------------------------------------------------------
# network -> tiling
# ---------------------------------------------------------------------------


def _genus_zero(g: ResistorNetwork) -> bool:
    """Face tracing over the rotation system; planar iff V - E + F == 2."""
    rot = g.rotation
    E = len(g.edges)
    if E == 0:
        return True
    # dart (e, end): end 0 leaves edge[0], end 1 leaves edge[1]
    nxt = {}
    for v, order in rot.items():
        darts = []
        for e in order:
            u, w = g.edges[e]
            if u == w:
                raise NetworkError("self-loops are not allowed")
            darts.append((e, 0 if u == v else 1))
        for i, d in enumerate(darts):
            nxt[d] = darts[(i + 1) % len(darts)]
    if len(nxt) != 2 * E:
        raise NetworkError("rotation system does not list every edge at both ends")
    seen = set()
    faces = 0
    for start in nxt:
        if start in seen:
            continue
        faces += 1
        d = start
        while d not in seen:
            seen.add(d)
            e, end = d
            d = nxt[(e, 1 - end)]
    return len(g.vertices) - E + faces == 2


def network_to_tiling(g: ResistorNetwork, normalize: bool = True) -> Tiling:
    """Squares from currents, heights from potentials, left-right order from the rotation."""
    if g.rotation is None:
        raise PreconditionError("a rotation system is required")
    if not _genus_zero(g):
        raise NetworkError("rotation system is not a planar embedding")
    sol = solve_kirchhoff(g, 1, 0)
    pot = sol.potentials
    down = defaultdict(list)  # vertex -> outgoing edges, left to right
    for v in g.vertices:
        order = g.rotation.get(v, [])
        lower = [e for e in order if _upper(g, e, pot) == v]
        down[v] = list(reversed(lower))
    for e, c in enumerate(sol.currents):
        if c == 0:
            raise NetworkError(f"edge {e} carries no current (degenerate square)")

    start = {g.a: Fraction(0)}
    placed = {}
    for v in sorted(g.vertices, key=lambda v: -pot[v]):
        if v not in start:
            raise NetworkError(f"vertex {v} is not reached from above")
        x = start[v]
        for e in down[v]:
            side = abs(sol.currents[e])
            lower = g.edges[e][1] if g.edges[e][0] == v else g.edges[e][0]
            placed[e] = PlacedSquare(x, pot[lower], side)
            if lower not in start or x < start[lower]:
                start[lower] = x
            x += side
    width = sol.net_current
    height = Fraction(1)
    squares = [placed[e] for e in range(len(g.edges))]
    if normalize:
        squares, width, height = _to_integers(squares, width, height)
    t = Tiling(width, height, squares)
    rep = validate_tiling(t)
    if not rep.complete:
        raise NetworkError(f"embedding does not give a tiling: {rep.first}")
    return t


def _upper(g, e, pot):
    u, v = g.edges[e]
    return u if pot[u] > pot[v] else v


def _to_integers(squares, width, height):
    """Scale so every coordinate is an integer with no common factor."""
    nums = [width, height] + [c for s in squares for c in (s.x, s.y, s.side)]
    den = lcm(*(Fraction(c).denominator for c in nums))
    ints = [int(Fraction(c) * den) for c in nums]
    g = 0
    for v in ints:
        g = gcd(g, v)
    f = Fraction(den, g or 1)

    def sc(c):
        v = Fraction(c) * f
        return int(v) if v.denominator == 1 else v

    return [PlacedSquare(sc(s.x), sc(s.y), sc(s.side)) for s in squares], sc(width), sc(height)
