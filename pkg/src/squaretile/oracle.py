"""Brute-force ground truth for small cases.

``optimal_tile_count`` finds the least number of integer squares tiling a
small rectangle by filling the lowest, leftmost empty cell of a skyline with
every square that fits there, largest first.  ``enumerate_spanning_trees``
counts spanning trees by trying every edge subset of the right size.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from itertools import combinations
from math import gcd

from .exactmath import PreconditionError
from .network import ResistorNetwork
from .tiler.geometry import PlacedSquare
from .tiler.greedy import greedy_tile

DEFAULT_BUDGET = 5_000_000


@dataclass(frozen=True)
class SkylineState:
    profile: tuple  # column heights, left to right
    squares_placed: int
    best_known: int


@dataclass
class OracleResult:
    p: int
    q: int
    count: int  # best found
    lower: int  # proven lower bound; equals count when exact
    exact: bool
    witness: list[PlacedSquare] = field(default_factory=list)
    nodes: int = 0


def optimal_tile_count(p: int, q: int, budget: int = DEFAULT_BUDGET) -> OracleResult:
    """Least number of integer squares tiling a p x q rectangle."""
    if p < 1 or q < 1:
        raise PreconditionError("sides must be positive")
    W, H = min(p, q), max(p, q)  # columns across the short side
    greedy = greedy_tile(W, H)
    best = [len(greedy.squares)]
    best_sq = [list(greedy.squares)]
    seen: dict = {}
    nodes = [0]
    exhausted = [False]
    placed: list = []

    def search(profile: list, count: int):
        nodes[0] += 1
        if nodes[0] > budget:
            exhausted[0] = True
            return
        low = min(profile)
        if low == H:
            if count < best[0]:
                best[0] = count
                best_sq[0] = list(placed)
            return
        key = tuple(profile)
        prev = seen.get(key)
        if prev is not None and prev <= count:
            return
        seen[key] = count
        x = profile.index(low)
        run = 1
        while x + run < W and profile[x + run] == low:
            run += 1
        top = min(run, H - low)
        remaining = W * H - sum(profile)
        biggest = min(W, H - low)
        if count + -(-remaining // (biggest * biggest)) >= best[0]:
            return
        for s in range(top, 0, -1):
            for i in range(x, x + s):
                profile[i] += s
            placed.append(PlacedSquare(x, low, s))
            search(profile, count + 1)
            placed.pop()
            for i in range(x, x + s):
                profile[i] -= s
            if exhausted[0]:
                return

    search([0] * W, 0)
    witness = best_sq[0]
    if W != q:  # report in a q-wide, p-tall frame
        witness = [PlacedSquare(s.y, s.x, s.side) for s in witness]
    area_bound = -(-(p * q) // (W * W))
    lower = best[0] if not exhausted[0] else area_bound
    return OracleResult(p, q, best[0], lower, not exhausted[0], witness, nodes[0])


def enumerate_spanning_trees(g: ResistorNetwork, max_edges: int = 20) -> int:
    m = len(g.edges)
    if m > max_edges:
        raise PreconditionError(f"enumeration limited to {max_edges} edges, got {m}")
    idx = g.index
    n = len(g.vertices)
    need = n - 1
    total = 0
    for subset in combinations(range(m), need):
        parent = list(range(n))

        def root(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        ok = True
        for e in subset:
            u, v = g.edges[e]
            ru, rv = root(idx[u]), root(idx[v])
            if ru == rv:
                ok = False
                break
            parent[ru] = rv
        total += ok
    return total


@dataclass(frozen=True)
class TableRow:
    p: int
    q: int
    min_count: int
    exact: bool
    witness: tuple


def optimal_table(max_q: int = 13, budget: int = DEFAULT_BUDGET) -> list[TableRow]:
    rows = []
    for q in range(2, max_q + 1):
        for p in range(1, q):
            if gcd(p, q) != 1:
                continue
            r = optimal_tile_count(p, q, budget)
            rows.append(TableRow(p, q, r.count, r.exact, tuple(r.witness)))
    return rows


CSV_HEADER = ("p", "q", "min_count", "witness_json")


def table_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        wit = json.dumps([[s.x, s.y, s.side] for s in r.witness])
        w.writerow((r.p, r.q, r.min_count if r.exact else f"<={r.min_count}", wit))
    return buf.getvalue()


def table_from_csv(text: str) -> list[TableRow]:
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        raw = rec["min_count"]
        exact = not raw.startswith("<=")
        wit = tuple(PlacedSquare(*v) for v in json.loads(rec["witness_json"]))
        rows.append(TableRow(int(rec["p"]), int(rec["q"]), int(raw.lstrip("<=")), exact, wit))
    return rows


__all__ = [
    "SkylineState",
    "OracleResult",
    "optimal_tile_count",
    "enumerate_spanning_trees",
    "optimal_table",
    "TableRow",
    "table_to_csv",
    "table_from_csv",
]
