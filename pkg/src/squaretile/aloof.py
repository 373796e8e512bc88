"""Finite-depth machinery for the Cantor sets C_n of n-aloof numbers.

A Farey word whose runs of ``L``/``R`` never exceed ``n`` labels an interval
that contains n-aloof numbers (pad the word with the opposite letter and then
alternate forever).  Everything below works with such words.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .exactmath import (
    FareyInterval,
    PreconditionError,
    approximants,
    as_fraction,
    farey_child,
    farey_word,
    max_run,
)

DEFAULT_COVER_CAP = 2_000_000
DEFAULT_SPLIT_N = 25
DEFAULT_SCAN_BOUND = 10**6
DEFAULT_EPSILON = Fraction(1, 5)


class SearchExhausted(RuntimeError):
    """A certificate search ran out of depth or node budget."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class DepthError(ValueError):
    """The cover is too shallow to resolve the requested scale."""

    def __init__(self, message, required_depth):
        super().__init__(message)
        self.required_depth = required_depth


# ---------------------------------------------------------------------------
# covers
# ---------------------------------------------------------------------------


def windows(n: int) -> list[FareyInterval]:
    """The 2n depth-one intervals (1/(n+1), 1/n), ..., (n, n+1)."""
    return list(_windows(n))


@lru_cache(maxsize=None)
def _windows(n: int) -> tuple[FareyInterval, ...]:
    out = [farey_word("L" * k + "R") for k in range(n, 0, -1)]
    out += [farey_word("R" * k + "L") for k in range(1, n + 1)]
    return tuple(out)


def aloof_children(interval: FareyInterval, n: int) -> list[FareyInterval]:
    """Refine by one partial quotient: extend the open run to length 1..n and close it."""
    word = interval.word
    if not word:
        raise ValueError("the root has no run to extend; start from windows(n)")
    last = word[-1]
    other = "L" if last == "R" else "R"
    out = []
    it = interval
    for j in range(1, n + 1):
        out.append(farey_child(it, other))
        it = farey_child(it, last)
    # ordered by position on the line
    return sorted(out, key=lambda I: I.lower)


def aloof_binary_children(interval: FareyInterval, n: int) -> list[FareyInterval]:
    """The (at most two) Stern-Brocot children whose words keep runs <= n."""
    out = []
    for side in "LR":
        child = farey_child(interval, side)
        if max_run(child.word) <= n:
            out.append(child)
    return out


HULL_DEPTH = 128


def _extreme_descent(interval: FareyInterval, n: int, prefer: str, steps: int):
    """Follow the leftmost (``prefer='L'``) or rightmost admissible path."""
    p1, q1, p2, q2 = interval.p1, interval.q1, interval.p2, interval.q2
    word = interval.word
    last = word[-1] if word else ""
    run = len(word) - len(word.rstrip(last)) if word else 0
    for _ in range(steps):
        side = prefer
        if last == prefer and run >= n:
            side = "R" if prefer == "L" else "L"
        m1, m2 = p1 + p2, q1 + q2
        if side == "L":
            p2, q2 = m1, m2
        else:
            p1, q1 = m1, m2
        run = run + 1 if side == last else 1
        last = side
    return p1, q1, p2, q2


def cantor_hull(interval: FareyInterval, n: int, word_depth: int = HULL_DEPTH):
    """Bracket of ``[inf, sup]`` of C_n inside ``interval``.

    The extreme points are quadratic irrationals; the returned rationals are
    the outer endpoints of the extreme descent stopped at absolute word
    length ``word_depth``, so they contain the true hull.  Stopping at an
    absolute depth makes a parent's bracket agree exactly with those of its
    extreme children.
    """
    steps = max(word_depth - len(interval.word), 16)
    a1, b1, _, _ = _extreme_descent(interval, n, "L", steps)
    _, _, a2, b2 = _extreme_descent(interval, n, "R", steps)
    return Fraction(a1, b1), Fraction(a2, b2)


@dataclass(frozen=True)
class AloofCover:
    n: int
    depth: int
    intervals: tuple[FareyInterval, ...]

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)

    @property
    def hull(self) -> tuple[Fraction, Fraction]:
        comps = self.components()
        return comps[0][0], comps[-1][1]

    def components(self, tight: bool = True) -> list[tuple[Fraction, Fraction]]:
        """Union of the cover pieces, touching pieces merged.

        With ``tight`` each interval is first shrunk to the hull of the
        C_n points it holds, which exposes the gaps between neighbours.
        """
        if tight:
            spans = [cantor_hull(I, self.n) for I in self.intervals]
        else:
            spans = [(I.lower, I.upper) for I in self.intervals]
        out: list[list[Fraction]] = []
        for lo, hi in spans:
            if out and out[-1][1] >= lo:
                out[-1][1] = max(out[-1][1], hi)
            else:
                out.append([lo, hi])
        return [(a, b) for a, b in out]

    def gaps(self) -> list[tuple[Fraction, Fraction]]:
        comps = self.components()
        return [(comps[i][1], comps[i + 1][0]) for i in range(len(comps) - 1)]

    def to_jsonl(self) -> str:
        lines = []
        for I in self.intervals:
            lo, hi = I.endpoints_str()
            lines.append(json.dumps({"word": I.word, "lower": lo, "upper": hi}))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str, n: int, depth: int) -> "AloofCover":
        intervals = []
        for line in text.splitlines():
            if not line.strip():
                continue
            rec = json.loads(line)
            I = farey_word(rec["word"])
            if I.endpoints_str() != (rec["lower"], rec["upper"]):
                raise ValueError(f"endpoints disagree with word {rec['word']!r}")
            intervals.append(I)
        return cls(n, depth, tuple(intervals))


def aloof_cover(n: int, depth: int, cap: int = DEFAULT_COVER_CAP) -> AloofCover:
    """Intervals of all CF prefixes with ``depth`` quotients bounded by n."""
    if n < 1 or depth < 1:
        raise PreconditionError("aloof_cover needs n >= 1 and depth >= 1")
    if 2 * n ** depth > cap:
        raise MemoryError(f"cover would hold {2 * n ** depth} intervals (cap {cap})")
    level = windows(n)
    for _ in range(depth - 1):
        level = [c for I in level for c in aloof_children(I, n)]
    level.sort(key=lambda I: I.lower)
    return AloofCover(n, depth, tuple(level))


# ---------------------------------------------------------------------------
# thickness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GapCheck:
    gap: tuple[Fraction, Fraction]
    left: tuple[Fraction, Fraction]
    right: tuple[Fraction, Fraction]
    passed: bool


@dataclass(frozen=True)
class ThicknessReport:
    K: Fraction
    epsilon: Fraction
    checks: tuple[GapCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def violations(self) -> list[GapCheck]:
        return [c for c in self.checks if not c.passed]


def _level(interval: FareyInterval) -> int:
    """Number of closed runs in the word (windows sit at level 1)."""
    w = interval.word
    return sum(1 for i in range(1, len(w)) if w[i] != w[i - 1])


def _split_plan(hulls, K, epsilon):
    """Binary removal order for the gaps between consecutive sibling hulls.

    Interval DP: a run of siblings i..j is admissible if some gap inside it
    leaves flanks with ratio in [1/K, K], is at most epsilon times the run,
    and both flanks are admissible.  Returns ``(plan, ok)`` where ``plan``
    maps ``(i, j)`` to the chosen split index ``k`` (gap between k and k+1);
    when no admissible order exists the most balanced gap is used and ``ok``
    is False.
    """
    m = len(hulls)
    memo: dict = {}

    def span(i, j):
        return hulls[j][1] - hulls[i][0]

    def candidates(i, j):
        J = span(i, j)
        out = []
        for k in range(i, j):
            a, b = span(i, k), span(k + 1, j)
            g = hulls[k + 1][0] - hulls[k][1]
            good = g <= epsilon * J and a * K >= b and b * K >= a
            out.append((max(a / b, b / a), -g, k, good))
        out.sort()
        return out

    def feasible(i, j):
        if i >= j:
            return True
        if (i, j) in memo:
            return memo[(i, j)] is not None
        memo[(i, j)] = None
        for _, _, k, good in candidates(i, j):
            if good and feasible(i, k) and feasible(k + 1, j):
                memo[(i, j)] = k
                return True
        return False

    ok = feasible(0, m - 1)
    plan = {}

    def fill(i, j):
        if i >= j:
            return
        k = memo.get((i, j))
        if k is None:
            k = candidates(i, j)[0][2]
        plan[(i, j)] = k
        fill(i, k)
        fill(k + 1, j)

    fill(0, m - 1)
    return plan, ok


def thickness_check(cover: AloofCover, K=3, epsilon=DEFAULT_EPSILON) -> ThicknessReport:
    """Check the (K, epsilon) conditions for every gap down to the cover's depth.

    Gaps are removed level by level of the aloof tree; among siblings the
    removal order is found by :func:`_split_plan`.
    """
    K, epsilon = as_fraction(K), as_fraction(epsilon)
    n, depth = cover.n, cover.depth
    checks = []
    stack = [windows(n)]
    while stack:
        nodes = stack.pop()
        hulls = [cantor_hull(I, n) for I in nodes]
        plan, _ = _split_plan(hulls, K, epsilon)
        for (i, j), k in sorted(plan.items()):
            left = (hulls[i][0], hulls[k][1])
            right = (hulls[k + 1][0], hulls[j][1])
            g = (hulls[k][1], hulls[k + 1][0])
            a, b = left[1] - left[0], right[1] - right[0]
            ok = g[1] - g[0] <= epsilon * (right[1] - left[0]) and a * K >= b and b * K >= a
            checks.append(GapCheck(g, left, right, ok))
        if _level(nodes[0]) < depth:
            stack.extend(aloof_children(I, n) for I in reversed(nodes))
    return ThicknessReport(K, epsilon, tuple(checks))


@dataclass(frozen=True)
class Subdivision:
    hull: tuple[Fraction, Fraction]
    pieces: tuple[tuple[Fraction, Fraction], ...]
    gaps: tuple[tuple[Fraction, Fraction], ...]


def subdivide_gaps(hull, cover: AloofCover, N: int, epsilon=DEFAULT_EPSILON, K=3) -> Subdivision:
    """Cut a piece of C_n into subintervals of length in (|C|/5N, |C|/N].

    ``hull`` is a Farey interval with runs <= n (its C_n points form the
    piece ``C``) or ``None`` for all of C_n.  Only whole gaps are removed,
    following the same split plan as :func:`thickness_check`.
    """
    if N < 1:
        raise PreconditionError("N must be >= 1")
    n, depth = cover.n, cover.depth
    epsilon = as_fraction(epsilon)
    roots = windows(n) if hull is None else [hull]
    hulls = [cantor_hull(I, n) for I in roots]
    lo, hi = hulls[0][0], hulls[-1][1]
    size = hi - lo
    limit = size / N

    pieces, removed = [], []
    # frames: (siblings, their hulls, plan, i, j)
    plan, _ = _split_plan(hulls, K, epsilon)
    stack = [(roots, hulls, plan, 0, len(roots) - 1)]
    while stack:
        nodes, hs, pl, i, j = stack.pop()
        piece = (hs[i][0], hs[j][1])
        if piece[1] - piece[0] <= limit:
            pieces.append(piece)
            continue
        if i < j:
            k = pl[(i, j)]
            removed.append((hs[k][1], hs[k + 1][0]))
            stack.append((nodes, hs, pl, k + 1, j))
            stack.append((nodes, hs, pl, i, k))
            continue
        if _level(nodes[i]) >= depth:
            raise DepthError(
                f"piece {piece} longer than |C|/{N} needs a cover deeper than {depth}",
                required_depth=_level(nodes[i]) + 1,
            )
        kids = aloof_children(nodes[i], n)
        kh = [cantor_hull(I, n) for I in kids]
        kp, _ = _split_plan(kh, K, epsilon)
        stack.append((kids, kh, kp, 0, len(kids) - 1))
    pieces.sort()
    removed.sort()
    for a, b in pieces:
        if not (size / (5 * N) < b - a <= limit):
            raise ValueError(f"piece ({a}, {b}) out of range; C is not thick enough here")
    for a, b in removed:
        if not (b - a) < epsilon * size:
            raise ValueError(f"gap ({a}, {b}) larger than epsilon*|C|")
    return Subdivision((lo, hi), tuple(pieces), tuple(removed))


# ---------------------------------------------------------------------------
# Hall decomposition x = x1 + x2
# ---------------------------------------------------------------------------


def _between_sqrt2_bounds(x: Fraction) -> bool:
    """sqrt(2)-1 <= x <= 4+4*sqrt(2), decided exactly."""
    y = x + 1  # y >= sqrt 2
    if y < 0 or y * y < 2:
        return False
    z = (x - 4) / 4  # z <= sqrt 2
    return z <= 0 or z * z <= 2


@dataclass(frozen=True)
class HallSplit:
    x: Fraction
    k1: Optional[int]
    k2: Optional[int]
    word1: str
    word2: str
    p: Optional[int]
    interval1: FareyInterval = field(compare=False)
    interval2: FareyInterval = field(compare=False)
    widths: tuple = field(default=(), compare=False, repr=False)


def _target_bracket(x):
    if isinstance(x, (int, Fraction, str)):
        v = as_fraction(x)
        return v, v
    qs = list(x)
    if len(qs) < 2:
        v = approximants(qs)[-1]
        return v, v
    a, b = approximants(qs)[-2:]
    return min(a, b), max(a, b)


def hall_decompose(x, n: int = 4, resolution=Fraction(1, 100), p: Optional[int] = None,
                   max_nodes: int = 200_000) -> HallSplit:
    """Certify ``x = x1 + x2`` with both summands n-aloof, to the given resolution.

    ``x`` is a rational or a finite list of partial quotients (read as a
    bracket between its last two convergents).  The search refines the wider
    of two Farey intervals, keeping only children with runs <= n whose sum
    still reaches ``x``, and backtracks on dead ends.  With ``p`` given, the
    integer split ``k1 + k2 = x*p`` is attached.
    """
    if n < 4:
        raise PreconditionError("hall_decompose needs n >= 4")
    lo_x, hi_x = _target_bracket(x)
    if not (_between_sqrt2_bounds(lo_x) and _between_sqrt2_bounds(hi_x)):
        # for streams only the bracket can be checked; tolerate straddling
        if isinstance(x, (int, Fraction, str)) or not (
            _between_sqrt2_bounds(lo_x) or _between_sqrt2_bounds(hi_x)
        ):
            raise PreconditionError(f"x = {lo_x} outside [sqrt2-1, 4+4sqrt2]")
    resolution = as_fraction(resolution)
    if p is None and resolution.numerator == 1:
        p = resolution.denominator

    def reach(I1, I2):
        # length of {x1 in I1 : x - x1 in I2} over the bracket, or None if empty
        lo = max(I1.lower, lo_x - I2.upper)
        hi = min(I1.upper, hi_x - I2.lower)
        return None if lo > hi else hi - lo

    starts = [(reach(a, b), a, b) for a in windows(n) for b in windows(n)]
    starts = [(a, b) for r, a, b in sorted((s for s in starts if s[0] is not None),
                                           key=lambda s: -s[0])]

    nodes = 0
    widths = []
    # iterative DFS; each frame holds the remaining alternatives at that level
    stack = [list(reversed(starts))]
    path = []
    while stack:
        frame = stack[-1]
        if not frame:
            stack.pop()
            if path:
                path.pop()
            continue
        I1, I2 = frame.pop()
        nodes += 1
        if nodes > max_nodes:
            raise SearchExhausted(
                f"hall_decompose exhausted {max_nodes} nodes",
                {"deepest": path[-1] if path else None},
            )
        path.append((I1, I2))
        if I1.length < resolution and I2.length < resolution:
            break
        if I1.length >= I2.length:
            kids = [(c, I2) for c in aloof_binary_children(I1, n)]
        else:
            kids = [(I1, c) for c in aloof_binary_children(I2, n)]
        scored = [(reach(*k), k) for k in kids]
        scored = [rk for rk in scored if rk[0] is not None]
        scored.sort(key=lambda rk: rk[0])  # popped from the end: largest first
        stack.append([k for _, k in scored])
    else:
        raise SearchExhausted("hall_decompose found no certificate", {"x": (lo_x, hi_x)})

    I1, I2 = path[-1]
    widths = tuple(max(a.length, b.length) for a, b in path)
    k1 = k2 = None
    if p is not None:
        mid = (I1.lower + I1.upper) / 2
        k1 = round(mid * p)
        total = lo_x * p if lo_x == hi_x else None
        if total is not None and total.denominator == 1:
            k2 = int(total) - k1
        else:
            k2 = round((I2.lower + I2.upper) / 2 * p)
    return HallSplit(lo_x if lo_x == hi_x else (lo_x + hi_x) / 2, k1, k2,
                     I1.word, I2.word, p, I1, I2, widths)


# ---------------------------------------------------------------------------
# near-aloof certificates and the ell split parameter
# ---------------------------------------------------------------------------


def certify_near(r, delta, n: int, max_nodes: int = 50_000) -> Optional[FareyInterval]:
    """A Farey interval with runs <= n lying inside [r - delta, r + delta], or None.

    Any such interval contains an n-aloof number, so ``r`` is within ``delta``
    of C_n.
    """
    r, delta = as_fraction(r), as_fraction(delta)
    lo, hi = r - delta, r + delta
    stack = [w for w in windows(n) if w.upper >= lo and w.lower <= hi]
    stack.sort(key=lambda I: (not I.contains(r, closed=True), I.lower), reverse=True)
    nodes = 0
    while stack:
        I = stack.pop()
        nodes += 1
        if nodes > max_nodes:
            return None
        if lo <= I.lower and I.upper <= hi:
            return I
        kids = [c for c in aloof_binary_children(I, n) if c.upper >= lo and c.lower <= hi]
        kids.sort(key=lambda c: not c.contains(r, closed=True), reverse=True)
        stack.extend(kids)
    return None


@dataclass(frozen=True)
class EllSplit:
    t: int
    ratios: tuple[Fraction, Fraction, Fraction]
    certificates: tuple[FareyInterval, FareyInterval, FareyInterval]
    method: str


def split_ratios(a, b, c, d, t):
    return Fraction(t, b + d), Fraction(a - t, b), Fraction(a + c - t, d)


def _certify_t(a, b, c, d, t, n):
    rs = split_ratios(a, b, c, d, t)
    tols = (Fraction(1, b + d), Fraction(1, b), Fraction(1, d))
    certs = []
    for r, tol in zip(rs, tols):
        J = certify_near(r, tol, n)
        if J is None:
            return None
        certs.append(J)
    return rs, tuple(certs)


def _ratio_bounded(vals, M) -> bool:
    return max(vals) <= M * min(vals)


def ell_split_t(a: int, b: int, c: int, d: int, n: int = DEFAULT_SPLIT_N,
                scan_bound: int = DEFAULT_SCAN_BOUND, max_ratio=8,
                max_nodes: int = 200_000) -> EllSplit:
    """Integer t in [0, a] making all three split rectangles near-aloof.

    Scans integers outward from a/2 when ``a <= scan_bound``; otherwise
    refines three aloof intervals simultaneously along the segment of
    admissible t.
    """
    vals = (a, b, c, d)
    if min(vals) <= 0:
        raise PreconditionError("ell sides must be positive")
    if max_ratio is not None and not _ratio_bounded(vals, max_ratio):
        raise PreconditionError(f"ell side ratios exceed {max_ratio}: {vals}")
    if a <= scan_bound:
        order = sorted(range(a + 1), key=lambda t: (abs(2 * t - a), t))
        for t in order:
            got = _certify_t(a, b, c, d, t, n)
            if got is not None:
                return EllSplit(t, got[0], got[1], "scan")
        raise SearchExhausted(f"no integer t certifies ell {vals}", {"candidates": []})
    return _ell_split_refine(a, b, c, d, n, max_nodes)


def _ell_split_refine(a, b, c, d, n, max_nodes):
    A = Fraction(a)

    def t_range(J1, J2, J3):
        # t/(b+d) in J1, (a-t)/b in J2, (a+c-t)/d in J3, t in [0, a]
        lo, hi = Fraction(0), A
        lo = max(lo, J1.lower * (b + d))
        hi = min(hi, J1.upper * (b + d))
        lo = max(lo, a - J2.upper * b)
        hi = min(hi, a - J2.lower * b)
        lo = max(lo, a + c - J3.upper * d)
        hi = min(hi, a + c - J3.lower * d)
        return (lo, hi) if lo <= hi else None

    def spans(J1, J2, J3):
        return (J1.length * (b + d), J2.length * b, J3.length * d)

    ws = windows(n)
    starts = []
    for J1 in ws:
        for J2 in ws:
            for J3 in ws:
                if t_range(J1, J2, J3) is not None:
                    starts.append((J1, J2, J3))
    stack = list(starts)
    nodes, deepest = 0, []
    while stack:
        triple = stack.pop()
        nodes += 1
        if nodes > max_nodes:
            break
        rng = t_range(*triple)
        sp = spans(*triple)
        if max(sp) < Fraction(1, 2):
            t = round((rng[0] + rng[1]) / 2)
            got = _certify_t(a, b, c, d, t, n)
            if got is not None:
                return EllSplit(t, got[0], got[1], "refine")
            deepest.append(triple)
            continue
        i = max(range(3), key=lambda k: sp[k])
        for child in aloof_binary_children(triple[i], n):
            nt = list(triple)
            nt[i] = child
            nt = tuple(nt)
            if t_range(*nt) is not None:
                stack.append(nt)
    raise SearchExhausted(
        f"ell split search failed for {(a, b, c, d)}",
        {"candidates": [tuple(J.word for J in tr) for tr in deepest[-10:]]},
    )
