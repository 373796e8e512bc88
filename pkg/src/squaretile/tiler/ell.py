"""Shrinking an ell (six-sided region) by a few squares until its four lengths are balanced.

Every move is described in the ell's own canonical frame: the a x b block on
top of the (a+c) x d block, both flush left with the lower-left corner at the
origin.  A move lists the squares it cuts and the region left behind; the
region is matched back to a canonical quadruple by ``fit_placement``, which
fails loudly if the quadruple claimed for a case is not the region actually
left.  That match is what makes the case table self-checking.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .geometry import (
    DIHEDRAL,
    Ell,
    PlacedSquare,
    Placement,
    fit_placement,
    place_all,
    stacked_vertices,
)

MAX_RATIO = 8
ITERATION_CAP = 100_000
RESCUE_DEPTH = 8


class ReductionStalled(RuntimeError):
    """The case loop failed to terminate or found no admissible move."""

    def __init__(self, msg, quad=None, iterations=None):
        super().__init__(msg)
        self.quad = quad
        self.iterations = iterations


@dataclass(frozen=True)
class EllStep:
    case: str
    before: tuple
    after: tuple  # quadruple, or (w, h, 0, 0) when the region became a rectangle
    sides: tuple  # sides of the squares cut, in order


# ---------------------------------------------------------------------------
# moves in the canonical frame
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Move:
    squares: tuple  # PlacedSquare in the canonical frame
    top_w: object
    top_h: object
    bottom_w: object
    bottom_h: object
    quad: Optional[tuple] = None  # the quadruple the case table promises, if any
    lift: object = 0  # height of the region's lower edge above the frame origin

    def region(self):
        pts = stacked_vertices(self.top_w, self.top_h, self.bottom_w, self.bottom_h)
        return frozenset((x, y + self.lift) for x, y in pts) if self.lift else pts

    @property
    def is_rectangle(self):
        return (self.top_w == self.bottom_w or 0 in (self.top_w, self.top_h, self.bottom_w, self.bottom_h))

    def rect(self):
        """(x, y, w, h) of the remaining region when it is a rectangle."""
        if 0 in (self.top_w, self.top_h):
            return 0, self.lift, self.bottom_w, self.bottom_h
        if 0 in (self.bottom_w, self.bottom_h):
            return 0, self.lift + self.bottom_h, self.top_w, self.top_h
        return 0, self.lift, self.bottom_w, self.top_h + self.bottom_h


def _bottom_run(a, b, c, d, k, quad=True) -> _Move:
    """k squares of side d along the bottom block, from its right end."""
    sq = tuple(PlacedSquare(a + c - i * d, 0, d) for i in range(1, k + 1))
    promised = (b, k * d - c, d, a + c - k * d) if quad else None
    return _Move(sq, a, b, a + c - k * d, d, promised)


def _top_and_bottom(a, b, c, d, tops) -> _Move:
    """``tops`` squares of side b on the top block's right end plus one of side d."""
    sq = [PlacedSquare(a - i * b, d, b) for i in range(1, tops + 1)]
    sq.append(PlacedSquare(a + c - d, 0, d))
    quad = (a - tops * b, b, c + tops * b - d, d)
    return _Move(tuple(sq), a - tops * b, b, a + c - d, d, quad)


def _trim_top(a, b, c, d) -> _Move:
    return _Move((PlacedSquare(0, d + b - a, a),), a, b - a, a + c, d, (a, b - a, c, d))


def _trim_step(a, b, c, d) -> _Move:
    return _Move((PlacedSquare(a + c - d, 0, d),), a, b, a + c - d, d, (a, b, c - d, d))


# ---------------------------------------------------------------------------
# applying a move to a placed ell
# ---------------------------------------------------------------------------


def _rect_signal(e: Ell, mv: _Move) -> Ell:
    r = e.placement.rect(*mv.rect())
    return Ell(r.w, r.h, 0, 0, Placement((1, 0, 0, 1), r.x, r.y, 1))


def _region_quad(pts: frozenset):
    """Some canonical quadruple whose ell is congruent to the vertex set ``pts``."""
    for m in DIHEDRAL:
        pl = Placement(m)
        moved = [pl.point(x, y) for x, y in pts]
        mx = min(x for x, _ in moved)
        my = min(y for _, y in moved)
        moved = frozenset((x - mx, y - my) for x, y in moved)
        W = max(x for x, y in moved if y == 0)
        H = max(y for _, y in moved)
        a = max(x for x, y in moved if y == H)
        ds = [y for x, y in moved if x == W and y > 0]
        if not ds or a >= W:
            continue
        d = min(ds)
        quad = (a, H - d, W - a, d)
        if stacked_vertices(a, H - d, W, d) == moved:
            return quad
    raise ValueError(f"not an ell: {sorted(pts)}")


def _apply(e: Ell, mv: _Move):
    """Place the move's squares and return (global squares, remaining region)."""
    squares = place_all(mv.squares, e.placement)
    if mv.is_rectangle:
        return squares, _rect_signal(e, mv)
    quad = mv.quad if mv.quad is not None else _region_quad(mv.region())
    fit = fit_placement(quad, mv.region())
    new = Ell(*quad, fit.then(e.placement))
    if new.area != e.area - sum(s.side * s.side for s in mv.squares):
        raise AssertionError(f"area identity broken going {e.quad} -> {quad}")
    return squares, new


# ---------------------------------------------------------------------------
# normalisation and the case table
# ---------------------------------------------------------------------------


def ell_normalize(e: Ell, log: Optional[list] = None):
    """Trim the top block while b >= 2a and the step while c >= 2d.

    Returns (squares, ell).  If a trim empties a block the returned ell is a
    rectangle signal: ``Ell(w, h, 0, 0)`` placed at the rectangle's corner.
    """
    out: list[PlacedSquare] = []
    while not e.is_rectangle and (e.b >= 2 * e.a or e.c >= 2 * e.d):
        a, b, c, d = e.quad
        mv = _trim_top(a, b, c, d) if b >= 2 * a else _trim_step(a, b, c, d)
        sq, new = _apply(e, mv)
        if log is not None:
            log.append(EllStep("normalize", e.quad, new.quad, tuple(s.side for s in mv.squares)))
        out.extend(sq)
        e = new
    return out, e


def _case_move(a, b, c, d):
    """The case table for an ell whose longest length is a or b.

    Returns (tag, move) or (tag, None) when the case says we are done.
    Cases are tried in the order 1a, 1b, 1c, 2a, 2b, 2c; the first whose
    hypotheses hold wins.
    """
    if a >= b:
        lo = min(b, c, d)
        if d == lo:
            if 3 * d < a:
                return "1a", _bottom_run(a, b, c, d, 3)
            return "1a-done", None
        if c == lo:
            if 3 * c >= a:
                return "1b-done", None
            if d - c >= c:
                return "1b", _bottom_run(a, b, c, d, 1)
            if a + c - 2 * d > c:
                return "1b", _bottom_run(a, b, c, d, 2)
            return "1b-done", None
        if 3 * b >= a:
            return "1c-done", None
        if d - c >= b:
            return "1c", _bottom_run(a, b, c, d, 1)
        if c > d:
            return "1c", _top_and_bottom(a, b, c, d, 1)
        return "1c", _top_and_bottom(a, b, c, d, 2)
    lo = min(a, c, d)
    if a == lo:
        return "2a-done", None
    if c == lo:
        if a <= 2 * d:
            return "2b-done", None
        if d - c >= c:
            return "2b", _bottom_run(a, b, c, d, 1)
        return "2b", _bottom_run(a, b, c, d, 2)
    if a + c - 3 * d >= d:
        return "2c", _bottom_run(a, b, c, d, 3)
    return "2c-done", None


def _corner_moves(a, b, c, d):
    """Single-square moves at the corners of the canonical ell."""
    cands = []
    if a <= b:
        cands.append(_trim_top(a, b, c, d))
    if d <= a + c:
        cands.append(_bottom_run(a, b, c, d, 1, quad=False))
    if b <= a:
        cands.append(_Move((PlacedSquare(a - b, d, b),), a - b, b, a + c, d, None))
    if a + c <= d:
        s = a + c
        cands.append(_Move((PlacedSquare(0, 0, s),), a, b, a + c, d - s, None, s))
    return cands


def _rescue(e: Ell, max_ratio, depth):
    """Shortest run of corner moves (both descriptions) bringing the ratio to ``max_ratio``.

    Squares never go below the current shortest length and that length never
    shrinks, which is everything the area argument needs.  Returns a list of
    (ell, move) to apply in order, or None.
    """
    lo = _min_side(e)

    def expand(cur):
        for view in (cur, cur.swapped()):
            for mv in _corner_moves(*view.quad):
                if min(sq.side for sq in mv.squares) < lo:
                    continue
                _, new = _apply(view, mv)
                if new.is_rectangle or _min_side(new) >= lo:
                    yield view, mv, new

    def dfs(cur, left):
        for view, mv, new in expand(cur):
            if new.is_rectangle or _ratio(new.quad) <= max_ratio:
                return [(view, mv)]
            if left > 1:
                rest = dfs(new, left - 1)
                if rest is not None:
                    return [(view, mv)] + rest
        return None

    for limit in range(1, depth + 1):
        path = dfs(e, limit)
        if path is not None:
            return path
    return None


def _ratio(quad):
    vals = [v for v in quad if v]
    return Fraction(max(vals)) / min(vals)


def _min_side(e: Ell):
    return min(v for v in e.quad if v)


def ell_step(e: Ell, max_ratio=MAX_RATIO):
    """One pass of the reduction loop, after normalising.

    Returns (squares, ell, steps) where ``steps`` lists the moves made, or an
    empty list when nothing was left to do.
    """
    log: list[EllStep] = []
    squares, e = ell_normalize(e, log)
    if e.is_rectangle:
        return squares, e, log
    a, b, c, d = e.quad
    if max(c, d) > max(a, b):
        e = e.swapped()
        a, b, c, d = e.quad
    tag, mv = _case_move(a, b, c, d)
    if mv is None and _ratio(e.quad) > max_ratio:
        # the table's "done" branches assume more than normalisation guarantees
        # (case 2b needs d < 2c); finish with a short search over corner squares
        path = _rescue(e, max_ratio, RESCUE_DEPTH)
        if path is None:
            raise ReductionStalled(f"no admissible move for ell {e.quad}", e.quad)
        for view, mv in path:
            sq, new = _apply(view, mv)
            log.append(EllStep("fallback-" + tag.split("-")[0], view.quad, new.quad,
                               tuple(s.side for s in mv.squares)))
            squares += sq
            e = new
        return squares, e, log
    if mv is None:
        return squares, e, log
    sq, new = _apply(e, mv)
    log.append(EllStep(tag, e.quad, new.quad, tuple(s.side for s in mv.squares)))
    return squares + sq, new, log


def ell_reduce(e: Ell, max_ratio=MAX_RATIO, log: Optional[list] = None, cap: int = ITERATION_CAP):
    """Cut squares off ``e`` until its lengths are within a factor ``max_ratio``.

    Returns (squares, ell); the ell may be a rectangle signal (c == d == 0).
    """
    out: list[PlacedSquare] = []
    for _ in range(cap):
        sq, e, steps = ell_step(e, max_ratio)
        out.extend(sq)
        if log is not None:
            log.extend(steps)
        if e.is_rectangle:
            return out, e
        if not steps:
            if _ratio(e.quad) > max_ratio:
                raise ReductionStalled(f"stopped at ratio {_ratio(e.quad)} for {e.quad}", e.quad)
            return out, e
    raise ReductionStalled(f"no termination after {cap} iterations", e.quad, cap)
