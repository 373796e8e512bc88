"""Logarithmic-count tilings of integer rectangles.

The refined construction works on two kinds of regions:

* a rectangle is stripped to aspect ratio below 2, split by a vertical line
  into two panels whose aspect ratios are within 1/p of 4-aloof numbers, and
  each panel is tiled greedily while its Farey path agrees with the aloof
  number's.  The two leftover rectangles sit side by side and form an ell.
* an ell is shrunk by the ell reduction until its lengths are balanced, then
  cut at an integer t into three rectangles with near-aloof aspect ratios.
  Two of them are greedily tiled into a new ell, the third goes back to the
  rectangle step.

So each ell spawns an ell and a rectangle, and each rectangle spawns an ell.
The baseline strategy skips ells altogether and resplits both panel leftovers
as rectangles.

Regions are solved once per shape (memoised) in a local frame and then
placed.  With ``hybrid`` on, every region keeps whichever is cheaper of the
construction and a plain alternative (greedy for rectangles, a straight cut
into two rectangles for ells).
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Optional

from ..aloof import SearchExhausted, ell_split_t, hall_decompose
from ..exactmath import PreconditionError, greedy_cost
from .ell import ReductionStalled, ell_reduce
from .geometry import Ell, PlacedSquare, Placement, Rect, Tiling, translate
from .greedy import greedy_squares, greedy_walk

MIRROR_X = (-1, 0, 0, 1)
MIRROR_Y = (1, 0, 0, -1)
HALF_TURN = (-1, 0, 0, -1)
TRANSPOSE = (0, 1, 1, 0)


class ConstructionError(RuntimeError):
    """A construction step failed; ``trace`` holds the events up to the failure."""

    def __init__(self, msg, trace=None):
        super().__init__(msg)
        self.trace = trace


@dataclass(frozen=True)
class KenyonConfig:
    strategy: str = "refined"  # "refined" | "baseline"
    base: int = 8  # regions whose longer side is at most this are tiled directly
    hall_n: int = 4
    split_n: int = 25
    scale_factor: int = 4  # panel leftovers are matched in size within this factor
    hybrid: bool = True


@dataclass(frozen=True)
class TraceEvent:
    stage: int
    kind: str  # "rect" | "ell"
    shape: tuple
    action: str
    squares: int  # squares placed directly by this region's own step


@dataclass
class ConstructionTrace:
    events: list[TraceEvent] = field(default_factory=list)

    def stages(self) -> int:
        return 1 + max((e.stage for e in self.events), default=-1)

    def expanded(self) -> list[tuple[int, int]]:
        """(ells, rectangles) that went through the construction, per stage."""
        out = [[0, 0] for _ in range(self.stages())]
        for e in self.events:
            if e.action == "construct":
                out[e.stage][0 if e.kind == "ell" else 1] += 1
        return [tuple(x) for x in out]

    def counters(self) -> list[tuple[int, int]]:
        """Nominal (f_n, g_n): ells and single rectangles spawned into stage n.

        Stage 0 holds the input rectangle.  An expanded ell spawns one ell and
        one rectangle, an expanded rectangle spawns one ell (refined strategy).
        """
        exp = self.expanded()
        if not self.events:
            return []
        first = self.events[0]
        f = [(1, 0) if first.kind == "ell" else (0, 1)]
        for ells, rects in exp[:-1]:
            f.append((ells + rects, ells))
        return f

    def arrivals(self) -> list[tuple[int, int]]:
        """Regions actually handled at each stage, as (ells, rectangles)."""
        out = [[0, 0] for _ in range(self.stages())]
        for e in self.events:
            out[e.stage][0 if e.kind == "ell" else 1] += 1
        return [tuple(x) for x in out]

    def action_counts(self) -> Counter:
        return Counter(e.action for e in self.events)


@dataclass(frozen=True)
class _Piece:
    """Solved region: squares as (x, y, side) in the region's frame, and its events."""

    squares: tuple
    events: tuple  # (relative stage, kind, shape, action, squares)

    @property
    def count(self):
        return len(self.squares)


def _mapped(piece: _Piece, pl: Placement):
    for x, y, s in piece.squares:
        r = pl.rect(x, y, s, s)
        yield (r.x, r.y, r.w)


def _shifted(piece: _Piece, by: int):
    return tuple((st + by, *rest) for st, *rest in piece.events)


def _common_walk(w, h, word: str, anchor: str):
    """Greedy checkpoints on a w x h panel while its Farey letters follow ``word``.

    Returns a list of (squares so far, residual rect); entry j is the state
    after j squares.  The panel sits at the origin of its own frame.
    """
    states = [((), Rect(0, 0, w, h))]
    placed = []
    for j, (sq, res) in enumerate(greedy_walk(Rect(0, 0, w, h), anchor)):
        if j >= len(word) or res is None:
            break
        cur = states[-1][1]
        letter = "R" if cur.w > cur.h else "L"
        if letter != word[j]:
            break
        placed.append(sq)
        states.append((tuple(placed), res))
    return states


def _aspect_ok(r: Rect) -> bool:
    return max(r.w, r.h) < 2 * min(r.w, r.h)


def _settle(states):
    """Last checkpoint with aspect ratio below 2 (the full panel if none)."""
    for j in range(len(states) - 1, -1, -1):
        if _aspect_ok(states[j][1]):
            return j
    return len(states) - 1


def _match_scales(s1, j1, s2, j2, factor):
    """Back up the smaller leftover until the two agree in size within ``factor``."""
    def size(states, j):
        r = states[j][1]
        return max(r.w, r.h)

    for _ in range(len(s1) + len(s2)):
        m1, m2 = size(s1, j1), size(s2, j2)
        if m1 > factor * m2 and j2 > 0:
            j2 = _back_one(s2, j2)
        elif m2 > factor * m1 and j1 > 0:
            j1 = _back_one(s1, j1)
        else:
            break
    return j1, j2


def _back_one(states, j):
    for k in range(j - 1, -1, -1):
        if _aspect_ok(states[k][1]):
            return k
    return j - 1


class KenyonTiler:
    def __init__(self, config: KenyonConfig = KenyonConfig()):
        self.config = config
        self._rects: dict = {}
        self._ells: dict = {}

    # -- rectangles -------------------------------------------------------

    def rect(self, w: int, h: int) -> _Piece:
        """Tiling of [0,w] x [0,h] (any orientation)."""
        if w >= h:
            return self._rect_wide(h, w)
        wide = self._rect_wide(w, h)
        pl = Placement(TRANSPOSE)
        return _Piece(tuple(_mapped(wide, pl)), wide.events)

    def _rect_wide(self, p: int, q: int) -> _Piece:
        """Tiling of a q-wide, p-tall rectangle, p <= q."""
        key = (p, q)
        hit = self._rects.get(key)
        if hit is not None:
            return hit
        piece = self._rect_solve(p, q)
        self._rects[key] = piece
        return piece

    def _greedy_piece(self, p, q, action):
        sq = tuple((s.x, s.y, s.side) for s in greedy_squares(Rect(0, 0, q, p)))
        return _Piece(sq, ((0, "rect", (p, q), action, len(sq)),))

    def _rect_solve(self, p, q) -> _Piece:
        cfg = self.config
        g = gcd(p, q)
        if g > 1:
            inner = self._rect_wide(p // g, q // g)
            pl = Placement((1, 0, 0, 1), 0, 0, g)
            return _Piece(tuple(_mapped(inner, pl)), inner.events)
        if p == q:
            return _Piece(((0, 0, p),), ((0, "rect", (p, q), "square", 1),))
        if q <= cfg.base or p <= 2:
            return self._greedy_piece(p, q, "base")
        try:
            built = self._rect_construct(p, q)
        except (ConstructionError, SearchExhausted, ReductionStalled, PreconditionError) as exc:
            if not cfg.hybrid:
                raise ConstructionError(f"rectangle {q}x{p}: {exc}") from exc
            return self._greedy_piece(p, q, "greedy-after-failure")
        if cfg.hybrid and greedy_cost(p, q) <= built.count:
            return self._greedy_piece(p, q, "greedy")
        return built

    def _rect_construct(self, p, q) -> _Piece:
        cfg = self.config
        strip = q // p - 1
        squares = [(i * p, 0, p) for i in range(strip)]
        x0 = strip * p
        qq = q - x0
        split = hall_decompose(Fraction(qq, p), n=cfg.hall_n, resolution=Fraction(1, p), p=p)
        k1, k2 = split.k1, qq - split.k1
        if not (0 < k1 < qq):
            raise ConstructionError(f"hall split of {qq}/{p} gave k1={k1}")
        if cfg.strategy == "baseline":
            return self._baseline_panels(p, q, squares, x0, k1, k2, split)

        # residual of panel 1 hugs the dividing line from the left, panel 2 from the right
        s1 = _common_walk(k1, p, split.word1, "rb")
        s2 = _common_walk(k2, p, split.word2, "lb")
        j1, j2 = _match_scales(s1, _settle(s1), s2, _settle(s2), cfg.scale_factor)
        if strip == 0 and j1 == 0 and j2 == 0:
            j1 = min(1, len(s1) - 1)
            j2 = min(1, len(s2) - 1) if j1 == 0 else 0
            if j1 == 0 and j2 == 0:
                raise ConstructionError(f"no progress on rectangle {q}x{p}")
        xd = x0 + k1
        placed1, r1 = s1[j1]
        placed2, r2 = s2[j2]
        squares += [(x0 + s.x, s.y, s.side) for s in placed1]
        squares += [(xd + s.x, s.y, s.side) for s in placed2]
        w1, h1, w2, h2 = r1.w, r1.h, r2.w, r2.h
        own = len(squares)
        if h1 == h2:
            child = self.rect(w1 + w2, h1)
            pl = translate(xd - w1, 0)
        elif h1 > h2:
            child = self.ell(w1, h1 - h2, w2, h2)
            pl = translate(xd - w1, 0)
        else:
            child = self.ell(w2, h2 - h1, w1, h1)
            pl = Placement(MIRROR_X, xd + w2, 0, 1)
        squares += list(_mapped(child, pl))
        events = ((0, "rect", (p, q), "construct", own),) + _shifted(child, 1)
        return _Piece(tuple(squares), events)

    def _baseline_panels(self, p, q, squares, x0, k1, k2, split):
        # both leftovers are resplit as rectangles; untouched panels still shrink
        s1 = _common_walk(k1, p, split.word1, "rb")
        s2 = _common_walk(k2, p, split.word2, "lb")
        j1, j2 = _settle(s1), _settle(s2)
        xd = x0 + k1
        placed1, r1 = s1[j1]
        placed2, r2 = s2[j2]
        squares = list(squares)
        squares += [(x0 + s.x, s.y, s.side) for s in placed1]
        squares += [(xd + s.x, s.y, s.side) for s in placed2]
        own = len(squares)
        c1 = self.rect(r1.w, r1.h)
        c2 = self.rect(r2.w, r2.h)
        squares += list(_mapped(c1, translate(x0 + r1.x, r1.y)))
        squares += list(_mapped(c2, translate(xd + r2.x, r2.y)))
        events = ((0, "rect", (p, q), "construct", own),) + _shifted(c1, 1) + _shifted(c2, 1)
        return _Piece(tuple(squares), events)

    # -- ells -------------------------------------------------------------

    def ell(self, a, b, c, d) -> _Piece:
        key = (a, b, c, d)
        hit = self._ells.get(key)
        if hit is not None:
            return hit
        piece = self._ell_solve(a, b, c, d)
        self._ells[key] = piece
        return piece

    def _ell_cuts(self, a, b, c, d):
        """The two straight cuts of an ell into rectangles."""
        top, bottom = self.rect(a, b), self.rect(a + c, d)
        horiz = list(_mapped(top, translate(0, d))) + list(bottom.squares)
        hev = ((0, "ell", (a, b, c, d), "cut", 0),) + _shifted(top, 1) + _shifted(bottom, 1)
        left, right = self.rect(a, b + d), self.rect(c, d)
        vert = list(left.squares) + list(_mapped(right, translate(a, 0)))
        vev = ((0, "ell", (a, b, c, d), "cut", 0),) + _shifted(left, 1) + _shifted(right, 1)
        return _Piece(tuple(horiz), hev), _Piece(tuple(vert), vev)

    def _ell_solve(self, a, b, c, d) -> _Piece:
        cfg = self.config
        if max(a + c, b + d) <= cfg.base:
            return min(self._ell_cuts(a, b, c, d), key=lambda pc: pc.count)
        try:
            built = self._ell_construct(a, b, c, d)
        except (ConstructionError, SearchExhausted, ReductionStalled, PreconditionError) as exc:
            if not cfg.hybrid:
                raise ConstructionError(f"ell {(a, b, c, d)}: {exc}") from exc
            return min(self._ell_cuts(a, b, c, d), key=lambda pc: pc.count)
        if cfg.hybrid:
            alt = min(self._ell_cuts(a, b, c, d), key=lambda pc: pc.count)
            if alt.count < built.count:
                return alt
        return built

    def _ell_construct(self, a, b, c, d) -> _Piece:
        cfg = self.config
        reduced_sq, e = ell_reduce(Ell(a, b, c, d))
        squares = [(s.x, s.y, s.side) for s in reduced_sq]
        if e.is_rectangle:
            r = e.as_rect()
            child = self.rect(r.w, r.h)
            squares += list(_mapped(child, translate(r.x, r.y)))
            events = ((0, "ell", (a, b, c, d), "construct-to-rect", len(reduced_sq)),) + _shifted(child, 1)
            return _Piece(tuple(squares), events)

        A, B, C, D = e.quad
        pl = e.placement
        split = ell_split_t(A, B, C, D, n=cfg.split_n)
        t = split.t
        J1, J2, _ = split.certificates
        events = []
        children = []  # (piece, placement in the reduced ell's frame)
        # R5, the bottom-right block, goes back to the rectangle step
        children.append((self.rect(A + C - t, D), translate(t, 0)))
        own = 0
        if 0 < t < A:
            # R3 = [0,t] x [0,B+D] and R4 = [t,A] x [D,D+B]: greedy until the two
            # leftovers are comparable, hugging x = t and the top edge
            s3 = _common_walk(t, B + D, J1.word, "rt")
            s4 = _common_walk(A - t, B, J2.word, "lt")
            j3, j4 = _match_scales(s3, _settle(s3), s4, _settle(s4), cfg.scale_factor)
            placed3, r3 = s3[j3]
            placed4, r4 = s4[j4]
            local = [(s.x, s.y, s.side) for s in placed3]
            local += [(t + s.x, D + s.y, s.side) for s in placed4]
            own = len(local)
            squares += list(_mapped(_Piece(tuple(local), ()), pl))
            w3, h3, w4, h4 = r3.w, r3.h, r4.w, r4.h
            top = B + D
            if h3 == h4:
                children.append((self.rect(w3 + w4, h3), translate(t - w3, top - h3)))
            elif h3 > h4:
                children.append((self.ell(w3, h3 - h4, w4, h4), Placement(MIRROR_Y, t - w3, top, 1)))
            else:
                children.append((self.ell(w4, h4 - h3, w3, h3), Placement(HALF_TURN, t + w4, top, 1)))
        elif t == 0:
            children.append((self.rect(A, B), translate(0, D)))
        else:
            children.append((self.rect(A, B + D), translate(0, 0)))

        events.append((0, "ell", (a, b, c, d), "construct", len(reduced_sq) + own))
        for child, cpl in children:
            squares += list(_mapped(child, cpl.then(pl)))
            events.extend(_shifted(child, 1))
        return _Piece(tuple(squares), tuple(events))


_TILERS: dict = {}


def clear_cache():
    _TILERS.clear()


def _tiler(config: KenyonConfig) -> KenyonTiler:
    t = _TILERS.get(config)
    if t is None:
        t = _TILERS[config] = KenyonTiler(config)
    return t


def kenyon_tile(p: int, q: int, strategy: str = "refined", config: Optional[KenyonConfig] = None):
    """Tile a q-wide, p-tall rectangle; returns (Tiling, ConstructionTrace).

    Non-coprime inputs are reduced first and the tiling is scaled back up.
    """
    if p < 1 or q < 1:
        raise PreconditionError("sides must be positive")
    if strategy not in ("refined", "baseline"):
        raise PreconditionError(f"unknown strategy {strategy!r}")
    if config is None:
        config = KenyonConfig(strategy=strategy)
    elif config.strategy != strategy:
        config = KenyonConfig(**{**config.__dict__, "strategy": strategy})
    lo, hi = min(p, q), max(p, q)
    tiler = _tiler(config)
    piece = tiler.rect(hi, lo)
    squares = [PlacedSquare(x, y, s) for x, y, s in piece.squares]
    trace = ConstructionTrace([TraceEvent(*ev) for ev in piece.events])
    if len(trace.events) == 1 and trace.events[0].action == "square":
        trace = ConstructionTrace()
    return Tiling(hi, lo, squares), trace
