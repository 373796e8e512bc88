"""The Euclidean (largest square first) tiler, with a choice of corner for the residual."""
from __future__ import annotations

from typing import Iterator, Optional

from ..exactmath import PreconditionError
from .geometry import PlacedSquare, Rect, Tiling


def greedy_walk(rect: Rect, anchor: str = "rt") -> Iterator[tuple[PlacedSquare, Optional[Rect]]]:
    """Yield (square, residual) after each greedy cut.

    ``anchor`` names the corner the shrinking residual stays attached to:
    two letters, ``l``/``r`` then ``b``/``t``.  Squares are cut from the
    opposite side, so the residual always touches that corner.
    """
    if len(anchor) != 2 or anchor[0] not in "lr" or anchor[1] not in "bt":
        raise ValueError(f"bad anchor {anchor!r}")
    x, y, w, h = rect.x, rect.y, rect.w, rect.h
    while w > 0 and h > 0:
        if w >= h:
            s = h
            if anchor[0] == "r":
                sq = PlacedSquare(x, y, s)
                x += s
            else:
                sq = PlacedSquare(x + w - s, y, s)
            w -= s
        else:
            s = w
            if anchor[1] == "t":
                sq = PlacedSquare(x, y, s)
                y += s
            else:
                sq = PlacedSquare(x, y + h - s, s)
            h -= s
        yield sq, (Rect(x, y, w, h) if w > 0 and h > 0 else None)


def greedy_squares(rect: Rect, anchor: str = "rt") -> list[PlacedSquare]:
    return [sq for sq, _ in greedy_walk(rect, anchor)]


def greedy_tile(w, h) -> Tiling:
    """Tile a w x h rectangle completely by repeatedly cutting the largest square.

    >>> [s.side for s in greedy_tile(5, 8).squares]
    [5, 3, 2, 1, 1]
    """
    if w <= 0 or h <= 0:
        raise PreconditionError("greedy_tile needs positive sides")
    return Tiling(w, h, greedy_squares(Rect(0, 0, w, h)))
