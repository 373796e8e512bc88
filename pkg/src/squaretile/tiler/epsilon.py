"""Tiling an x-by-1 rectangle except for a small neighbourhood of one corner.

Greedy squares are cut while the residual's aspect ratio stays at least
1 + delta, with delta = (sqrt2 - 1)/2.  Once the residual is nearer to a
square than that, a 2:1 block (two equal squares) goes along its short side
instead, which pushes the aspect ratio back into [1, 2].  All comparisons
against sqrt2 are done exactly on rationals.
"""
from __future__ import annotations

from fractions import Fraction
from math import floor

from ..exactmath import PreconditionError, as_fraction
from .geometry import PlacedSquare, Rect, Residual, Tiling


def below_one_plus_delta(r: Fraction) -> bool:
    """r < 1 + (sqrt2 - 1)/2, i.e. 2r - 1 < sqrt2."""
    t = 2 * r - 1
    return t < 0 or t * t < 2


def lambda_power_terms(k: int):
    """(A, B) with (3 - sqrt2)^k = A - B*sqrt2, so lambda^k = (A - B*sqrt2) / 2^k."""
    A, B = 1, 0
    for _ in range(k):
        A, B = 3 * A + 2 * B, A + 3 * B
    return A, B


def within_lambda_power(area: Fraction, scale: Fraction, k: int) -> bool:
    """Exact test of ``area <= scale * lambda^k`` with lambda = 1 - delta."""
    A, B = lambda_power_terms(k)
    rest = scale * A - area * 2**k  # need rest >= scale*B*sqrt2
    if rest < 0:
        return False
    return 2 * (scale * B) ** 2 <= rest * rest


def epsilon_tile(x, epsilon, max_squares: int = 100_000) -> Tiling:
    """Tile [0,x] x [0,1] except a rectangle of diameter <= epsilon at the corner (x, 1).

    ``meta`` on the result records the untiled area after every square
    (``areas``), the number of strip squares and the post-strip area.
    """
    x = as_fraction(x)
    epsilon = as_fraction(epsilon)
    if epsilon <= 0:
        raise PreconditionError("epsilon must be positive")
    if x < 1:
        raise PreconditionError("x must be at least 1")
    whole = Rect(Fraction(0), Fraction(0), x, Fraction(1))
    if epsilon >= x:
        return Tiling(x, Fraction(1), [], Residual("rectangle", (whole,)), meta={"trivial": True, "areas": []})

    squares: list[PlacedSquare] = []
    areas: list[Fraction] = []
    # residual [x0, x] x [y0, 1], always touching the corner (x, 1)
    x0, y0 = Fraction(0), Fraction(0)

    strip = floor(x) - 1 if x >= 2 else 0
    for _ in range(strip):
        squares.append(PlacedSquare(x0, y0, Fraction(1)))
        x0 += 1
        areas.append(x - x0)
    post_strip = (x - x0) * (1 - y0)

    while True:
        w, h = x - x0, 1 - y0
        if w == 0 or h == 0 or w * w + h * h <= epsilon * epsilon:
            break
        if len(squares) >= max_squares:
            raise RuntimeError(f"epsilon_tile exceeded {max_squares} squares")
        s = min(w, h)
        ratio = max(w, h) / s
        if ratio == 1:
            squares.append(PlacedSquare(x0, y0, s))
            x0, y0 = x, Fraction(1)
        elif below_one_plus_delta(ratio):
            half = s / 2
            if w >= h:  # 2:1 block standing against the left edge
                squares.append(PlacedSquare(x0, y0, half))
                squares.append(PlacedSquare(x0, y0 + half, half))
                areas.append((x - x0) * (1 - y0) - half * half)
                x0 += half
            else:
                squares.append(PlacedSquare(x0, y0, half))
                squares.append(PlacedSquare(x0 + half, y0, half))
                areas.append((x - x0) * (1 - y0) - half * half)
                y0 += half
        elif w >= h:
            squares.append(PlacedSquare(x0, y0, s))
            x0 += s
        else:
            squares.append(PlacedSquare(x0, y0, s))
            y0 += s
        areas.append((x - x0) * (1 - y0))

    w, h = x - x0, 1 - y0
    residual = Residual("rectangle", (Rect(x0, y0, w, h),)) if w and h else None
    meta = {"trivial": False, "areas": areas, "strip": strip, "post_strip_area": post_strip}
    return Tiling(x, Fraction(1), squares, residual, meta=meta)


def decay_holds(t: Tiling, from_strip: bool = True) -> bool:
    """Untiled area after the k-th square is at most A * lambda^k.

    With ``from_strip`` (the default) k counts squares after the initial
    strip and A is the area left after it; otherwise A = x and k counts all.
    """
    areas = t.meta.get("areas", [])
    if from_strip:
        start = t.meta.get("strip", 0)
        scale = t.meta.get("post_strip_area", t.width * t.height)
    else:
        start, scale = 0, t.width * t.height
    return all(within_lambda_power(a, scale, k - start + 1) for k, a in enumerate(areas) if k >= start)
