"""Placed squares, tilings, ells and the integer affine maps that position them."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

Number = int | Fraction

# the eight symmetries of the square as (m00, m01, m10, m11)
DIHEDRAL = (
    (1, 0, 0, 1),
    (0, -1, 1, 0),
    (-1, 0, 0, -1),
    (0, 1, -1, 0),
    (-1, 0, 0, 1),
    (1, 0, 0, -1),
    (0, 1, 1, 0),
    (0, -1, -1, 0),
)


@dataclass(frozen=True)
class PlacedSquare:
    x: Number
    y: Number
    side: Number

    def __post_init__(self):
        if self.side <= 0:
            raise ValueError(f"square side must be positive, got {self.side}")


@dataclass(frozen=True)
class Rect:
    x: Number
    y: Number
    w: Number
    h: Number

    @property
    def area(self):
        return self.w * self.h


@dataclass(frozen=True)
class Residual:
    """Untiled part of a tiling, as a union of interior-disjoint rectangles."""

    kind: str  # "rectangle" | "ell"
    rects: tuple[Rect, ...]
    params: tuple = ()

    @property
    def area(self):
        return sum(r.area for r in self.rects)


@dataclass
class Tiling:
    width: Number
    height: Number
    squares: list[PlacedSquare] = field(default_factory=list)
    residual: Optional[Residual] = None
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def complete(self) -> bool:
        return self.residual is None or self.residual.area == 0

    def __len__(self):
        return len(self.squares)

    @property
    def count(self) -> int:
        return len(self.squares)

    def covered_area(self):
        return sum(s.side * s.side for s in self.squares)


@dataclass(frozen=True)
class Placement:
    """``v -> scale * M v + origin`` with M one of the dihedral matrices."""

    m: tuple[int, int, int, int] = (1, 0, 0, 1)
    ox: Number = 0
    oy: Number = 0
    scale: Number = 1

    def point(self, x, y):
        a, b, c, d = self.m
        s = self.scale
        return s * (a * x + b * y) + self.ox, s * (c * x + d * y) + self.oy

    def then(self, outer: "Placement") -> "Placement":
        """The map ``outer(self(v))``."""
        a, b, c, d = self.m
        A, B, C, D = outer.m
        m = (A * a + B * c, A * b + B * d, C * a + D * c, C * b + D * d)
        ox, oy = outer.point(self.ox, self.oy)
        return Placement(m, ox, oy, self.scale * outer.scale)

    def rect(self, x, y, w, h) -> Rect:
        x1, y1 = self.point(x, y)
        x2, y2 = self.point(x + w, y + h)
        return Rect(min(x1, x2), min(y1, y2), abs(x2 - x1), abs(y2 - y1))

    def square(self, sq: PlacedSquare) -> PlacedSquare:
        r = self.rect(sq.x, sq.y, sq.side, sq.side)
        return PlacedSquare(r.x, r.y, r.w)


IDENTITY = Placement()


def translate(dx, dy) -> Placement:
    return Placement((1, 0, 0, 1), dx, dy, 1)


def place_all(squares: Iterable[PlacedSquare], placement: Placement) -> list[PlacedSquare]:
    if placement == IDENTITY:
        return list(squares)
    return [placement.square(s) for s in squares]


# ---------------------------------------------------------------------------
# ells
# ---------------------------------------------------------------------------


def stacked_vertices(top_w, top_h, bottom_w, bottom_h) -> frozenset:
    """Corners of a (top_w x top_h) block set left-aligned on a (bottom_w x bottom_h) block."""
    pts = {
        (0, 0),
        (bottom_w, 0),
        (bottom_w, bottom_h),
        (top_w, bottom_h),
        (top_w, bottom_h + top_h),
        (0, bottom_h + top_h),
    }
    if top_w == bottom_w:
        pts -= {(bottom_w, bottom_h)}
    return frozenset(pts)


def ell_vertices(a, b, c, d) -> frozenset:
    """Canonical ell: a x b on top of (a+c) x d, both flush left, lower-left at 0."""
    return stacked_vertices(a, b, a + c, d)


def fit_placement(quad, target: frozenset) -> Placement:
    """Dihedral map + translation taking the canonical ell ``quad`` onto ``target``."""
    base = ell_vertices(*quad)
    tx = min(x for x, _ in target)
    ty = min(y for _, y in target)
    for m in DIHEDRAL:
        pl = Placement(m)
        pts = [pl.point(x, y) for x, y in base]
        mx = min(x for x, _ in pts)
        my = min(y for _, y in pts)
        moved = frozenset((x - mx + tx, y - my + ty) for x, y in pts)
        if moved == target:
            return Placement(m, tx - mx, ty - my, 1)
    raise ValueError(f"ell {quad} does not fit region {sorted(target)}")


@dataclass(frozen=True)
class Ell:
    """A six-sided region, (a x b) stacked left-aligned on ((a+c) x d), then placed."""

    a: Number
    b: Number
    c: Number
    d: Number
    placement: Placement = IDENTITY

    @property
    def quad(self):
        return (self.a, self.b, self.c, self.d)

    @property
    def area(self):
        return self.a * self.b + (self.a + self.c) * self.d

    @property
    def is_rectangle(self) -> bool:
        return self.b == 0 or self.c == 0

    def ratio(self):
        vals = self.quad
        return Fraction(max(vals)) / min(vals)

    def local_rects(self) -> tuple[Rect, ...]:
        a, b, c, d = self.quad
        out = []
        if d:
            out.append(Rect(0, 0, a + c, d))
        if b:
            out.append(Rect(0, d, a, b))
        return tuple(out)

    def rects(self) -> tuple[Rect, ...]:
        return tuple(self.placement.rect(r.x, r.y, r.w, r.h) for r in self.local_rects())

    def as_rect(self) -> Rect:
        """Global rectangle of a degenerate ell (b == 0 or c == 0)."""
        a, b, c, d = self.quad
        if c == 0:
            local = (0, 0, a, b + d)
        elif b == 0:
            local = (0, 0, a + c, d)
        else:
            raise ValueError("not degenerate")
        return self.placement.rect(*local)

    def residual(self) -> Residual:
        if self.is_rectangle:
            return Residual("rectangle", (self.as_rect(),))
        return Residual("ell", self.rects(), self.quad)

    def swapped(self) -> "Ell":
        """Same region described as (d, c, b, a) (reflection in the diagonal)."""
        return Ell(self.d, self.c, self.b, self.a, Placement((0, 1, 1, 0)).then(self.placement))
