"""Exact checks on a tiling: bounds, disjointness and area bookkeeping."""
from __future__ import annotations

from dataclasses import dataclass, field

from .geometry import Tiling


@dataclass
class ValidationReport:
    valid: bool
    complete: bool
    violations: list[str] = field(default_factory=list)

    @property
    def first(self):
        return self.violations[0] if self.violations else None

    def __bool__(self):
        return self.valid


def _boxes(t: Tiling):
    out = [(s.x, s.y, s.side, s.side, f"square #{i} at ({s.x},{s.y}) side {s.side}") for i, s in enumerate(t.squares)]
    if t.residual is not None:
        for j, r in enumerate(t.residual.rects):
            out.append((r.x, r.y, r.w, r.h, f"residual piece #{j} at ({r.x},{r.y}) {r.w}x{r.h}"))
    return out


def validate_tiling(t: Tiling, max_violations: int = 20) -> ValidationReport:
    bad: list[str] = []
    if t.width <= 0 or t.height <= 0:
        bad.append(f"non-positive rectangle {t.width}x{t.height}")
        return ValidationReport(False, False, bad)
    boxes = _boxes(t)
    for x, y, w, h, label in boxes:
        if w <= 0 or h <= 0:
            bad.append(f"{label}: empty extent")
        elif x < 0 or y < 0 or x + w > t.width or y + h > t.height:
            bad.append(f"{label}: outside the {t.width}x{t.height} rectangle")
    # sweep along x; only boxes whose x-ranges overlap can collide
    order = sorted(range(len(boxes)), key=lambda i: boxes[i][0])
    for pos, i in enumerate(order):
        x, y, w, h, label = boxes[i]
        for j in order[pos + 1:]:
            x2, y2, w2, h2, label2 = boxes[j]
            if x2 >= x + w:
                break
            if y2 < y + h and y < y2 + h2:
                bad.append(f"overlap: {label} and {label2}")
                if len(bad) >= max_violations:
                    return ValidationReport(False, False, bad)
    covered = sum(b[2] * b[3] for b in boxes)
    if covered != t.width * t.height:
        bad.append(f"area mismatch: pieces cover {covered}, rectangle has {t.width * t.height}")
    return ValidationReport(not bad, not bad and t.complete, bad)

