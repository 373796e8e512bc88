"""Tiling serialization: exact JSON with fraction strings, and SVG drawings."""
from __future__ import annotations

import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path

from .geometry import PlacedSquare, Rect, Residual, Tiling

SVG_SCALE = 32  # pixels per unit


class TilingFormatError(ValueError):
    pass


def frac_str(v) -> str:
    f = Fraction(v)
    return f"{f.numerator}/{f.denominator}"


def parse_frac(s) -> Fraction:
    if isinstance(s, bool) or not isinstance(s, (str, int)):
        raise TilingFormatError(f"expected a fraction string, got {s!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise TilingFormatError(f"bad fraction {s!r}") from exc


def _exact(f: Fraction):
    """Integers come back as int so integer tilings stay integer after a round trip."""
    return f.numerator if f.denominator == 1 else f


def tiling_to_dict(t: Tiling) -> dict:
    residual = None
    if t.residual is not None:
        residual = {
            "kind": t.residual.kind,
            "rects": [{"x": frac_str(r.x), "y": frac_str(r.y), "w": frac_str(r.w), "h": frac_str(r.h)}
                      for r in t.residual.rects],
            "params": [frac_str(v) for v in t.residual.params],
        }
    return {
        "width": frac_str(t.width),
        "height": frac_str(t.height),
        "squares": [{"x": frac_str(s.x), "y": frac_str(s.y), "side": frac_str(s.side)} for s in t.squares],
        "residual": residual,
    }


def tiling_from_dict(data: dict) -> Tiling:
    try:
        width = _exact(parse_frac(data["width"]))
        height = _exact(parse_frac(data["height"]))
        squares = [PlacedSquare(_exact(parse_frac(s["x"])), _exact(parse_frac(s["y"])),
                                _exact(parse_frac(s["side"])))
                   for s in data["squares"]]
        res = data.get("residual")
        residual = None
        if res is not None:
            rects = tuple(Rect(*(_exact(parse_frac(r[k])) for k in "xywh")) for r in res["rects"])
            params = tuple(_exact(parse_frac(v)) for v in res.get("params", []))
            residual = Residual(res["kind"], rects, params)
    except (KeyError, TypeError) as exc:
        raise TilingFormatError(f"malformed tiling: {exc}") from exc
    except ValueError as exc:  # non-positive square side
        raise TilingFormatError(str(exc)) from exc
    if width <= 0 or height <= 0:
        raise TilingFormatError("width and height must be positive")
    return Tiling(width, height, squares, residual)


def tiling_to_json(t: Tiling) -> str:
    return json.dumps(tiling_to_dict(t), indent=1) + "\n"


def tiling_from_json(text: str) -> Tiling:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TilingFormatError(f"not JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise TilingFormatError("top level must be an object")
    return tiling_from_dict(data)


def _px(v, scale) -> str:
    f = Fraction(v) * scale
    if f.denominator == 1:
        return str(f.numerator)
    return f"{float(f):.4f}".rstrip("0").rstrip(".")


def square_color(i: int) -> str:
    """Colour for the i-th square: hues stepped by the golden angle."""
    hue = (i * 137.508) % 360
    light = 62 + 10 * (i % 3)
    return f"hsl({hue:.1f},55%,{light}%)"


def tiling_to_svg(t: Tiling, scale=SVG_SCALE) -> str:
    """One ``rect`` per square; y runs upward in tiling coordinates, so it is flipped."""
    W, H = t.width, t.height

    def box(x, y, w, h):
        return (f'x="{_px(x, scale)}" y="{_px(H - y - h, scale)}" '
                f'width="{_px(w, scale)}" height="{_px(h, scale)}"')

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_px(W, scale)}" height="{_px(H, scale)}" '
        f'viewBox="0 0 {_px(W, scale)} {_px(H, scale)}">',
        f'<rect x="0" y="0" width="{_px(W, scale)}" height="{_px(H, scale)}" fill="white"/>',
    ]
    for i, s in enumerate(t.squares):
        lines.append(f'<rect {box(s.x, s.y, s.side, s.side)} fill="{square_color(i)}" '
                     f'stroke="black" stroke-width="1"/>')
    if t.residual is not None:
        for r in t.residual.rects:
            lines.append(f'<rect {box(r.x, r.y, r.w, r.h)} fill="#bbbbbb" class="residual"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def write_atomic(path, text: str) -> None:
    """Write via a temporary file in the same directory, then rename over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
