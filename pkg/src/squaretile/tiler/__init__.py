"""Square-tiling constructions and their validation."""
from .ell import EllStep, ReductionStalled, ell_normalize, ell_reduce, ell_step
from .epsilon import decay_holds, epsilon_tile
from .geometry import Ell, Placement, PlacedSquare, Rect, Residual, Tiling
from .greedy import greedy_squares, greedy_tile, greedy_walk
from .io import (TilingFormatError, tiling_from_json, tiling_to_json, tiling_to_svg,
                 write_atomic)
from .kenyon import ConstructionError, ConstructionTrace, KenyonConfig, kenyon_tile
from .validate import ValidationReport, validate_tiling

__all__ = [
    "ConstructionError", "ConstructionTrace", "Ell", "EllStep", "KenyonConfig", "Placement",
    "PlacedSquare", "Rect", "ReductionStalled", "Residual", "Tiling", "TilingFormatError",
    "ValidationReport", "decay_holds", "ell_normalize", "ell_reduce", "ell_step", "epsilon_tile",
    "greedy_squares", "greedy_tile", "greedy_walk", "kenyon_tile", "tiling_from_json",
    "tiling_to_json", "tiling_to_svg", "validate_tiling", "write_atomic",
]
