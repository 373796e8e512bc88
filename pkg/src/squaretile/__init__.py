"""Tiling rectangles with few squares, in exact rational arithmetic.

Subpackages and modules:

* ``exactmath``: continued fractions and the Farey (Stern-Brocot) tree.
* ``aloof``: numbers with bounded partial quotients and the splits built on them.
* ``tiler``: greedy, corner-avoiding and logarithmic tilers, plus validation.
* ``network``: the tiling-to-resistor-network correspondence.
* ``oracle``: brute-force minima for small rectangles.
* ``asymptotics``: Monte Carlo statistics of the corner-avoiding greedy cost.
"""
from .exactmath import PreconditionError, cf_expand, greedy_cost
from .tiler import Tiling, epsilon_tile, greedy_tile, kenyon_tile, validate_tiling

__version__ = "0.1.0"

__all__ = [
    "PreconditionError", "Tiling", "cf_expand", "epsilon_tile", "greedy_cost", "greedy_tile",
    "kenyon_tile", "validate_tiling", "__version__",
]
