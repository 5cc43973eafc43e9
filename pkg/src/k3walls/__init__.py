"""Exact Mukai-lattice and wall computations for Bridgeland stability on an elliptic K3 surface."""

from .mukai import (
    C,
    F,
    O_X,
    DivisorClass,
    MukaiVector,
    SheafData,
    dual,
    euler_characteristic,
    ideal_sheaf,
    line_bundle,
    mukai_vector,
    pairing,
    reflect,
    twist,
)
from .quadext import PositiveRoot, QuadExt
from .slice import SliceSpec, central_charge
from .walls import WallGeometry, WallKind, WallQuadratic, wall_locus, wall_quadratic

__all__ = [
    "C", "F", "O_X", "DivisorClass", "MukaiVector", "SheafData",
    "dual", "euler_characteristic", "ideal_sheaf", "line_bundle", "mukai_vector", "pairing", "reflect", "twist",
    "PositiveRoot", "QuadExt", "SliceSpec", "central_charge",
    "WallGeometry", "WallKind", "WallQuadratic", "wall_locus", "wall_quadratic",
]

__version__ = "0.1.0"
