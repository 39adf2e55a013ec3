"""kneadlab: transversality, kneading and transfer-operator experiments for
interval and circle maps."""

from .families import (
    Arnold,
    FlatExp,
    LorenzAffine,
    LorenzFlat,
    MultiplicativeClassE,
    PiecewiseLinear,
    PowerLaw,
    PowerUnimodal,
    Side,
    SidedPoint,
    make_family,
)
from .kneading import mt_compare, scan
from .solver import marked_orbit, solve_superstable_1d, solve_word, superstable_roots
from .transfer import build_A, build_AJ, spectrum
from .transversality import D_rho, positively_oriented, trans_sum

__version__ = "0.1.0"

__all__ = [
    "Arnold", "FlatExp", "LorenzAffine", "LorenzFlat", "MultiplicativeClassE", "PiecewiseLinear",
    "PowerLaw", "PowerUnimodal", "Side", "SidedPoint", "make_family", "mt_compare",
    "scan", "marked_orbit", "solve_superstable_1d", "solve_word", "superstable_roots", "build_A",
    "build_AJ", "spectrum", "D_rho", "positively_oriented", "trans_sum",
]
