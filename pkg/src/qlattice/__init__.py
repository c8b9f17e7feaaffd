"""Exact arithmetic in q-commuting skew-Laurent algebras on a lattice of sites."""

from .coeffs import BETA, CyclotomicElem, CyclotomicMode, LaurentPoly, RatFunc, cyclo_reduce, cyclotomic, q_power, ratfunc_eq
from .qcombinatorics import HalfInt, balanced_binom, expand_power, gauss_binom, qpochhammer
from .skewalg import AlgebraContext, Element, TruncatedSeries, commutator, degree, graded_commutator, mul, series_invert, series_mul

__all__ = [
    "BETA",
    "CyclotomicElem",
    "CyclotomicMode",
    "LaurentPoly",
    "RatFunc",
    "cyclo_reduce",
    "cyclotomic",
    "q_power",
    "ratfunc_eq",
    "HalfInt",
    "balanced_binom",
    "expand_power",
    "gauss_binom",
    "qpochhammer",
    "AlgebraContext",
    "Element",
    "TruncatedSeries",
    "commutator",
    "degree",
    "graded_commutator",
    "mul",
    "series_invert",
    "series_mul",
]

__version__ = "0.1.0"
