from .gaussrat import GaussRat, I, format_coefficient
from .poly import (VarContext, Poly, wirtinger, conj_involution, initial_form, realify,
                   real_part, imag_part)
from .matrix import PolyMatrix, jacobian, determinant, minors, minor_labels, generic_rank
from .division import divide_exact, series_divide, SeriesQuotient, Obstructed
from .interval import (Interval, IntervalBox, ComplexInterval, interval_eval,
                       certify_no_common_zero, Certified, Undecided)

__all__ = [
    "GaussRat", "I", "format_coefficient", "VarContext", "Poly", "wirtinger", "conj_involution",
    "initial_form", "realify", "real_part", "imag_part", "PolyMatrix", "jacobian", "determinant",
    "minors", "minor_labels", "generic_rank", "divide_exact", "series_divide", "SeriesQuotient",
    "Obstructed", "Interval", "IntervalBox", "ComplexInterval", "interval_eval",
    "certify_no_common_zero", "Certified", "Undecided",
]
