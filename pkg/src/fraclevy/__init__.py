"""Mittag-Leffler type special functions, Mellin-Barnes inversion, Levy-type
densities and solvers for fractional relaxation equations."""

from .core_special import MLParams, PfqSpec, hyper_pfq, mittag_leffler, ml_prabhakar
from .errors import FracLevyError

__all__ = ["FracLevyError", "MLParams", "PfqSpec", "hyper_pfq", "mittag_leffler", "ml_prabhakar"]
__version__ = "0.1.0"
