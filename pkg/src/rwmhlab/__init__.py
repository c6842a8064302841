"""Metropolis-Hastings lag-one moment and correlation bounds: exact, quadrature and Monte Carlo routes."""
from . import bounds, distributions, exact, extremal, formulas, mh, tvshift
from .errors import RwmhError

__version__ = "0.1.0"
__all__ = ["bounds", "distributions", "exact", "extremal", "formulas", "mh", "tvshift", "RwmhError"]
