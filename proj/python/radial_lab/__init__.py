"""Dyadic radial projections, Frostman certificates and tube incidences.

Exact inputs (slopes, exponents, radii) accept int, str ("3/8"), float or
fractions.Fraction; exact outputs are Fractions.
"""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
