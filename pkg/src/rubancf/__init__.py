"""Ruban continued fractions over the l-adic numbers."""
from .padic import LRational, PartialQuotient, Prime, padic_floor
from .rational import Outcome, classify_rational, expand_rational
from .quadratic import QuadraticSurd, classify_quadratic, make_surd

__version__ = "0.1.0"

__all__ = [
    "LRational",
    "PartialQuotient",
    "Prime",
    "padic_floor",
    "Outcome",
    "classify_rational",
    "expand_rational",
    "QuadraticSurd",
    "classify_quadratic",
    "make_surd",
]
