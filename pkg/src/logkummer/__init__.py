"""Exact computations with log Kummer torsors: fine saturated monoids,
Kummer morphisms and their standard torsors, and mu_n-torsors over a
Dedekind base with log structure along a finite set of places."""

from .lattice import FiniteAbelianGroup, IntMatrix, QmodZ, smith_normal_form
from .monoid import AffineMonoid, MonoidMorphism, MorphismVerdict, Status
from .dedekind import DedekindLogBase, Divisor, FactoredK, LogGmClass
from .mun import MunTorsorClass, RacElement, torsor_from_element

__all__ = [
    "AffineMonoid",
    "DedekindLogBase",
    "Divisor",
    "FactoredK",
    "FiniteAbelianGroup",
    "IntMatrix",
    "LogGmClass",
    "MonoidMorphism",
    "MorphismVerdict",
    "MunTorsorClass",
    "QmodZ",
    "RacElement",
    "Status",
    "smith_normal_form",
    "torsor_from_element",
]
