"""Finite real spectral triples with multitwisted real structure."""

from .numat import AntilinearOp, op_norm, principal_sqrt
from .algebra import StarAlgebraBasis, span_closure
from .triple import ConditionReport, MultitwistedStructure, MultitwistedTriple, RealSpectralTriple, run_all

__version__ = "0.1.0"
