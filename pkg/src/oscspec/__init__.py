"""Exact piecewise-linear generators of an l1-isometric subspace of C[0, 1].

The generators ``phi_m`` are built over a nested binary tree of closed
blocks near 1 and over shrinking windows around the points ``1/n``.
Everything is exact rational arithmetic; see :mod:`oscspec.cli` for the
command-line front end.
"""
from .arith import ConstructionError, DomainError, Interval, as_rational, fmt, normalize
from .generators import GeneratorSet, PiecewiseLinear, linear_combine, oscillation, sup_norm
from .kernels import BACKEND
from .lattice import BlockTree, Lattice, ScaleParams, build_tree
from .report import VerificationReport
from .subspace import CoeffVector, check_isometry, synthesize, witness_point

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BlockTree",
    "CoeffVector",
    "ConstructionError",
    "DomainError",
    "GeneratorSet",
    "Interval",
    "Lattice",
    "PiecewiseLinear",
    "ScaleParams",
    "VerificationReport",
    "as_rational",
    "build_tree",
    "check_isometry",
    "fmt",
    "linear_combine",
    "normalize",
    "oscillation",
    "sup_norm",
    "synthesize",
    "witness_point",
]
