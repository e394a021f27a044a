"""Numerics for ergodic series on the circle.

Transfer operators of x -> q x mod 1 in Fourier form, martingale profiles and
concentration checks for weighted orbit series, frame diagnostics for dilated
systems, Ruelle-operator Gibbs solvers with pressure curves, and the
differentiability dichotomy for Weierstrass-type functions.
"""

__version__ = "0.1.0"

from .errors import (
    ErgoSeriesError,
    NumericalError,
    PrecisionBudgetError,
    SchemaError,
)
from .series import CoefficientSequence, ProbeConfig, convergence_probe, partial_sum
from .torusfn import DEFAULT_GRID_SIZE, ModulusOfContinuity, TorusFunction
from .transfer import ExpandingMap, hypothesis_check, perron_frobenius

__all__ = [
    "CoefficientSequence",
    "DEFAULT_GRID_SIZE",
    "ErgoSeriesError",
    "ExpandingMap",
    "ModulusOfContinuity",
    "NumericalError",
    "PrecisionBudgetError",
    "ProbeConfig",
    "SchemaError",
    "TorusFunction",
    "convergence_probe",
    "hypothesis_check",
    "partial_sum",
    "perron_frobenius",
    "__version__",
]
