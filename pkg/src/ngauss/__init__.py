"""Copula-based non-iterative Gaussianization with baseline methods and
an evaluation harness."""
from .errors import (DecompositionError, DomainError, FitError, InputError,
                     NgaussError, NormalityTestError, NumericalError,
                     ParseError, PlanError, SelectionError)
from .ng_core import (NgModel, fit_ng, fit_synthesis_model, ng_forward,
                      ng_inverse_training, ng_synthesize)

__version__ = "0.1.0"

__all__ = [
    "DecompositionError", "DomainError", "FitError", "InputError",
    "NgaussError", "NormalityTestError", "NumericalError", "ParseError",
    "PlanError", "SelectionError",
    "NgModel", "fit_ng", "fit_synthesis_model", "ng_forward",
    "ng_inverse_training", "ng_synthesize",
]
