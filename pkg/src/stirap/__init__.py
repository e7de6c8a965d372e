"""Three-level STIRAP dynamics: closed forms, RK4 and split-operator
propagation, and Berry-phase tools for the two-level monopole."""
from .errors import NumericalError, StirapError, ValidationError
from .kernels import BACKEND
from .pulses import PulseParams, Scheme, adiabatic_frame, eval_couplings, pulse_area

__version__ = "0.1.0"

__all__ = ["BACKEND", "NumericalError", "PulseParams", "Scheme", "StirapError",
           "ValidationError", "__version__", "adiabatic_frame", "eval_couplings", "pulse_area"]
