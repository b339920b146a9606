"""Toolkit for laser phase-noise limits on optomechanical cooling and
coherent photon-phonon state transfer.

Closed-form perturbative spectra and limits live in `analytic`; an
independent Monte Carlo moment-equation oracle lives in `oracle`;
`noise` and `cavityfield` generate the stochastic inputs both share.
"""

from .errors import (
    AmbiguousParameterError,
    ConfigError,
    CoverageError,
    DataFormatError,
    FitError,
    InvalidParameterError,
    RegimeError,
    ResolutionError,
    StabilityError,
    ToolkitError,
)
from .params import (
    NoiseModel,
    SystemParams,
    ValidationReport,
    check_regime,
    validate,
)
from .results import (
    CoolingResult,
    ErrorBudget,
    FidelityResult,
    SpectrumResult,
    StrongCoolingResult,
)

__version__ = "0.1.0"

__all__ = [
    "AmbiguousParameterError",
    "ConfigError",
    "CoolingResult",
    "CoverageError",
    "DataFormatError",
    "ErrorBudget",
    "FidelityResult",
    "FitError",
    "InvalidParameterError",
    "NoiseModel",
    "RegimeError",
    "ResolutionError",
    "SpectrumResult",
    "StabilityError",
    "StrongCoolingResult",
    "SystemParams",
    "ToolkitError",
    "ValidationReport",
    "check_regime",
    "validate",
    "__version__",
]
