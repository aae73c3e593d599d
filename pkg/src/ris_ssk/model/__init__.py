from .config import (
    NakagamiParams,
    Rpm,
    RpmSymbol,
    Scheme,
    Ssk,
    SystemConfig,
    parse_scheme,
)
from .error import (
    BinomialOverflowError,
    ConfigError,
    DimensionError,
    DomainError,
    Error,
    QuadratureConvergenceError,
)
from .moments import GaussianComponent, QuadraticForm, RpmMoments, SskMoments

__all__ = [
    "BinomialOverflowError",
    "ConfigError",
    "DimensionError",
    "DomainError",
    "Error",
    "GaussianComponent",
    "NakagamiParams",
    "QuadraticForm",
    "QuadratureConvergenceError",
    "Rpm",
    "RpmMoments",
    "RpmSymbol",
    "Scheme",
    "Ssk",
    "SskMoments",
    "SystemConfig",
    "parse_scheme",
]
