"""Numerical oracles for the closed forms.

Nothing here calls into ``ris_ssk.analytic``: the MGF oracle integrates the Gaussian
components directly and the binomial identity is summed in exact rationals.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import logsumexp

from ris_ssk.channel import FloatArray
from ris_ssk.model import (
    DimensionError,
    DomainError,
    QuadraticForm,
    QuadratureConvergenceError,
)
from ris_ssk.numerics import MAX_BINOMIAL_ORDER, binomial

DEFAULT_NODE_COUNT = 96
CONVERGENCE_TOLERANCE = 1e-12


@dataclass(kw_only=True, frozen=True)
class QuadratureSpec:
    """E[exp(shift * sum_i U_i^2)] for independent U_i ~ Normal(means[i], variances[i])."""

    means: tuple[float, ...]
    variances: tuple[float, ...]
    shift: float
    node_count: int = DEFAULT_NODE_COUNT

    def __post_init__(self) -> None:
        if self.node_count < 2 or self.node_count % 2:
            raise DomainError("Quadrature node count must be a positive even integer")
        if len(self.means) != len(self.variances):
            raise DimensionError(
                f"Got {len(self.means)} component means but {len(self.variances)} variances"
            )
        if not all(math.isfinite(v) and v > 0 for v in self.variances):
            raise DomainError("Component variances must be positive finite numbers")
        if not self.shift <= 0:
            raise DomainError(f"Quadrature MGF is evaluated for s <= 0, got {self.shift!r}")


def quadrature_mgf(spec: QuadratureSpec) -> float:
    """Adaptive Gauss-Hermite value of the factorised MGF.

    Each one-dimensional integral is re-centred at its numerically located peak and
    scaled by its numerical curvature before the Hermite rule is applied. The rule is
    then re-run with twice the nodes; a change beyond the tolerance raises
    ``QuadratureConvergenceError``.
    """
    log_value = 0.0
    for mean, variance in zip(spec.means, spec.variances, strict=True):
        coarse = _log_component(mean, variance, spec.shift, spec.node_count)
        fine = _log_component(mean, variance, spec.shift, 2 * spec.node_count)
        # Compared in the log domain: the exponent itself carries rounding of order eps * |log|
        if abs(fine - coarse) > CONVERGENCE_TOLERANCE * max(1.0, abs(coarse)):
            raise QuadratureConvergenceError(
                f"Gauss-Hermite rule with {spec.node_count} nodes did not converge "
                f"(log change {abs(fine - coarse):.3e})"
            )
        log_value += coarse
    return math.exp(log_value)


def mgf_by_quadrature(
    moments: QuadraticForm,
    s: float,
    node_count: int = DEFAULT_NODE_COUNT,
) -> float:
    components = moments.components()
    spec = QuadratureSpec(
        means=tuple(c.mean for c in components),
        variances=tuple(c.variance for c in components),
        shift=s,
        node_count=node_count,
    )
    return quadrature_mgf(spec)


def binomial_identity(order: int) -> tuple[Fraction, Fraction]:
    """Exact (sum_{r=1}^{L} (-1)^(r-1) C(L, r) / (r + 1), L / (L + 1))."""
    if not 1 <= order <= MAX_BINOMIAL_ORDER:
        raise DomainError(
            f"Binomial identity order must lie in 1..{MAX_BINOMIAL_ORDER}, got {order}"
        )
    lhs = sum(
        (Fraction((-1) ** (r - 1) * binomial(order, r), r + 1) for r in range(1, order + 1)),
        start=Fraction(0),
    )
    return lhs, Fraction(order, order + 1)


def _log_component(mean: float, variance: float, shift: float, node_count: int) -> float:
    # log of E[exp(shift * (mean + sigma Z)^2)], Z standard normal
    sigma = math.sqrt(variance)

    def log_integrand(z: FloatArray | float) -> FloatArray | float:
        return shift * (mean + sigma * z) ** 2 - 0.5 * np.square(z)

    peak = float(minimize_scalar(lambda z: -log_integrand(z)).x)
    step = 1e-3 * (1.0 + abs(peak))
    curvature = -(
        log_integrand(peak + step) - 2.0 * log_integrand(peak) + log_integrand(peak - step)
    ) / step**2
    width = 1.0 / math.sqrt(max(float(curvature), 1e-300))

    knots, weights = _probabilist_hermite(node_count)
    points = peak + width * knots
    # f(z) phi(z) / phi(t) with z = peak + width * t; the 1/sqrt(2 pi) factors cancel
    log_terms = log_integrand(points) + 0.5 * np.square(knots)
    return float(logsumexp(log_terms, b=weights)) + math.log(width)


@lru_cache(maxsize=8)
def _probabilist_hermite(node_count: int) -> tuple[FloatArray, FloatArray]:
    knots, weights = np.polynomial.hermite.hermgauss(node_count)
    return knots * math.sqrt(2.0), weights / math.sqrt(math.pi)
