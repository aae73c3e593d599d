import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from scipy.special import gammainc

from ris_ssk.model import DimensionError, DomainError, NakagamiParams
from ris_ssk.numerics import gamma_ratio

type ComplexArray = npt.NDArray[np.complex128]
type FloatArray = npt.NDArray[np.float64]


@dataclass(frozen=True, eq=False)
class ChannelMatrix:
    """Gains h[u, w] = beta[u, w] * exp(-j theta[u, w]) from RIS element u to branch w."""

    gains: ComplexArray

    def __post_init__(self) -> None:
        if self.gains.ndim != 2:
            raise DimensionError(
                f"Channel gains must form an N x N_R matrix, got shape {self.gains.shape}"
            )
        if not np.all(np.isfinite(self.gains)):
            raise DomainError("Channel gains must be finite")

    @property
    def n_elements(self) -> int:
        return int(self.gains.shape[0])

    @property
    def n_branches(self) -> int:
        return int(self.gains.shape[1])

    @property
    def magnitudes(self) -> FloatArray:
        return np.abs(self.gains)

    @property
    def phases(self) -> FloatArray:
        return -np.angle(self.gains)


def sample_gains(
    params: NakagamiParams,
    shape: tuple[int, ...],
    rng: np.random.Generator,
) -> ComplexArray:
    # X^2 ~ Gamma((1 + p) m / 2, Omega / m) and Y^2 ~ Gamma((1 - p) m / 2, Omega / m),
    # each with an independent fair sign; |h| is then Nakagami-m with E[|h|^2] = Omega
    scale = params.component_scale
    in_phase = np.sqrt(rng.gamma(params.in_phase_shape, scale, size=shape))
    in_phase *= rng.choice((-1.0, 1.0), size=shape)
    quadrature = np.sqrt(rng.gamma(params.quadrature_shape, scale, size=shape))
    quadrature *= rng.choice((-1.0, 1.0), size=shape)
    return in_phase + 1j * quadrature


def sample_channel(
    params: NakagamiParams,
    n_elements: int,
    n_branches: int,
    rng: np.random.Generator,
) -> ChannelMatrix:
    if n_elements < 1 or n_branches < 1:
        raise DomainError("Channel dimensions must be positive integers")
    return ChannelMatrix(sample_gains(params, (n_elements, n_branches), rng))


def beta_mean(params: NakagamiParams) -> float:
    return math.sqrt(params.omega / params.m) * gamma_ratio(params.m)


def beta_variance(params: NakagamiParams) -> float:
    return params.omega * (1.0 - gamma_ratio(params.m) ** 2 / params.m)


def nakagami_cdf(params: NakagamiParams, r: npt.ArrayLike) -> FloatArray:
    """Magnitude CDF P(m, m r^2 / Omega), zero for r <= 0."""
    radius = np.asarray(r, dtype=np.float64)
    argument = params.m * np.square(np.clip(radius, 0.0, None)) / params.omega
    return np.asarray(gammainc(params.m, argument), dtype=np.float64)
