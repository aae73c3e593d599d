import math

import numpy as np
import numpy.typing as npt

from ris_ssk.channel import ChannelMatrix, ComplexArray, FloatArray
from ris_ssk.model import DimensionError, DomainError, Rpm, RpmSymbol, SystemConfig

# Zero-based index of the branch the RIS steers towards; all branches are i.i.d.
TARGET_BRANCH = 0


def aggregate_k(kt: float, kr: float) -> float:
    if kt < 0 or kr < 0:
        raise DomainError("Impairment levels must be nonnegative")
    return math.hypot(kt, kr)


def constellation(order: int) -> list[RpmSymbol]:
    return Rpm(order=order).symbols()


def draw_phases(order: int, size: int, rng: np.random.Generator) -> FloatArray:
    return 2.0 * np.pi * rng.integers(0, order, size=size) / order


def batch_energies(
    gains: ComplexArray,
    cfg: SystemConfig,
    rng: np.random.Generator,
    *,
    psi: FloatArray | None = None,
    target: int = TARGET_BRANCH,
) -> FloatArray:
    """Received energies |z_p|^2 for a batch of realizations, shape (trials, N_R).

    ``gains`` has shape (trials, N, N_R). The RIS aligns every element to ``target``;
    each realization draws one distortion sample shared by all branches and
    independent noise per branch.
    """
    trials, n_elements, n_branches = gains.shape
    if (n_elements, n_branches) != (cfg.n_elements, cfg.n_branches):
        raise DimensionError(
            f"Channel is {n_elements} x {n_branches} "
            f"but the configuration expects {cfg.n_elements} x {cfg.n_branches}"
        )
    if not 0 <= target < n_branches:
        raise DimensionError(f"Target branch {target} is outside 0..{n_branches - 1}")

    aligned = gains[:, :, target]
    # exp(j phi_u) with phi_u = theta_{u,target}
    steering = np.conj(aligned) / np.abs(aligned)
    sums = np.einsum("tu,tup->tp", steering, gains)

    distortion = _complex_normal(cfg.k**2 * cfg.es, (trials,), rng)
    noise = _complex_normal(cfg.n0, (trials, n_branches), rng)
    if psi is None and isinstance(cfg.scheme, Rpm):
        psi = draw_phases(cfg.scheme.order, trials, rng)

    amplitude = math.sqrt(cfg.es) + distortion
    signal = amplitude[:, None] * sums
    if psi is not None:
        signal = signal * np.exp(1j * np.asarray(psi))[:, None]
    return np.abs(signal + noise) ** 2


def received_energies(
    channel: ChannelMatrix,
    target: int,
    cfg: SystemConfig,
    rng: np.random.Generator,
    symbol: RpmSymbol | None = None,
) -> FloatArray:
    if (channel.n_elements, channel.n_branches) != (cfg.n_elements, cfg.n_branches):
        raise DimensionError(
            f"Channel is {channel.n_elements} x {channel.n_branches} "
            f"but the configuration expects {cfg.n_elements} x {cfg.n_branches}"
        )
    psi = None if symbol is None else np.array([symbol.phase])
    energies = batch_energies(channel.gains[None, :, :], cfg, rng, psi=psi, target=target)
    return energies[0]


def greedy_detect(energies: npt.ArrayLike) -> int:
    values = np.asarray(energies, dtype=np.float64)
    if values.ndim != 1 or values.size == 0:
        raise DimensionError("Cannot detect a branch from an empty energy vector")
    # argmax keeps the first maximum, so ties go to the lowest index
    return int(np.argmax(values))


def detection_errors(energies: FloatArray, target: int = TARGET_BRANCH) -> npt.NDArray[np.bool_]:
    return np.argmax(energies, axis=-1) != target


def _complex_normal(
    variance: float,
    shape: tuple[int, ...],
    rng: np.random.Generator,
) -> ComplexArray:
    scale = math.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
