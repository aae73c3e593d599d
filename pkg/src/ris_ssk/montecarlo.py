import logging
import math
from collections.abc import Iterator
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.stats import norm

from ris_ssk.analytic import ssk_moments
from ris_ssk.channel import FloatArray, sample_gains
from ris_ssk.linkmodel import batch_energies, detection_errors, draw_phases
from ris_ssk.model import DomainError, Rpm, Ssk, SystemConfig

logger = logging.getLogger(__name__)

type Mode = Literal["exact", "surrogate"]

MODES: tuple[Mode, ...] = ("exact", "surrogate")

# Complex channel entries generated per inner batch; bounds memory per worker
_BATCH_ENTRIES = 1 << 20


@dataclass(kw_only=True, frozen=True)
class McConfig:
    trials: int
    seed: int = 0
    chunk_size: int = 100_000
    mode: Mode = "exact"
    confidence_level: float = 0.99

    def __post_init__(self) -> None:
        if isinstance(self.trials, bool) or not isinstance(self.trials, int) or self.trials < 1:
            raise DomainError("Number of trials must be a positive integer")
        if not 0 <= self.seed < 1 << 64:
            raise DomainError("Seed must be a 64-bit unsigned integer")
        if self.chunk_size < 1:
            raise DomainError("Chunk size must be a positive integer")
        if self.trials < self.chunk_size:
            raise DomainError(
                f"Number of trials {self.trials} is smaller than the chunk size {self.chunk_size}"
            )
        if self.mode not in MODES:
            raise DomainError(f"Unknown Monte-Carlo mode {self.mode!r}")
        if not 0.0 < self.confidence_level < 1.0:
            raise DomainError("Confidence level must lie in the open interval (0, 1)")

    @classmethod
    def fitted(
        cls,
        trials: int,
        *,
        seed: int = 0,
        chunk_size: int = 100_000,
        mode: Mode = "exact",
        confidence_level: float = 0.99,
    ) -> "McConfig":
        """Build a config whose chunk size never exceeds the trial count."""
        return cls(
            trials=trials,
            seed=seed,
            chunk_size=max(1, min(chunk_size, trials)),
            mode=mode,
            confidence_level=confidence_level,
        )

    def chunks(self) -> Iterator[tuple[int, int]]:
        """Yield (chunk index, trial count) pairs that partition the trials."""
        full, remainder = divmod(self.trials, self.chunk_size)
        for index in range(full):
            yield index, self.chunk_size
        if remainder:
            yield full, remainder


@dataclass(kw_only=True, frozen=True)
class McEstimate:
    p_hat: float
    stderr: float
    ci_low: float
    ci_high: float
    trials: int
    errors: int
    mode: Mode
    config: SystemConfig
    confidence_level: float
    psi: float | None = None

    def contains(self, value: float) -> bool:
        return self.ci_low <= value <= self.ci_high

    def z_score(self, value: float) -> float:
        deviation = self.p_hat - value
        if self.stderr == 0.0:
            return 0.0 if deviation == 0.0 else math.copysign(math.inf, deviation)
        return deviation / self.stderr


def estimate_ped_exact(
    cfg: SystemConfig,
    mc: McConfig,
    *,
    psi: float | None = None,
    workers: int = 1,
) -> McEstimate:
    if mc.mode != "exact":
        raise DomainError("Exact estimation requires an 'exact' Monte-Carlo config")
    return _estimate(cfg, mc, psi=psi, workers=workers)


def estimate_ped_surrogate(
    cfg: SystemConfig,
    mc: McConfig,
    *,
    psi: float | None = None,
    workers: int = 1,
) -> McEstimate:
    if mc.mode != "surrogate":
        raise DomainError("Surrogate estimation requires a 'surrogate' Monte-Carlo config")
    return _estimate(cfg, mc, psi=psi, workers=workers)


def estimate_ped(
    cfg: SystemConfig,
    mc: McConfig,
    *,
    psi: float | None = None,
    workers: int = 1,
) -> McEstimate:
    return _estimate(cfg, mc, psi=psi, workers=workers)


@dataclass(kw_only=True, frozen=True)
class _ChunkTask:
    cfg: SystemConfig
    mode: Mode
    seed: int
    index: int
    trials: int
    psi: float | None


def _estimate(cfg: SystemConfig, mc: McConfig, *, psi: float | None, workers: int) -> McEstimate:
    if workers < 1:
        raise DomainError("Number of workers must be a positive integer")
    if psi is not None and not isinstance(cfg.scheme, Rpm):
        raise DomainError("A pinned phase requires an RPM configuration")

    tasks = [
        _ChunkTask(cfg=cfg, mode=mc.mode, seed=mc.seed, index=index, trials=count, psi=psi)
        for index, count in mc.chunks()
    ]
    logger.debug(
        "Scheduling %d %s chunks of up to %d trials on %d worker(s)",
        len(tasks),
        mc.mode,
        mc.chunk_size,
        workers,
    )
    if workers == 1 or len(tasks) == 1:
        counts = [_count_chunk(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            # map keeps submission order, so the reduction order is fixed
            counts = list(executor.map(_count_chunk, tasks))

    errors = sum(counts)
    estimate = _summarise(errors, cfg, mc, psi)
    logger.info(
        "%s PED estimate %.6e +/- %.2e from %d trials",
        mc.mode,
        estimate.p_hat,
        estimate.stderr,
        mc.trials,
    )
    return estimate


def _summarise(errors: int, cfg: SystemConfig, mc: McConfig, psi: float | None) -> McEstimate:
    p_hat = errors / mc.trials
    stderr = math.sqrt(p_hat * (1.0 - p_hat) / mc.trials)
    z = float(norm.ppf(0.5 + mc.confidence_level / 2.0))
    return McEstimate(
        p_hat=p_hat,
        stderr=stderr,
        ci_low=max(0.0, p_hat - z * stderr),
        ci_high=min(1.0, p_hat + z * stderr),
        trials=mc.trials,
        errors=errors,
        mode=mc.mode,
        config=cfg,
        confidence_level=mc.confidence_level,
        psi=psi,
    )


def chunk_generator(seed: int, index: int) -> np.random.Generator:
    """Counter-based stream owned by one chunk; independent of the schedule."""
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, index]))


def _count_chunk(task: _ChunkTask) -> int:
    rng = chunk_generator(task.seed, task.index)
    cfg = task.cfg
    batch = max(1, _BATCH_ENTRIES // (cfg.n_elements * cfg.n_branches))
    errors = 0
    remaining = task.trials
    while remaining:
        size = min(batch, remaining)
        if task.mode == "exact":
            errors += _exact_errors(cfg, size, task.psi, rng)
        else:
            errors += _surrogate_errors(cfg, size, task.psi, rng)
        remaining -= size
    return errors


def _exact_errors(
    cfg: SystemConfig,
    size: int,
    psi: float | None,
    rng: np.random.Generator,
) -> int:
    gains = sample_gains(cfg.channel, (size, cfg.n_elements, cfg.n_branches), rng)
    phases = None if psi is None else np.full(size, psi)
    energies = batch_energies(gains, cfg, rng, psi=phases)
    return int(np.count_nonzero(detection_errors(energies)))


def _surrogate_errors(
    cfg: SystemConfig,
    size: int,
    psi: float | None,
    rng: np.random.Generator,
) -> int:
    # Target energy drawn from the Gaussian quadratic form, interferers exponential with mean a
    moments = ssk_moments(cfg)
    phases = _surrogate_phases(cfg, size, psi, rng)
    sin, cos = np.sin(phases), np.cos(phases)
    first = _normal(moments.mu1 * sin, moments.b_sk * sin**2 + moments.c_sk, rng)
    second = _normal(moments.mu1 * cos, moments.b_sk * cos**2 + moments.c_sk, rng)
    target = first**2 + second**2
    interferers = rng.exponential(moments.a, size=(size, cfg.n_branches - 1))
    return int(np.count_nonzero(target < interferers.max(axis=1)))


def _surrogate_phases(
    cfg: SystemConfig,
    size: int,
    psi: float | None,
    rng: np.random.Generator,
) -> FloatArray:
    scheme = cfg.scheme
    if isinstance(scheme, Ssk):
        # psi = pi/2 puts the whole mean and variance in the first component
        return np.full(size, math.pi / 2.0)
    if psi is not None:
        return np.full(size, psi)
    return draw_phases(scheme.order, size, rng)


def _normal(mean: FloatArray, variance: FloatArray, rng: np.random.Generator) -> FloatArray:
    return mean + np.sqrt(variance) * rng.standard_normal(mean.shape)
