"""Parameter sweeps over SSK / SSK-RPM configurations, written as CSV.

Config files are flat ``key = value`` lines; ``#`` starts a comment, lists are
comma-separated and the SNR grid may be given as ``start:stop:step`` in dB.
"""

import csv
import logging
import math
import os
import tempfile
from collections.abc import Callable, Iterator
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from ris_ssk.analytic import (
    ber_union_bound,
    ped,
    ped_high_snr,
    ped_limit_zero_snr,
    ped_low_snr,
    ped_rpm_conditional,
)
from ris_ssk.model import (
    ConfigError,
    DomainError,
    Error,
    NakagamiParams,
    Rpm,
    Scheme,
    SystemConfig,
    parse_scheme,
)
from ris_ssk.montecarlo import MODES, McConfig, McEstimate, Mode, estimate_ped

logger = logging.getLogger(__name__)

COLUMNS = (
    "scheme",
    "N",
    "N_R",
    "m",
    "omega",
    "p",
    "k",
    "M",
    "gamma_db",
    "trials",
    "mode",
    "ped_mc",
    "ped_mc_stderr",
    "ped_analytic",
    "ped_high_snr",
    "ped_low_snr",
    "ped_zero_snr",
    "ber_bound",
    "vacuous",
)

REQUIRED_KEYS = ("schemes", "n", "nr", "gamma_db")

type Row = dict[str, str]


@dataclass(kw_only=True, frozen=True)
class SweepSpec:
    schemes: tuple[Scheme, ...]
    n_elements: tuple[int, ...]
    n_branches: tuple[int, ...]
    gamma_db: tuple[float, ...]
    m: tuple[float, ...] = (1.0,)
    k: tuple[float, ...] = (0.0,)
    omega: float = 1.0
    p: float = 0.0
    trials: int = 0
    seed: int = 0
    mode: Mode = "exact"
    chunk_size: int = 100_000
    confidence: float = 0.99
    ber: bool = False
    output: Path | None = None

    def __post_init__(self) -> None:
        for name, values in (
            ("schemes", self.schemes),
            ("n", self.n_elements),
            ("nr", self.n_branches),
            ("m", self.m),
            ("k", self.k),
        ):
            if not values:
                raise DomainError(f"Sweep grid {name!r} is empty")
        if not self.gamma_db:
            raise DomainError("Sweep SNR grid is empty")
        if self.trials < 0:
            raise DomainError("Number of trials must be a nonnegative integer")
        if self.mode not in MODES:
            raise DomainError(f"Unknown Monte-Carlo mode {self.mode!r}")
        if self.ber:
            for n_branches in self.n_branches:
                if n_branches & (n_branches - 1):
                    raise DomainError(
                        f"BER bound needs a power-of-2 number of branches, got {n_branches}"
                    )
        # Surface invalid grid values before any work is done
        list(self.grid())

    def channel(self, m: float) -> NakagamiParams:
        return NakagamiParams(m=m, omega=self.omega, p=self.p)

    def points(self) -> Iterator[tuple[Scheme, int, int, float, float, float]]:
        for scheme in self.schemes:
            for n_elements in self.n_elements:
                for n_branches in self.n_branches:
                    for m in self.m:
                        for k in self.k:
                            for gamma_db in self.gamma_db:
                                yield scheme, n_elements, n_branches, m, k, gamma_db

    def grid(self) -> Iterator[tuple[float, SystemConfig]]:
        for scheme, n_elements, n_branches, m, k, gamma_db in self.points():
            yield gamma_db, SystemConfig.from_snr_db(
                gamma_db,
                n_elements=n_elements,
                n_branches=n_branches,
                k=k,
                scheme=scheme,
                channel=self.channel(m),
            )


def parse_db_grid(text: str) -> tuple[float, ...]:
    text = text.strip()
    if not text:
        return ()
    if ":" not in text:
        return tuple(float(item) for item in _split(text))
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"SNR range must be 'start:stop:step', got {text!r}")
    start, stop, step = (float(part) for part in parts)
    if not step > 0:
        raise ValueError("SNR range step must be positive")
    if stop < start:
        return ()
    # stop is included when it lands on the grid up to rounding
    count = math.floor((stop - start) / step + 1e-9) + 1
    return tuple(start + i * step for i in range(count))


def parse_sweep_config(text: str) -> SweepSpec:
    values: dict[str, Any] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"expected 'key = value', got {line!r}", line=number)
        key = key.strip().lower()
        if key not in _PARSERS:
            raise ConfigError(f"unknown key {key!r}", line=number)
        if key in values:
            raise ConfigError(f"duplicate key {key!r}", line=number)
        try:
            values[key] = _PARSERS[key](value.strip())
        except (ValueError, Error) as e:
            raise ConfigError(f"invalid value for {key!r}: {e}", line=number) from e

    missing = [key for key in REQUIRED_KEYS if key not in values]
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(missing)}")

    fields = {_FIELDS.get(key, key): value for key, value in values.items()}
    try:
        return SweepSpec(**fields)
    except Error as e:
        raise ConfigError(str(e)) from e


def load_sweep_config(path: str | os.PathLike[str]) -> SweepSpec:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read sweep config {str(path)!r}: {e.strerror}") from e
    return parse_sweep_config(text)


def row_seed(seed: int, index: int) -> int:
    """Independent 64-bit seed for the row at ``index``."""
    sequence = np.random.SeedSequence(seed, spawn_key=(index,))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def run_sweep(spec: SweepSpec, *, workers: int = 1) -> Iterator[Row]:
    for index, (gamma_db, cfg) in enumerate(spec.grid()):
        estimate = None
        if spec.trials > 0:
            mc = McConfig.fitted(
                spec.trials,
                seed=row_seed(spec.seed, index),
                chunk_size=spec.chunk_size,
                mode=spec.mode,
                confidence_level=spec.confidence,
            )
            estimate = estimate_ped(cfg, mc, workers=workers)
        row = evaluate_row(cfg, gamma_db, estimate=estimate, ber=spec.ber)
        logger.debug("Sweep row %d: %s", index, row)
        yield row


def evaluate_row(
    cfg: SystemConfig,
    gamma_db: float,
    *,
    estimate: McEstimate | None = None,
    ber: bool = False,
    psi: float | None = None,
) -> Row:
    """One CSV row; a pinned ``psi`` makes the closed-form column the conditional PED."""
    analytic = ped(cfg).value if psi is None else ped_rpm_conditional(cfg, psi).value
    bound = ber_union_bound(analytic, cfg.n_branches) if ber else None
    return {
        "scheme": cfg.scheme.label,
        "N": str(cfg.n_elements),
        "N_R": str(cfg.n_branches),
        "m": _number(cfg.channel.m),
        "omega": _number(cfg.channel.omega),
        "p": _number(cfg.channel.p),
        "k": _number(cfg.k),
        "M": str(cfg.scheme.order) if isinstance(cfg.scheme, Rpm) else "",
        "gamma_db": _number(gamma_db),
        "trials": str(estimate.trials) if estimate else "0",
        "mode": estimate.mode if estimate else "",
        "ped_mc": _probability(estimate.p_hat) if estimate else "",
        "ped_mc_stderr": _probability(estimate.stderr) if estimate else "",
        "ped_analytic": _probability(analytic),
        "ped_high_snr": _probability(ped_high_snr(cfg).value),
        "ped_low_snr": _probability(ped_low_snr(cfg).value),
        "ped_zero_snr": _probability(ped_limit_zero_snr(cfg).value),
        "ber_bound": _probability(bound.value) if bound else "",
        "vacuous": ("1" if bound.vacuous else "0") if bound else "",
    }


def write_rows(rows: Iterator[Row], stream: Any) -> int:
    writer = csv.DictWriter(stream, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    count = 0
    for row in rows:
        writer.writerow(row)
        count += 1
    return count


def write_sweep_csv(
    spec: SweepSpec,
    path: str | os.PathLike[str],
    *,
    workers: int = 1,
) -> int:
    """Run ``spec`` and write it to ``path``; nothing is left behind on failure."""
    target = Path(path)
    try:
        fd, temporary = tempfile.mkstemp(
            prefix=f".{target.name}.", suffix=".part", dir=target.parent
        )
    except OSError as e:
        raise _unwritable(target, e) from e
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as stream:
            count = write_rows(run_sweep(spec, workers=workers), stream)
        os.replace(temporary, target)
    except OSError as e:
        Path(temporary).unlink(missing_ok=True)
        raise _unwritable(target, e) from e
    except BaseException:
        Path(temporary).unlink(missing_ok=True)
        raise
    logger.info("Wrote %d sweep rows to %s", count, target)
    return count


def _unwritable(target: Path, error: OSError) -> ConfigError:
    return ConfigError(f"cannot write sweep output {str(target)!r}: {error.strerror}")


def _number(value: float) -> str:
    return f"{value:g}"


def _probability(value: float) -> str:
    return f"{value:.9e}"


def _split(text: str) -> list[str]:
    items = [item.strip() for item in text.split(",")]
    if any(not item for item in items):
        raise ValueError(f"empty list item in {text!r}")
    return items


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(item) for item in _split(text))


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(item) for item in _split(text))


def _boolean(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("true", "yes", "1"):
        return True
    if lowered in ("false", "no", "0"):
        return False
    raise ValueError(f"expected true or false, got {text!r}")


def _mode(text: str) -> Mode:
    for mode in MODES:
        if text == mode:
            return mode
    raise ValueError(f"expected one of {', '.join(MODES)}, got {text!r}")


_PARSERS: dict[str, Callable[[str], Any]] = {
    "schemes": lambda text: tuple(parse_scheme(item) for item in _split(text)),
    "n": _int_list,
    "nr": _int_list,
    "m": _float_list,
    "k": _float_list,
    "omega": float,
    "p": float,
    "gamma_db": parse_db_grid,
    "trials": int,
    "seed": int,
    "mode": _mode,
    "chunk_size": int,
    "confidence": float,
    "ber": _boolean,
    "output": Path,
}

_FIELDS = {"n": "n_elements", "nr": "n_branches"}
