import math
from dataclasses import dataclass, field

from ris_ssk.model.error import DomainError


def _is_positive_finite(value: float) -> bool:
    return math.isfinite(value) and value > 0


def _is_power_of_two(value: int) -> bool:
    return value > 0 and value & (value - 1) == 0


@dataclass(kw_only=True, frozen=True)
class NakagamiParams:
    m: float
    omega: float = 1.0
    p: float = 0.0

    def __post_init__(self) -> None:
        if not _is_positive_finite(self.m):
            raise DomainError("Nakagami shape 'm' must be a positive finite number")
        if not _is_positive_finite(self.omega):
            raise DomainError("Nakagami spread 'omega' must be a positive finite number")
        # Both component Gamma shapes (1 +/- p) m / 2 must stay positive
        if not -1.0 < self.p < 1.0:
            raise DomainError("Power balance 'p' must lie in the open interval (-1, 1)")

    @property
    def in_phase_shape(self) -> float:
        return (1.0 + self.p) * self.m / 2.0

    @property
    def quadrature_shape(self) -> float:
        return (1.0 - self.p) * self.m / 2.0

    @property
    def component_scale(self) -> float:
        return self.omega / self.m


@dataclass(kw_only=True, frozen=True)
class Ssk:
    @property
    def label(self) -> str:
        return "ssk"


@dataclass(kw_only=True, frozen=True)
class Rpm:
    order: int

    def __post_init__(self) -> None:
        if isinstance(self.order, bool) or not isinstance(self.order, int):
            raise DomainError("RPM constellation order must be an integer")
        if self.order < 2 or not _is_power_of_two(self.order):
            raise DomainError("RPM constellation order must be a power of 2 not less than 2")

    @property
    def label(self) -> str:
        return f"rpm-{self.order}"

    def symbols(self) -> list["RpmSymbol"]:
        return [RpmSymbol(index=n, order=self.order) for n in range(1, self.order + 1)]


type Scheme = Ssk | Rpm


def parse_scheme(text: str) -> Scheme:
    name = text.strip().lower()
    if name == "ssk":
        return Ssk()
    if name.startswith("rpm-"):
        try:
            order = int(name.removeprefix("rpm-"))
        except ValueError:
            raise DomainError(f"Unknown modulation scheme {text!r}") from None
        return Rpm(order=order)
    raise DomainError(f"Unknown modulation scheme {text!r}")


@dataclass(kw_only=True, frozen=True)
class RpmSymbol:
    index: int
    order: int

    def __post_init__(self) -> None:
        if not 1 <= self.index <= self.order:
            raise DomainError(
                f"RPM symbol index must lie in 1..{self.order}, got {self.index}"
            )

    @property
    def phase(self) -> float:
        return 2.0 * math.pi * (self.index - 1) / self.order


@dataclass(kw_only=True, frozen=True)
class SystemConfig:
    n_elements: int
    n_branches: int
    es: float
    n0: float = 1.0
    k: float = 0.0
    scheme: Scheme = field(default_factory=Ssk)
    channel: NakagamiParams = field(default_factory=lambda: NakagamiParams(m=1.0))

    def __post_init__(self) -> None:
        if isinstance(self.n_elements, bool) or not isinstance(self.n_elements, int):
            raise DomainError("Number of RIS elements must be a positive integer")
        if self.n_elements < 1:
            raise DomainError("Number of RIS elements must be a positive integer")
        if isinstance(self.n_branches, bool) or not isinstance(self.n_branches, int):
            raise DomainError("Number of receive branches must be an integer not less than 2")
        if self.n_branches < 2:
            raise DomainError("Number of receive branches must be an integer not less than 2")
        if not math.isfinite(self.es) or self.es < 0:
            raise DomainError("Symbol energy 'es' must be a nonnegative finite number")
        if not _is_positive_finite(self.n0):
            raise DomainError("Noise density 'n0' must be a positive finite number")
        if not 0.0 <= self.k <= 1.0:
            raise DomainError("Impairment level 'k' must lie in [0, 1]")

    @classmethod
    def from_gamma(
        cls,
        gamma_av: float,
        *,
        n_elements: int,
        n_branches: int,
        k: float = 0.0,
        scheme: Scheme | None = None,
        channel: NakagamiParams | None = None,
        n0: float = 1.0,
    ) -> "SystemConfig":
        if not math.isfinite(gamma_av) or gamma_av < 0:
            raise DomainError("Average SNR must be a nonnegative finite number")
        channel = channel if channel is not None else NakagamiParams(m=1.0)
        return cls(
            n_elements=n_elements,
            n_branches=n_branches,
            es=gamma_av * n0 / channel.omega,
            n0=n0,
            k=k,
            scheme=scheme if scheme is not None else Ssk(),
            channel=channel,
        )

    @classmethod
    def from_snr_db(
        cls,
        snr_db: float,
        *,
        n_elements: int,
        n_branches: int,
        k: float = 0.0,
        scheme: Scheme | None = None,
        channel: NakagamiParams | None = None,
        n0: float = 1.0,
    ) -> "SystemConfig":
        return cls.from_gamma(
            10.0 ** (snr_db / 10.0),
            n_elements=n_elements,
            n_branches=n_branches,
            k=k,
            scheme=scheme,
            channel=channel,
            n0=n0,
        )

    @property
    def gamma_av(self) -> float:
        return self.es * self.channel.omega / self.n0

    @property
    def n_interferers(self) -> int:
        return self.n_branches - 1
