from .analytic import BerBound, PedResult, ber_union_bound, ped, ped_high_snr, ped_low_snr
from .montecarlo import McConfig, McEstimate, estimate_ped_exact, estimate_ped_surrogate
from .model import NakagamiParams, Rpm, Ssk, SystemConfig

__all__ = [
    "BerBound",
    "McConfig",
    "McEstimate",
    "NakagamiParams",
    "PedResult",
    "Rpm",
    "Ssk",
    "SystemConfig",
    "ber_union_bound",
    "estimate_ped_exact",
    "estimate_ped_surrogate",
    "ped",
    "ped_high_snr",
    "ped_low_snr",
]
