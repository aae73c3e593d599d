"""Closed-form error probabilities of RIS-assisted SSK and SSK-RPM with greedy detection.

Every expression is evaluated through a statistic bundle (``SskMoments`` /
``RpmMoments``) and the factorised MGF of the target-branch energy:

    E[exp(-r X / a)],  X = U^2 + V^2,  U, V independent Gaussians,

which is what the printed closed forms reduce to term by term. The alternating
binomial sums over r are accumulated in extended precision so the result stays
accurate up to L = N_R - 1 = 64.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, assert_never

import mpmath

from ris_ssk.model import (
    DomainError,
    GaussianComponent,
    QuadraticForm,
    Rpm,
    RpmMoments,
    Scheme,
    Ssk,
    SskMoments,
    SystemConfig,
)
from ris_ssk.numerics import alternating_binomial_sum, gamma_ratio, signed_binomials

_GUARD_DIGITS = 20


@dataclass(kw_only=True, frozen=True)
class PedResult:
    value: float
    scheme: Scheme | None = None
    config: SystemConfig | None = None
    psi: float | None = None


@dataclass(kw_only=True, frozen=True)
class BerBound:
    value: float
    n_branches: int

    @property
    def vacuous(self) -> bool:
        # A bit error rate bound above one half says nothing a coin flip doesn't
        return self.value > 0.5


def ssk_moments(cfg: SystemConfig) -> SskMoments:
    m = cfg.channel.m
    ratio = gamma_ratio(m)
    g2m = ratio**2 / m
    power = cfg.n_elements * cfg.es * cfg.channel.omega
    return SskMoments(
        mu1=cfg.n_elements * ratio * math.sqrt(cfg.es * cfg.channel.omega / m),
        a=power + cfg.k**2 * power + cfg.n0,
        b_sk=power * (1.0 - g2m),
        c_sk=power * cfg.k**2 * (1.0 + g2m) / 2.0 + cfg.n0 / 2.0,
    )


def rpm_moments(cfg: SystemConfig, psi: float) -> RpmMoments:
    if not isinstance(cfg.scheme, Rpm):
        raise DomainError("RPM statistics require an RPM configuration")
    return _rotate(ssk_moments(cfg), psi)


def cf_quadratic_form(moments: QuadraticForm, s: float) -> float:
    """E[exp(s X)] on the nonpositive real axis (the CF at j*omega = s)."""
    if not s <= 0:
        raise DomainError(f"Quadratic-form MGF is evaluated for s <= 0, got {s!r}")
    ctx = _context(_GUARD_DIGITS)
    return float(_mgf(ctx, moments.components(), ctx.mpf(s)))


def pped_ssk(cfg: SystemConfig) -> PedResult:
    value = _alternating_ped([ssk_moments(cfg)], n_branches=2)
    return PedResult(value=value, scheme=Ssk(), config=cfg)


def ped_ssk(cfg: SystemConfig) -> PedResult:
    value = _alternating_ped([ssk_moments(cfg)], n_branches=cfg.n_branches)
    return PedResult(value=value, scheme=Ssk(), config=cfg)


def ped_ssk_high_snr(cfg: SystemConfig) -> PedResult:
    value = _alternating_ped([_high_snr_moments(cfg)], n_branches=cfg.n_branches)
    return PedResult(value=value, scheme=Ssk(), config=cfg)


def ped_ssk_low_snr(cfg: SystemConfig) -> PedResult:
    value = _alternating_ped([_low_snr_moments(cfg)], n_branches=cfg.n_branches)
    return PedResult(value=value, scheme=Ssk(), config=cfg)


def ped_zero_snr(n_branches: int) -> PedResult:
    if n_branches < 2:
        raise DomainError("Number of receive branches must be an integer not less than 2")
    order = n_branches - 1
    terms = [Fraction(c, r + 1) for r, c in enumerate(signed_binomials(order), start=1)]
    return PedResult(value=alternating_binomial_sum(terms))


def pped_rpm_conditional(cfg: SystemConfig, psi: float) -> PedResult:
    value = _alternating_ped([rpm_moments(cfg, psi)], n_branches=2)
    return PedResult(value=value, scheme=cfg.scheme, config=cfg, psi=psi)


def ped_rpm_conditional(cfg: SystemConfig, psi: float) -> PedResult:
    value = _alternating_ped([rpm_moments(cfg, psi)], n_branches=cfg.n_branches)
    return PedResult(value=value, scheme=cfg.scheme, config=cfg, psi=psi)


def ped_rpm(cfg: SystemConfig) -> PedResult:
    scheme = _rpm_scheme(cfg)
    forms = [rpm_moments(cfg, symbol.phase) for symbol in scheme.symbols()]
    value = _alternating_ped(forms, n_branches=cfg.n_branches)
    return PedResult(value=value, scheme=scheme, config=cfg)


def ped_rpm_high_snr(cfg: SystemConfig) -> PedResult:
    scheme = _rpm_scheme(cfg)
    limit = _high_snr_moments(cfg)
    forms = [_rotate(limit, symbol.phase) for symbol in scheme.symbols()]
    value = _alternating_ped(forms, n_branches=cfg.n_branches)
    return PedResult(value=value, scheme=scheme, config=cfg)


def ped_rpm_low_snr(cfg: SystemConfig) -> PedResult:
    scheme = _rpm_scheme(cfg)
    limit = _low_snr_moments(cfg)
    forms = [_rotate(limit, symbol.phase) for symbol in scheme.symbols()]
    value = _alternating_ped(forms, n_branches=cfg.n_branches)
    return PedResult(value=value, scheme=scheme, config=cfg)


def ped_rpm_zero_snr(n_branches: int) -> PedResult:
    # Independent of the constellation: both factors collapse to 1 / (r + 1)
    return ped_zero_snr(n_branches)


def ped(cfg: SystemConfig) -> PedResult:
    if isinstance(cfg.scheme, Ssk):
        return ped_ssk(cfg)
    elif isinstance(cfg.scheme, Rpm):
        return ped_rpm(cfg)
    else:
        assert_never(cfg.scheme)  # pragma: no cover


def ped_high_snr(cfg: SystemConfig) -> PedResult:
    if isinstance(cfg.scheme, Ssk):
        return ped_ssk_high_snr(cfg)
    elif isinstance(cfg.scheme, Rpm):
        return ped_rpm_high_snr(cfg)
    else:
        assert_never(cfg.scheme)  # pragma: no cover


def ped_low_snr(cfg: SystemConfig) -> PedResult:
    if isinstance(cfg.scheme, Ssk):
        return ped_ssk_low_snr(cfg)
    elif isinstance(cfg.scheme, Rpm):
        return ped_rpm_low_snr(cfg)
    else:
        assert_never(cfg.scheme)  # pragma: no cover


def ped_limit_zero_snr(cfg: SystemConfig) -> PedResult:
    if isinstance(cfg.scheme, Ssk):
        result = ped_zero_snr(cfg.n_branches)
    elif isinstance(cfg.scheme, Rpm):
        result = ped_rpm_zero_snr(cfg.n_branches)
    else:
        assert_never(cfg.scheme)  # pragma: no cover
    return PedResult(value=result.value, scheme=cfg.scheme, config=cfg)


def ber_union_bound(ped: float, n_branches: int) -> BerBound:
    if not 0.0 <= ped <= 1.0:
        raise DomainError(f"PED must be a probability in [0, 1], got {ped!r}")
    if n_branches < 2 or n_branches & (n_branches - 1):
        raise DomainError(
            f"Union-bound BER needs a power-of-2 number of branches, got {n_branches}"
        )
    return BerBound(value=n_branches / 2 * ped, n_branches=n_branches)


def _rpm_scheme(cfg: SystemConfig) -> Rpm:
    if not isinstance(cfg.scheme, Rpm):
        raise DomainError("RPM statistics require an RPM configuration")
    return cfg.scheme


def _rotate(moments: SskMoments, psi: float) -> RpmMoments:
    sin, cos = math.sin(psi), math.cos(psi)
    return RpmMoments(
        psi=psi,
        mu_h1=moments.mu1 * sin,
        mu_h2=moments.mu1 * cos,
        a=moments.a,
        b_rp=moments.b_sk * sin**2,
        c_rp=moments.c_sk,
        d_rp=moments.b_sk * cos**2,
    )


def _high_snr_moments(cfg: SystemConfig) -> SskMoments:
    # Statistics divided by N * Es * Omega with N0 -> 0: the PED floor
    m = cfg.channel.m
    ratio = gamma_ratio(m)
    g2m = ratio**2 / m
    return SskMoments(
        mu1=math.sqrt(cfg.n_elements) * ratio / math.sqrt(m),
        a=1.0 + cfg.k**2,
        b_sk=1.0 - g2m,
        c_sk=cfg.k**2 * (1.0 + g2m) / 2.0,
    )


def _low_snr_moments(cfg: SystemConfig) -> SskMoments:
    # Terms of order N * Gamma_av dropped against N0; the mean stays
    exact = ssk_moments(cfg)
    return SskMoments(mu1=exact.mu1, a=cfg.n0, b_sk=0.0, c_sk=cfg.n0 / 2.0)


def _alternating_ped(forms: Sequence[QuadraticForm], n_branches: int) -> float:
    """1 - E[(1 - exp(-X / a))^L], averaged over ``forms``.

    Expanded as sum_{r=1}^{L} (-1)^(r-1) C(L, r) E[exp(-r X / a)]; the terms are
    summed by ``fsum`` in the extended-precision context.
    """
    coefficients = signed_binomials(n_branches - 1)
    digits = _GUARD_DIGITS + len(str(max(abs(c) for c in coefficients)))
    ctx = _context(digits)
    weight = ctx.mpf(1) / len(forms)
    terms = []
    for r, coefficient in enumerate(coefficients, start=1):
        average = ctx.mpf(0)
        for form in forms:
            average += _mgf(ctx, form.components(), -ctx.mpf(r) / ctx.mpf(form.a))
        terms.append(coefficient * weight * average)
    value = float(ctx.fsum(terms))
    return min(max(value, 0.0), 1.0)


def _mgf(ctx: Any, components: Sequence[GaussianComponent], s: Any) -> Any:
    # E[exp(s U^2)] = exp(s mu^2 / (1 - 2 s sigma^2)) / sqrt(1 - 2 s sigma^2)
    exponent = ctx.mpf(0)
    denominator = ctx.mpf(1)
    for component in components:
        spread = 1 - 2 * s * ctx.mpf(component.variance)
        exponent += s * ctx.mpf(component.mean) ** 2 / spread
        denominator *= spread
    return ctx.exp(exponent) / ctx.sqrt(denominator)


@lru_cache(maxsize=16)
def _context(digits: int) -> Any:
    ctx = mpmath.MPContext()
    ctx.dps = digits
    return ctx
