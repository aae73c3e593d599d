import math

import numpy as np
import pytest

from ris_ssk.analytic import (
    BerBound,
    PedResult,
    ber_union_bound,
    cf_quadratic_form,
    ped,
    ped_high_snr,
    ped_limit_zero_snr,
    ped_low_snr,
    ped_rpm,
    ped_rpm_conditional,
    ped_rpm_high_snr,
    ped_rpm_low_snr,
    ped_rpm_zero_snr,
    ped_ssk,
    ped_ssk_high_snr,
    ped_ssk_low_snr,
    ped_zero_snr,
    pped_rpm_conditional,
    pped_ssk,
    rpm_moments,
    ssk_moments,
)
from ris_ssk.model import (
    BinomialOverflowError,
    DomainError,
    NakagamiParams,
    Rpm,
    Scheme,
    Ssk,
    SskMoments,
    SystemConfig,
)


def _cfg(
    gamma: float,
    *,
    n: int = 32,
    n_branches: int = 2,
    m: float = 1.0,
    k: float = 0.0,
    scheme: Scheme | None = None,
) -> SystemConfig:
    return SystemConfig.from_gamma(
        gamma,
        n_elements=n,
        n_branches=n_branches,
        k=k,
        scheme=scheme,
        channel=NakagamiParams(m=m),
    )


def test_ssk_moments_single_element() -> None:
    cfg = SystemConfig(n_elements=1, n_branches=2, es=1.0)
    moments = ssk_moments(cfg)

    assert moments.a == pytest.approx(2.0)
    assert moments.b_sk == pytest.approx(1 - math.pi / 4)
    assert moments.c_sk == pytest.approx(0.5)
    assert moments.mu1 == pytest.approx(math.sqrt(math.pi) / 2)


def test_ssk_moments_without_signal() -> None:
    moments = ssk_moments(SystemConfig(n_elements=16, n_branches=2, es=0.0, n0=3.0, k=0.2))

    assert moments == SskMoments(mu1=0.0, a=3.0, b_sk=0.0, c_sk=1.5)


def test_ssk_moments_noise_density_is_additive() -> None:
    base = ssk_moments(SystemConfig(n_elements=16, n_branches=2, es=2.0, n0=1.0, k=0.1))
    doubled = ssk_moments(SystemConfig(n_elements=16, n_branches=2, es=2.0, n0=2.0, k=0.1))

    assert doubled.a == pytest.approx(base.a + 1.0)
    assert doubled.c_sk == pytest.approx(base.c_sk + 0.5)
    assert doubled.mu1 == base.mu1
    assert doubled.b_sk == base.b_sk


def test_ssk_moments_impairment_terms() -> None:
    cfg = SystemConfig(n_elements=10, n_branches=2, es=2.0, n0=1.0, k=0.3)
    moments = ssk_moments(cfg)
    g2m = math.pi / 4

    assert moments.a == pytest.approx(10 * 2 * (1 + 0.09) + 1)
    assert moments.c_sk == pytest.approx(10 * 0.09 * 2 * (1 + g2m) / 2 + 0.5)


def test_rpm_moments_zero_phase_puts_signal_in_second_component() -> None:
    cfg = _cfg(1.0, scheme=Rpm(order=4), k=0.1)
    moments = rpm_moments(cfg, 0.0)
    reference = ssk_moments(cfg)

    assert moments.mu_h1 == 0.0
    assert moments.b_rp == 0.0
    assert moments.mu_h2 == pytest.approx(reference.mu1)
    assert moments.d_rp == pytest.approx(reference.b_sk)
    assert moments.c_rp == reference.c_sk


def test_rpm_moments_quarter_phase_is_balanced() -> None:
    moments = rpm_moments(_cfg(1.0, scheme=Rpm(order=8)), math.pi / 4)

    assert moments.mu_h1 == pytest.approx(moments.mu_h2)
    assert moments.b_rp == pytest.approx(moments.d_rp)


@pytest.mark.parametrize("psi", [0.1, 0.7, 2.0, 4.5])
def test_rpm_moments_invariants(psi: float) -> None:
    cfg = _cfg(3.0, scheme=Rpm(order=4), k=0.2, m=2.0)
    moments = rpm_moments(cfg, psi)
    swapped = rpm_moments(cfg, math.pi / 2 - psi)
    reference = ssk_moments(cfg)

    assert moments.mu_h1**2 + moments.mu_h2**2 == pytest.approx(reference.mu1**2)
    assert moments.b_rp + moments.d_rp == pytest.approx(reference.b_sk)
    assert abs(swapped.mu_h1) == pytest.approx(abs(moments.mu_h2))
    assert swapped.b_rp == pytest.approx(moments.d_rp)


def test_rpm_moments_require_rpm_configuration() -> None:
    with pytest.raises(DomainError) as exc_info:
        rpm_moments(_cfg(1.0), 0.0)

    assert str(exc_info.value) == "RPM statistics require an RPM configuration"


def test_cf_at_origin_is_one() -> None:
    assert cf_quadratic_form(ssk_moments(_cfg(5.0, k=0.1)), 0.0) == 1.0


def test_cf_of_central_form_is_pure_variance_factor() -> None:
    moments = SskMoments(mu1=0.0, a=1.0, b_sk=0.75, c_sk=0.5)
    s = -0.4

    expected = 1 / math.sqrt((1 - 2 * s * 1.25) * (1 - 2 * s * 0.5))
    assert cf_quadratic_form(moments, s) == pytest.approx(expected, rel=1e-15)


def test_cf_rejects_positive_argument() -> None:
    with pytest.raises(DomainError) as exc_info:
        cf_quadratic_form(ssk_moments(_cfg(1.0)), 0.5)

    assert str(exc_info.value) == "Quadratic-form MGF is evaluated for s <= 0, got 0.5"


def test_pped_ssk_zero_snr_is_coin_flip() -> None:
    assert pped_ssk(_cfg(0.0, k=0.1)).value == pytest.approx(0.5, abs=1e-15)


def test_pped_ssk_high_snr_floor_value() -> None:
    cfg = _cfg(1e6, n=32, m=1.0, k=0.0)

    assert pped_ssk(cfg).value == pytest.approx(1.93e-8, rel=5e-3)
    assert pped_ssk(cfg).value == pytest.approx(ped_ssk_high_snr(cfg).value, rel=1e-3)


def test_ped_result_echoes_inputs() -> None:
    cfg = _cfg(1.0)
    result = ped_ssk(cfg)

    assert result.scheme == Ssk()
    assert result.config == cfg
    assert result.psi is None


@pytest.mark.parametrize("n", [8, 32, 128])
@pytest.mark.parametrize("m", [0.5, 1.0, 2.0, 4.0])
@pytest.mark.parametrize("k", [0.0, 0.1, 0.3])
def test_general_ped_reduces_to_pairwise(n: int, m: float, k: float) -> None:
    for gamma in np.logspace(-4, 6, 11):
        cfg = _cfg(float(gamma), n=n, m=m, k=k)

        assert ped_ssk(cfg).value == pytest.approx(pped_ssk(cfg).value, rel=1e-14)


@pytest.mark.parametrize("n_branches", [2, 3, 4, 8, 17, 65])
def test_zero_snr_limit_is_exact(n_branches: int) -> None:
    order = n_branches - 1
    expected = order / (order + 1)

    assert ped_ssk(_cfg(0.0, n_branches=n_branches, k=0.1)).value == pytest.approx(
        expected, abs=1e-12
    )
    assert ped_rpm(_cfg(0.0, n_branches=n_branches, scheme=Rpm(order=4))).value == (
        pytest.approx(expected, abs=1e-12)
    )
    assert ped_zero_snr(n_branches).value == pytest.approx(expected, abs=1e-15)
    assert ped_rpm_zero_snr(n_branches).value == ped_zero_snr(n_branches).value


def test_zero_snr_known_values() -> None:
    assert ped_zero_snr(2).value == 0.5
    assert ped_zero_snr(4).value == 0.75
    assert ped_rpm_zero_snr(4).value == 0.75


def test_zero_snr_needs_two_branches() -> None:
    with pytest.raises(DomainError) as exc_info:
        ped_zero_snr(1)

    assert str(exc_info.value) == "Number of receive branches must be an integer not less than 2"


def _direct_ped(moments: SskMoments, n_branches: int, nodes: int = 160) -> float:
    # 1 - E[(1 - exp(-X / a))^L] on a product Gauss-Hermite grid, no binomial expansion
    knots, weights = np.polynomial.hermite.hermgauss(nodes)
    z, w = knots * math.sqrt(2.0), weights / math.sqrt(math.pi)
    first, second = moments.components()
    u = first.mean + math.sqrt(first.variance) * z
    v = second.mean + math.sqrt(second.variance) * z
    energy = u[:, None] ** 2 + v[None, :] ** 2
    below = (-np.expm1(-energy / moments.a)) ** (n_branches - 1)
    return 1.0 - float(w @ below @ w)


@pytest.mark.parametrize("n_branches", [17, 33, 65])
@pytest.mark.parametrize("gamma", [0.01, 0.05, 0.2])
def test_general_ped_keeps_precision_for_many_branches(n_branches: int, gamma: float) -> None:
    cfg = _cfg(gamma, n=16, n_branches=n_branches, k=0.1)

    assert ped_ssk(cfg).value == pytest.approx(
        _direct_ped(ssk_moments(cfg), n_branches), abs=1e-9
    )


def test_general_ped_beyond_exact_binomials() -> None:
    with pytest.raises(BinomialOverflowError):
        ped_ssk(_cfg(1.0, n_branches=66))


@pytest.mark.parametrize("scheme", [Ssk(), Rpm(order=4), Rpm(order=8)])
@pytest.mark.parametrize("n_branches", [2, 4])
@pytest.mark.parametrize("m", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("k", [0.0, 0.1, 0.3])
def test_high_snr_limit_consistency(scheme: Scheme, n_branches: int, m: float, k: float) -> None:
    cfg = _cfg(1e6, n=32, n_branches=n_branches, m=m, k=k, scheme=scheme)

    assert ped(cfg).value == pytest.approx(ped_high_snr(cfg).value, rel=1e-3)


@pytest.mark.parametrize("scheme", [Ssk(), Rpm(order=8)])
@pytest.mark.parametrize("n_branches", [2, 4])
@pytest.mark.parametrize("n", [4, 8])
@pytest.mark.parametrize("k", [0.0, 0.3])
def test_low_snr_limit_consistency(scheme: Scheme, n_branches: int, n: int, k: float) -> None:
    cfg = _cfg(1e-4, n=n, n_branches=n_branches, k=k, scheme=scheme)

    assert ped(cfg).value == pytest.approx(ped_low_snr(cfg).value, rel=1e-3)


def test_dispatchers_follow_scheme() -> None:
    ssk = _cfg(0.5, n_branches=4, k=0.1)
    rpm = _cfg(0.5, n_branches=4, k=0.1, scheme=Rpm(order=4))

    assert ped(ssk) == ped_ssk(ssk)
    assert ped(rpm) == ped_rpm(rpm)
    assert ped_high_snr(ssk) == ped_ssk_high_snr(ssk)
    assert ped_high_snr(rpm) == ped_rpm_high_snr(rpm)
    assert ped_low_snr(ssk) == ped_ssk_low_snr(ssk)
    assert ped_low_snr(rpm) == ped_rpm_low_snr(rpm)
    assert ped_limit_zero_snr(rpm) == PedResult(value=0.75, scheme=Rpm(order=4), config=rpm)


def test_rpm_ped_requires_rpm_configuration() -> None:
    with pytest.raises(DomainError) as exc_info:
        ped_rpm(_cfg(1.0))

    assert str(exc_info.value) == "RPM statistics require an RPM configuration"


def test_pped_rpm_zero_snr_is_coin_flip() -> None:
    cfg = _cfg(0.0, scheme=Rpm(order=4), k=0.2)

    for psi in (0.0, 0.4, math.pi / 2, 2.5):
        assert pped_rpm_conditional(cfg, psi).value == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize("psi", [0.0, 0.3, 1.1])
def test_pped_rpm_swap_symmetry(psi: float) -> None:
    cfg = _cfg(0.2, scheme=Rpm(order=4), k=0.1)

    assert pped_rpm_conditional(cfg, psi).value == pytest.approx(
        pped_rpm_conditional(cfg, math.pi / 2 - psi).value, rel=1e-12
    )


def test_pped_rpm_conditional_echoes_phase() -> None:
    cfg = _cfg(0.2, scheme=Rpm(order=4))

    assert pped_rpm_conditional(cfg, 0.5).psi == 0.5


def test_pairwise_rpm_is_average_of_conditionals() -> None:
    cfg = _cfg(0.05, n=16, scheme=Rpm(order=4), k=0.1)
    conditional = [pped_rpm_conditional(cfg, s.phase).value for s in Rpm(order=4).symbols()]

    assert ped_rpm(cfg).value == pytest.approx(sum(conditional) / 4, rel=1e-14)


def test_general_rpm_conditional_reduces_to_pairwise() -> None:
    cfg = _cfg(0.05, n=16, scheme=Rpm(order=8), k=0.1)

    assert ped_rpm_conditional(cfg, 0.7).value == pytest.approx(
        pped_rpm_conditional(cfg, 0.7).value, rel=1e-14
    )


def test_ideal_hardware_is_continuous_in_k() -> None:
    for scheme in (Ssk(), Rpm(order=4)):
        ideal = ped(_cfg(10.0, n_branches=4, scheme=scheme)).value
        nearly = ped(_cfg(10.0, n_branches=4, k=1e-15, scheme=scheme)).value

        assert nearly == pytest.approx(ideal, rel=1e-10)


@pytest.mark.parametrize("scheme", [Ssk(), Rpm(order=2), Rpm(order=8)])
@pytest.mark.parametrize("n_branches", [2, 4])
def test_ped_is_non_increasing_and_bounded(scheme: Scheme, n_branches: int) -> None:
    values = [
        ped(_cfg(float(gamma), n_branches=n_branches, k=0.1, scheme=scheme)).value
        for gamma in np.logspace(-4, 6, 41)
    ]
    order = n_branches - 1

    assert all(a >= b for a, b in zip(values, values[1:]))
    assert all(0 < v <= order / (order + 1) for v in values)


def test_impairment_sets_high_snr_floor() -> None:
    levels = (0.0, 0.01, 0.1, 0.2)
    high = [ped(_cfg(1e6, k=k)).value for k in levels]
    low = [ped(_cfg(1e-4, k=k)).value for k in levels]

    assert all(a < b for a, b in zip(high, high[1:]))
    assert (max(low) - min(low)) / min(low) < 1e-2


@pytest.mark.parametrize(("value", "n_branches", "expected"), [(0.1, 4, 0.2), (0.0, 8, 0.0)])
def test_ber_union_bound(value: float, n_branches: int, expected: float) -> None:
    bound = ber_union_bound(value, n_branches)

    assert bound == BerBound(value=pytest.approx(expected), n_branches=n_branches)
    assert not bound.vacuous


def test_ber_union_bound_flags_vacuous_values() -> None:
    bound = ber_union_bound(0.75, 4)

    assert bound.value == 1.5
    assert bound.vacuous


def test_ber_union_bound_requires_power_of_two() -> None:
    with pytest.raises(DomainError) as exc_info:
        ber_union_bound(0.1, 3)

    assert str(exc_info.value) == "Union-bound BER needs a power-of-2 number of branches, got 3"


def test_ber_union_bound_requires_probability() -> None:
    with pytest.raises(DomainError) as exc_info:
        ber_union_bound(1.5, 2)

    assert str(exc_info.value) == "PED must be a probability in [0, 1], got 1.5"


def test_ber_decreases_then_saturates_in_m() -> None:
    shapes = (1.0, 2.0, 4.0, 8.0, 16.0, 32.0)
    bounds = [
        ber_union_bound(ped(_cfg(1e6, n_branches=4, m=m, k=0.1)).value, 4).value for m in shapes
    ]
    steps = [math.log(a / b) for a, b in zip(bounds, bounds[1:])]

    assert all(step > 0 for step in steps)
    assert all(a > b for a, b in zip(steps, steps[1:]))
