from collections.abc import Callable

import pytest

from ris_ssk import validation
from ris_ssk.validation import CheckResult, run_checks


def _budget(quick: bool = True) -> validation._Budget:
    return validation._Budget(quick=quick, workers=1)


def test_budget_scales_with_quick_flag() -> None:
    assert _budget(quick=True).trials == 100_000
    assert _budget(quick=False).trials == 1_000_000
    assert _budget(quick=True).grid_points == 50
    assert _budget(quick=False).grid_points == 500


def test_run_checks_runs_every_check_in_order(monkeypatch: pytest.MonkeyPatch) -> None:
    seen = []

    def check(name: str) -> Callable[[validation._Budget], CheckResult]:
        def run(budget: validation._Budget) -> CheckResult:
            seen.append((name, budget.quick, budget.workers))
            return CheckResult(name=name, passed=name != "b", detail="")

        return run

    monkeypatch.setattr(validation, "_CHECKS", (check("a"), check("b"), check("c")))

    results = run_checks(quick=True, workers=2)

    assert seen == [("a", True, 2), ("b", True, 2), ("c", True, 2)]
    assert [r.passed for r in results] == [True, False, True]


@pytest.mark.parametrize(
    "check",
    [
        validation._binomial_identity,
        validation._pairwise_reduction,
        validation._limit_consistency,
        validation._impairment_behaviour,
    ],
)
def test_analytic_checks_pass(check: Callable[[validation._Budget], CheckResult]) -> None:
    result = check(_budget())

    assert result.passed, result.detail


def test_quadrature_check_passes() -> None:
    result = validation._mgf_quadrature(_budget())

    assert result.name == "mgf-vs-quadrature"
    assert result.passed, result.detail


class _Offset:
    def __init__(self, z: float) -> None:
        self.z = z

    def z_score(self, value: float) -> float:
        return self.z


@pytest.mark.parametrize(("z_small", "z_large", "passed"), [(6.0, 1.0, True), (1.0, 4.5, False)])
def test_exact_agreement_reports_small_surfaces(
    monkeypatch: pytest.MonkeyPatch, z_small: float, z_large: float, passed: bool
) -> None:
    grid = []

    def fake_estimate(cfg: object, mc: object, *, workers: int) -> _Offset:
        grid.append((cfg.n_elements, cfg.n_branches))  # type: ignore[attr-defined]
        return _Offset(z_small if cfg.n_elements == 16 else z_large)  # type: ignore[attr-defined]

    monkeypatch.setattr(validation, "estimate_ped", fake_estimate)

    result = validation._exact_agreement(_budget())

    assert sorted(set(grid)) == [(n, nr) for n in (16, 32, 64) for nr in (2, 4)]
    assert result.passed is passed
    assert ("CLT gap at N=16" in result.detail) is (z_small >= 4.0)
