from dataclasses import dataclass


@dataclass(kw_only=True, frozen=True)
class GaussianComponent:
    mean: float
    variance: float


@dataclass(kw_only=True, frozen=True)
class SskMoments:
    """Statistics of the SSK target-branch energy X = (W0 + W1)^2 + W2^2.

    ``a`` is the mean energy of every non-target branch.
    """

    mu1: float
    a: float
    b_sk: float
    c_sk: float

    def components(self) -> tuple[GaussianComponent, GaussianComponent]:
        return (
            GaussianComponent(mean=self.mu1, variance=self.b_sk + self.c_sk),
            GaussianComponent(mean=0.0, variance=self.c_sk),
        )


@dataclass(kw_only=True, frozen=True)
class RpmMoments:
    """Statistics of the SSK-RPM target-branch energy conditioned on the phase ``psi``."""

    psi: float
    mu_h1: float
    mu_h2: float
    a: float
    b_rp: float
    c_rp: float
    d_rp: float

    def components(self) -> tuple[GaussianComponent, GaussianComponent]:
        return (
            GaussianComponent(mean=self.mu_h1, variance=self.b_rp + self.c_rp),
            GaussianComponent(mean=self.mu_h2, variance=self.d_rp + self.c_rp),
        )


type QuadraticForm = SskMoments | RpmMoments
