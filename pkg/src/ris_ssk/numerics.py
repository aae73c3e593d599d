import math
from collections.abc import Iterable
from fractions import Fraction
from functools import lru_cache

from scipy.special import gammaln

from ris_ssk.model import BinomialOverflowError, DomainError

# Largest L = N_R - 1 whose alternating sums are evaluated; C(64, 32) ~ 1.8e18
MAX_BINOMIAL_ORDER = 64


@lru_cache(maxsize=1024)
def gamma_ratio(m: float) -> float:
    """Return G = Gamma(m + 1/2) / Gamma(m) via a log-gamma difference."""
    if not math.isfinite(m) or m <= 0:
        raise DomainError(f"Gamma ratio requires a positive finite shape, got {m!r}")
    return math.exp(float(gammaln(m + 0.5)) - float(gammaln(m)))


def binomial(n: int, r: int) -> int:
    if n < 0 or r < 0:
        raise DomainError(f"Binomial arguments must be nonnegative, got ({n}, {r})")
    if r > n:
        raise DomainError(f"Binomial index {r} exceeds order {n}")
    if n > MAX_BINOMIAL_ORDER:
        raise BinomialOverflowError(
            f"Binomial order {n} exceeds the exact-sum limit of {MAX_BINOMIAL_ORDER}"
        )
    return math.comb(n, r)


def signed_binomials(order: int) -> list[int]:
    """Coefficients (-1)^(r-1) C(L, r) for r = 1..L, in ascending r."""
    return [(-1) ** (r - 1) * binomial(order, r) for r in range(1, order + 1)]


def alternating_binomial_sum(terms: Iterable[float] | Iterable[Fraction]) -> float:
    """Neumaier-compensated sum in the given (ascending r) order.

    Floats get the running error correction; Fractions sum exactly. Extended-precision
    terms are summed by their own context instead.
    """
    total: float | Fraction = 0
    compensation: float | Fraction = 0
    for term in terms:
        partial = total + term
        if abs(total) >= abs(term):
            compensation += (total - partial) + term
        else:
            compensation += (term - partial) + total
        total = partial
    return float(total + compensation)
