"""Normal and binomial quantiles used by the decision rules."""

from __future__ import annotations

import math

from .errors import DomainError

_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)

# Acklam's rational approximation to the inverse normal cdf (relative error 1.15e-9),
# refined below by one Halley step.
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425

# above this binomial variance the exact sum is replaced by the normal approximation
BINOMIAL_EXACT_VARIANCE_LIMIT = 1e6


def norm_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / _SQRT2)


def norm_sf(x: float) -> float:
    return 0.5 * math.erfc(x / _SQRT2)


def _acklam(p: float) -> float:
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        return (((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / \
            ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)
    if p > 1.0 - _P_LOW:
        q = math.sqrt(-2.0 * math.log1p(-p))
        return -(((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / \
            ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)
    q = p - 0.5
    r = q * q
    return (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q / \
        (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0)


def norm_ppf(p: float) -> float:
    """Inverse of the standard normal cdf on the open interval (0, 1)."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"probability must lie in (0, 1), got {p!r}")
    if p == 0.5:
        return 0.0
    x = _acklam(p)
    # Halley step; the residual is taken on the smaller tail to keep precision
    if x < 0:
        e = norm_cdf(x) - p
    else:
        e = (1.0 - p) - norm_sf(x)
    u = e * _SQRT2PI * math.exp(0.5 * x * x)
    return x - u / (1.0 + 0.5 * x * u)


def z_quantile(alpha: float) -> float:
    """Return z_alpha, the (1 - alpha)-quantile of the standard normal.

    Computed as ``-norm_ppf(alpha)`` so that small ``alpha`` keeps full
    relative precision.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    return -norm_ppf(alpha)


def _binomial_pmf_window(m: int, q: float) -> tuple[int, list[float]]:
    """Binomial(m, q) probabilities over the range holding all non-negligible mass.

    Starts at the mode (computed through lgamma) and walks outwards with the
    term recurrence, so nothing underflows for large ``m``.
    """
    mode = min(m, int(math.floor((m + 1) * q)))
    log_pmf = (math.lgamma(m + 1) - math.lgamma(mode + 1) - math.lgamma(m - mode + 1)
               + mode * math.log(q) + (m - mode) * math.log1p(-q))
    ratio = q / (1.0 - q)
    peak = math.exp(log_pmf)
    tiny = peak * 1e-30

    upper = [peak]
    term, k = peak, mode
    while k < m:
        term *= (m - k) / (k + 1) * ratio
        k += 1
        if term < tiny:
            break
        upper.append(term)

    lower = []
    term, k = peak, mode
    while k > 0:
        term *= k / (m - k + 1) / ratio
        k -= 1
        if term < tiny:
            break
        lower.append(term)
    lower.reverse()
    return mode - len(lower), lower + upper


def binomial_quantile(m: int, q: float, alpha: float) -> int:
    """Smallest integer k with P(Binomial(m, q) <= k) >= 1 - alpha.

    The comparison is made on the upper tail, P(X > k) <= alpha, which is
    summed from the small terms up. For binomial variance above
    ``BINOMIAL_EXACT_VARIANCE_LIMIT`` a continuity-corrected normal
    approximation is used instead.
    """
    if m < 0:
        raise DomainError(f"m must be nonnegative, got {m}")
    if not 0.0 <= q <= 1.0:
        raise DomainError(f"q must lie in [0, 1], got {q!r}")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    if q == 0.0 or m == 0:
        return 0
    if q == 1.0:
        return m
    var = m * q * (1.0 - q)
    if var > BINOMIAL_EXACT_VARIANCE_LIMIT:
        k = math.ceil(m * q + z_quantile(alpha) * math.sqrt(var) - 0.5)
        return min(max(k, 0), m)

    start, pmf = _binomial_pmf_window(m, q)
    total = math.fsum(pmf)
    tail = 0.0
    # walk down from the top: after processing index j, tail = P(X >= start + j)
    for j in range(len(pmf) - 1, -1, -1):
        new_tail = tail + pmf[j]
        if new_tail / total > alpha:
            # P(X > start + j) <= alpha but P(X > start + j - 1) > alpha
            return start + j
        tail = new_tail
    return start
