"""Chi-distribution kernel: density constant, tail integrals, moments, and the
cubic tail transform.

Everything is parameterized by a real degree r > 0 (integer r gives the
classical chi distribution, the square root of a chi-squared variable). The
workhorse is the unnormalized tail

    q_r(u) = integral over s > max(u, 0) of s^(r-1) exp(-s^2/2) ds,

which equals 2^((r-2)/2) * Gamma(r/2, u^2/2) for u >= 0 and is evaluated
through the regularized upper incomplete gamma function, never by quadrature.
The cubic tail transform

    gamma3_r(t) = integral over s > max(t, 0) of (s-t)^3 s^(r-1) exp(-s^2/2) ds

and its low derivatives expand by the binomial theorem into q_(r+k) terms.
Every tail quantity carries a log-space twin that switches to a dedicated
evaluation (continued fraction for log q, tilted asymptotic series for
log gamma3) once the plain value would underflow below ~1e-300.

Accuracy notes: q_r is accurate to ~1e-13 relative wherever it is
representable. The binomial expansion of gamma3 cancels like t^7/6 for large
positive t, so its relative error grows to ~1e-6 near the underflow boundary
(t around 35); all consumers in this package stay below t ~ 20 where the
error is under 1e-7.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import optimize
from scipy import special as sc

from .errors import DomainError

_LN2 = math.log(2.0)
_SQRT_2PI = math.sqrt(2.0 * math.pi)

# Plain values below this switch consumers to the log-space twins.
UNDERFLOW_FLOOR = 1e-300


def _check_degree(r: float) -> float:
    r = float(r)
    if not (math.isfinite(r) and r > 0.0):
        raise DomainError(f"degree must be a positive real, got {r!r}")
    return r


def log_norm_const(r: float) -> float:
    """log C_r for the chi density C_r u^(r-1) exp(-u^2/2) on u > 0."""
    r = _check_degree(r)
    return -((0.5 * r - 1.0) * _LN2 + math.lgamma(0.5 * r))


def norm_const(r: float) -> float:
    """Normalizing constant C_r = 1 / (2^((r-2)/2) Gamma(r/2))."""
    return math.exp(log_norm_const(r))


def tail_q(r: float, u: float) -> float:
    """Unnormalized tail q_r(u); constant q_r(0) for u <= 0."""
    r = _check_degree(r)
    u = float(u)
    s = 0.5 * r
    if u <= 0.0:
        return math.exp((s - 1.0) * _LN2 + math.lgamma(s))
    x = 0.5 * u * u
    return math.exp((s - 1.0) * _LN2 + math.lgamma(s)) * float(sc.gammaincc(s, x))


def _log_upper_gamma_cf(s: float, x: float) -> float:
    """log Gamma(s, x) by the Legendre continued fraction (modified Lentz).

    Only used for x large enough that the regularized tail underflows, where
    x > s + 1 is guaranteed and convergence takes a handful of terms.
    """
    tiny = 1e-300
    b = x + 1.0 - s
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 500):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return -x + s * math.log(x) + math.log(h)


def log_tail_q(r: float, u: float) -> float:
    """log q_r(u), valid even where tail_q underflows."""
    r = _check_degree(r)
    u = float(u)
    s = 0.5 * r
    base = (s - 1.0) * _LN2 + math.lgamma(s)
    if u <= 0.0:
        return base
    x = 0.5 * u * u
    reg = float(sc.gammaincc(s, x))
    if reg > UNDERFLOW_FLOOR:
        return base + math.log(reg)
    return (s - 1.0) * _LN2 + _log_upper_gamma_cf(s, x)


def survival(r: float, u: float) -> float:
    """P(chi_r >= u) = q_r(u) / q_r(0); equals 1 for u <= 0."""
    r = _check_degree(r)
    u = float(u)
    if u <= 0.0:
        return 1.0
    return float(sc.gammaincc(0.5 * r, 0.5 * u * u))


def log_survival(r: float, u: float) -> float:
    """log P(chi_r >= u), valid even where the survival underflows."""
    r = _check_degree(r)
    u = float(u)
    if u <= 0.0:
        return 0.0
    s = 0.5 * r
    x = 0.5 * u * u
    reg = float(sc.gammaincc(s, x))
    if reg > UNDERFLOW_FLOOR:
        return math.log(reg)
    return _log_upper_gamma_cf(s, x) - math.lgamma(s)


def moment(r: float, j: int) -> float:
    """E chi_r^j for integer j >= 0.

    Bases: E chi^0 = 1 and E chi^1 = sqrt(2) Gamma((r+1)/2) / Gamma(r/2);
    higher moments follow the two-step recursion E chi^j = (r+j-2) E chi^(j-2),
    which in particular makes moment(r, 2) == r exact.
    """
    r = _check_degree(r)
    if j != int(j) or j < 0:
        raise DomainError(f"moment order must be a nonnegative integer, got {j!r}")
    j = int(j)
    if j == 0:
        return 1.0
    if j % 2 == 1:
        m = math.exp(0.5 * _LN2 + math.lgamma(0.5 * (r + 1.0)) - math.lgamma(0.5 * r))
        start = 3
    else:
        m = 1.0
        start = 2
    for k in range(start, j + 1, 2):
        m *= r + k - 2.0
    return m


def _clamped_tails(r: float, t: float, top: int) -> list[float]:
    u0 = t if t > 0.0 else 0.0
    return [tail_q(r + k, u0) for k in range(top + 1)]


def gamma3(r: float, t: float) -> float:
    """Cubic tail transform: integral of (s-t)^3 s^(r-1) e^(-s^2/2) over s > max(t, 0).

    Binomial expansion into q_(r+k) terms; exact up to tail_q accuracy plus the
    alternating-sum cancellation (~t^7/6 relative amplification for large t > 0).
    """
    r = _check_degree(r)
    t = float(t)
    q = _clamped_tails(r, t, 3)
    return q[3] - 3.0 * t * q[2] + 3.0 * t * t * q[1] - t * t * t * q[0]


def gamma3_prime(r: float, t: float) -> float:
    """First derivative of gamma3 in t: -3 * integral of (s-t)^2 against the kernel."""
    r = _check_degree(r)
    t = float(t)
    q = _clamped_tails(r, t, 2)
    return -3.0 * (q[2] - 2.0 * t * q[1] + t * t * q[0])


def gamma3_second(r: float, t: float) -> float:
    """Second derivative: 6 * integral of (s-t) against the kernel."""
    r = _check_degree(r)
    t = float(t)
    q = _clamped_tails(r, t, 1)
    return 6.0 * (q[1] - t * q[0])


def _log_tilted_power(r: float, t: float, p: int) -> float:
    """log of integral over v > 0 of v^p (t+v)^(r-1) exp(-(t+v)^2/2) dv.

    Watson expansion in powers of 1/t, truncated at the smallest term. Only
    meaningful for t large enough that t^2 >> r, which holds whenever the
    plain binomial evaluation has underflowed (t >= ~35).
    """
    if t <= 10.0:
        raise DomainError("tilted asymptotic series requires a large shift t")
    log_prefix = (r - 1.0) * math.log(t) - 0.5 * t * t
    # expanding (1+v/t)^(r-1) and exp(-v^2/2) and integrating termwise gives
    # coefficients at t^-(p+2n+1) summed over j+k = n:
    #   binom(r-1, j) (-1)^k / (2^k k!) * (p+j+2k)!
    binoms = [1.0]
    total = 0.0
    smallest = math.inf
    n = 0
    while n < 200:
        while len(binoms) <= n:
            j = len(binoms)
            binoms.append(binoms[-1] * (r - j) / j)
        coeff = 0.0
        sign = 1.0
        pow2k_fact = 1.0
        overflow = False
        for k in range(n + 1):
            j = n - k
            fac = p + j + 2 * k
            if fac > 170:
                overflow = True
                break
            coeff += binoms[j] * sign * math.factorial(fac) / pow2k_fact
            sign = -sign
            pow2k_fact *= 2.0 * (k + 1)
        if overflow:
            break
        term = coeff / t ** (p + 2 * n + 1)
        if not math.isfinite(term):
            break
        mag = abs(term)
        # exactly-zero terms occur whenever the binomials truncate; they must
        # neither stop the series nor enter the smallest-term tracking
        if mag > 0.0:
            if n > 2 and mag > smallest:
                break
            smallest = min(smallest, mag)
        total += term
        if 0.0 < mag < 1e-17 * abs(total):
            break
        n += 1
    return log_prefix + math.log(total)


def log_gamma3(r: float, t: float) -> float:
    """log gamma3(r, t), valid even where the plain value underflows."""
    r = _check_degree(r)
    t = float(t)
    g = gamma3(r, t)
    if g > UNDERFLOW_FLOOR:
        return math.log(g)
    return _log_tilted_power(r, t, 3)


@dataclass(frozen=True)
class GammaDerivatives:
    """gamma3 and its derivatives up to order five at a point t.

    values[j] is the j-th derivative. For t < 0 the transform is a cubic
    polynomial in t, so orders 4 and 5 vanish; at t == 0 those orders are
    one-sided right limits and the report is flagged accordingly.
    """

    t: float
    values: tuple[float, float, float, float, float, float]
    one_sided: bool = False


def gamma_derivs(r: float, t: float) -> GammaDerivatives:
    """All derivatives of gamma3 through order five.

    Orders 0..2 use the binomial expansion, order 3 is -6 q_r(t), order 4 is
    6 t^(r-1) e^(-t^2/2) for t >= 0 (zero for t < 0), and order 5 is
    -(t - (r-1)/t) times order 4 for t > 0.
    """
    r = _check_degree(r)
    t = float(t)
    g0 = gamma3(r, t)
    g1 = gamma3_prime(r, t)
    g2 = gamma3_second(r, t)
    g3 = -6.0 * tail_q(r, t)
    one_sided = t == 0.0
    if t > 0.0:
        g4 = 6.0 * math.exp((r - 1.0) * math.log(t) - 0.5 * t * t)
        g5 = -(t - (r - 1.0) / t) * g4
    elif t < 0.0:
        g4 = 0.0
        g5 = 0.0
    else:
        # right limits at the origin
        if r > 1.0:
            g4 = 0.0
        elif r == 1.0:
            g4 = 6.0
        else:
            g4 = math.inf
        if r > 2.0:
            g5 = 0.0
        elif r == 2.0:
            g5 = 6.0
        elif r > 1.0:
            g5 = math.inf
        elif r == 1.0:
            g5 = 0.0
        else:
            g5 = -math.inf
    return GammaDerivatives(t=t, values=(g0, g1, g2, g3, g4, g5), one_sided=one_sided)


def quantile(r: float, delta: float) -> float:
    """The unique u >= 0 with P(chi_r >= u) = delta.

    Bracketed root finding on the log survival, so arbitrarily small delta
    stays well conditioned. Absolute tolerance 1e-10 in u or better.
    """
    r = _check_degree(r)
    delta = float(delta)
    if not 0.0 < delta < 1.0:
        raise DomainError(f"quantile level must lie in (0, 1), got {delta!r}")
    target = math.log(delta)

    def f(u: float) -> float:
        return log_survival(r, u) - target

    lo = 0.0
    hi = math.sqrt(r) + math.sqrt(2.0 * abs(target)) + 1.0
    while f(hi) > 0.0:
        hi *= 2.0
    return float(optimize.brentq(f, lo, hi, xtol=1e-12, maxiter=200))


def normal_cdf(x: float) -> float:
    """Standard normal CDF, accurate to double precision."""
    return float(sc.ndtr(float(x)))


def normal_sf(x: float) -> float:
    """Upper tail 1 - Phi(x), without cancellation for large x."""
    return float(sc.ndtr(-float(x)))


def normal_pdf(x: float) -> float:
    """Standard normal density."""
    x = float(x)
    return math.exp(-0.5 * x * x) / _SQRT_2PI
