"""Extremal tail bound for sign-symmetric quadratic forms.

For a degree r > 0 the bound

    Q_r(u) = min[ 1, r/u^2, W_r(u) ]

is the best tail bound obtainable from moment comparison against chi_r over
even test functions with convex second derivative. The three branches meet
continuously at u = sqrt(r) and at u = mu_r = E chi^3 / E chi^2; the cubic
branch is

    W_r(u) = C_r gamma3(t*) / (u - t*)^3,   t* = mu^(-1)(u),

where mu(t) = t - 3 gamma3(t) / gamma3'(t) is strictly increasing with
mu(0) = mu_r. The ratio Lambda_r(u) = Q_r(u) / P(chi_r >= u) stays below the
sharp constant 2 e^3 / 9 = 4.4634... for every u >= 0 and approaches it from
below as u grows; an explicit envelope built from

    J(a) = 6 a^-4 (e^a - 1 - a - a^2/2 - a^3/6),
    a_u  = 3 q(u) q''(u) / q'(u)^2

dominates Lambda_r pointwise on u >= mu_r.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import optimize

from . import chi_kernel as ck
from .errors import DomainError

#: Sharp universal constant 2 e^3 / 9 by which the chi tail dominates Q_r.
SHARP_CONSTANT = 2.0 * math.exp(3.0) / 9.0

_REGION_UNIT = "UNIT"
_REGION_QUADRATIC = "QUADRATIC"
_REGION_CUBIC = "CUBIC"


@dataclass(frozen=True)
class BoundReport:
    """Everything evaluated at a single (r, u) point.

    ``lambda_envelope`` is only defined on the cubic branch (u >= mu_r) and is
    None elsewhere. ``lambda_ratio`` is serialized as "lambda" in reports.
    """

    r: float
    u: float
    q_value: float
    chi_tail: float
    eaton_bound: float
    lambda_ratio: float
    lambda_envelope: float | None
    region: str


def mu_r(r: float) -> float:
    """Cubic-branch threshold E chi_r^3 / E chi_r^2, inside (sqrt(r+1), sqrt(r+2))."""
    return ck.moment(r, 3) / ck.moment(r, 2)


def mu_of_t(r: float, t: float) -> float:
    """The strictly increasing map mu(t) = t - 3 gamma3(t) / gamma3'(t)."""
    r = ck._check_degree(r)
    t = float(t)
    g = ck.gamma3(r, t)
    if g > ck.UNDERFLOW_FLOOR:
        return t - 3.0 * g / ck.gamma3_prime(r, t)
    # deep tail: gamma3 / |gamma3'| from the log-space twins
    ratio = math.exp(ck._log_tilted_power(r, t, 3) - math.log(3.0) - ck._log_tilted_power(r, t, 2))
    return t + 3.0 * ratio


def mu_inverse(r: float, u: float) -> float:
    """The unique t >= 0 with mu(t) = u, for u >= mu_r."""
    r = ck._check_degree(r)
    u = float(u)
    m0 = mu_r(r)
    if u < m0 - 1e-9:
        raise DomainError(f"mu_inverse needs u >= mu_r = {m0:.6g}, got {u!r}")
    if u <= m0:
        return 0.0
    return float(optimize.brentq(lambda t: mu_of_t(r, t) - u, 0.0, u, xtol=1e-12, maxiter=200))


def _log_w(r: float, u: float) -> tuple[float, float]:
    t = mu_inverse(r, u)
    log_w = ck.log_norm_const(r) + ck.log_gamma3(r, t) - 3.0 * math.log(u - t)
    return log_w, t


def w_bound(r: float, u: float) -> float:
    """Cubic branch W_r(u), the minimum of C_r gamma3(t) / (u-t)^3 over t < u."""
    log_w, _ = _log_w(r, u)
    return math.exp(log_w)


def j_function(a: float) -> float:
    """6 a^-4 (e^a - 1 - a - a^2/2 - a^3/6); strictly increasing, value 1/4 at 0.

    The closed form loses all precision for small a, so below |a| < 0.1 the
    Taylor series 6 sum_k a^k / (k+4)! takes over.
    """
    a = float(a)
    if abs(a) < 0.1:
        total = 0.0
        term = 0.25  # 6 / 4!
        for k in range(18):
            total += term
            term *= a / (k + 5.0)
            if abs(term) < 1e-18:
                break
        return total
    return 6.0 * (math.expm1(a) - a - 0.5 * a * a - a * a * a / 6.0) / a**4


def a_u(r: float, u: float) -> float:
    """Curvature ratio 3 q q'' / q'^2, strictly increasing to 3 on u > sqrt(r-1)."""
    r = ck._check_degree(r)
    u = float(u)
    lower = math.sqrt(r - 1.0) if r > 1.0 else 0.0
    if u <= lower:
        raise DomainError(f"a_u needs u > sqrt(r-1) = {lower:.6g}, got {u!r}")
    # q'' = -q' (u - (r-1)/u) and q' = -u^(r-1) e^(-u^2/2), so everything
    # reduces to the ratio q / |q'| evaluated in log space.
    log_abs_qprime = (r - 1.0) * math.log(u) - 0.5 * u * u
    factor = u - (r - 1.0) / u
    return 3.0 * factor * math.exp(ck.log_tail_q(r, u) - log_abs_qprime)


def lambda_envelope(r: float, u: float) -> float:
    """Envelope 2e^3/9 + 3 [J(a_u) - J(3)] dominating Lambda_r on u >= mu_r."""
    r = ck._check_degree(r)
    u = float(u)
    if u < mu_r(r) - 1e-9:
        raise DomainError(f"lambda_envelope needs u >= mu_r, got {u!r}")
    return SHARP_CONSTANT + 3.0 * (j_function(a_u(r, u)) - j_function(3.0))


def q_bound(r: float, u: float) -> BoundReport:
    """Piecewise evaluation of Q_r(u) with every derived quantity attached."""
    r = ck._check_degree(r)
    u = float(u)
    if u < 0.0 or not math.isfinite(u):
        raise DomainError(f"q_bound needs u >= 0, got {u!r}")
    sqrt_r = math.sqrt(r)
    m = mu_r(r)
    if u <= sqrt_r:
        q_value, log_q, region = 1.0, 0.0, _REGION_UNIT
    elif u < m:
        q_value, log_q, region = r / (u * u), math.log(r) - 2.0 * math.log(u), _REGION_QUADRATIC
    else:
        log_q, _ = _log_w(r, u)
        q_value, region = math.exp(log_q), _REGION_CUBIC
    chi_tail = ck.survival(r, u)
    lam = math.exp(log_q - ck.log_survival(r, u))
    envelope = lambda_envelope(r, u) if u >= m else None
    return BoundReport(
        r=r,
        u=u,
        q_value=q_value,
        chi_tail=chi_tail,
        eaton_bound=SHARP_CONSTANT * chi_tail,
        lambda_ratio=lam,
        lambda_envelope=envelope,
        region=region,
    )


def lambda_monotone_check(u_grid: list[float], tol: float = 1e-9) -> bool:
    """True iff Lambda_1 is nondecreasing along a sorted grid of u >= mu_1."""
    grid = [float(u) for u in u_grid]
    if sorted(grid) != grid:
        raise DomainError("lambda_monotone_check needs a sorted grid")
    m1 = mu_r(1.0)
    if grid and grid[0] < m1 - 1e-9:
        raise DomainError(f"lambda_monotone_check needs all u >= mu_1 = {m1:.6g}")
    values = [q_bound(1.0, u).lambda_ratio for u in grid]
    return all(b >= a - tol for a, b in zip(values, values[1:]))
