"""Ordering properties of the mode-centered chi family.

For real degree r >= 1 the variable chi_r - sqrt(r-1) (the shift puts the
density mode at 0) has monotone likelihood ratio in r, hence monotone tail
ratio, hence stochastic monotonicity: tails F_r(t) = P(chi_r - sqrt(r-1) >= t)
decrease pointwise in r toward the N(0, 1/2) limit, so

    F_d(t) > 1 - Phi(sqrt(2) t)   for every finite d >= 1.

The log likelihood-ratio derivative has the closed form

    (d/du) log[p_d(u) / p_r(u)] = (r - d) u^2 / [(a + b)(u + a)(u + b)],

with a = sqrt(r-1), b = sqrt(d-1), valid on u > -a where both shifted
densities are positive.

Orientation convention: "monotone" is fixed by the tail inequality
F_r(t) >= F_d(t) for r <= d, i.e. the family decreases in distribution as the
degree grows.
"""

from __future__ import annotations

import math

from . import chi_kernel as ck
from .errors import DomainError


def _check_pair(r: float, d: float) -> tuple[float, float]:
    r, d = float(r), float(d)
    if r < 1.0 or d < 1.0:
        raise DomainError(f"family degrees must satisfy r >= 1, got {r!r}, {d!r}")
    if r > d:
        raise DomainError(f"ordered pair required: r <= d, got r={r!r} > d={d!r}")
    return r, d


def shifted_survival(r: float, t: float) -> float:
    """F_r(t) = P(chi_r - sqrt(r-1) >= t)."""
    r = float(r)
    if r < 1.0:
        raise DomainError(f"shifted family needs r >= 1, got {r!r}")
    return ck.survival(r, float(t) + math.sqrt(r - 1.0))


def log_shifted_survival(r: float, t: float) -> float:
    r = float(r)
    if r < 1.0:
        raise DomainError(f"shifted family needs r >= 1, got {r!r}")
    return ck.log_survival(r, float(t) + math.sqrt(r - 1.0))


def mlr_log_ratio_derivative(r: float, d: float, u: float) -> float:
    """Closed-form derivative of the shifted log likelihood ratio; <= 0 on its domain."""
    r, d = _check_pair(r, d)
    u = float(u)
    a = math.sqrt(r - 1.0)
    b = math.sqrt(d - 1.0)
    if u <= -a:
        raise DomainError(f"u must exceed -sqrt(r-1) = {-a:.6g} for both densities to be positive")
    if r == d:
        return 0.0
    return (r - d) * u * u / ((a + b) * (u + a) * (u + b))


def tail_ratio_check(r: float, d: float, s: float, t: float) -> bool:
    """Monotone tail ratio inequality F_r(t) F_d(s) >= F_d(t) F_r(s) for s < t."""
    r, d = _check_pair(r, d)
    s, t = float(s), float(t)
    if not s < t:
        raise DomainError(f"tail ratio check needs s < t, got s={s!r}, t={t!r}")
    lhs = log_shifted_survival(r, t) + log_shifted_survival(d, s)
    rhs = log_shifted_survival(d, t) + log_shifted_survival(r, s)
    return lhs >= rhs - 1e-12


def stochastic_monotone_check(r: float, d: float, t: float) -> bool:
    """Pointwise tail ordering F_r(t) >= F_d(t) for r <= d."""
    r, d = _check_pair(r, d)
    return shifted_survival(r, t) >= shifted_survival(d, t) - 1e-15


def normal_limit_gap(d: float, u: float) -> float:
    """F_d(u) minus the limiting normal tail 1 - Phi(sqrt(2) u); positive for finite d."""
    d = float(d)
    if d < 1.0:
        raise DomainError(f"shifted family needs d >= 1, got {d!r}")
    return shifted_survival(d, u) - ck.normal_sf(math.sqrt(2.0) * float(u))
