"""Exact distributions of sign statistics and the moment-comparison oracle.

For signs eps in {-1, +1}^n (uniform), this module enumerates the exact
distributions of the linear form S_n = sum eps_i x_i and of the quadratic
form eps^T P eps for a projector P, keeping probabilities as integer counts
over 2^n until the final division. These exact distributions verify, at desk
scale, the moment inequalities

    E f(S_n) <= E f(chi_1)          (unit vector x),
    E f(sqrt(eps^T P eps)) <= E f(chi_rank)

for even test functions with convex second derivative, and the tail bounds
built on them. Test functions are finite mixtures

    f(u) = a + b u^2/2 + sum_k w_k (|u| - t_k)^3_+ / 6,   t_k >= 0, w_k >= 0,

which keep E f(chi_r) in closed form; nonnegative a, b additionally make f
nondecreasing on [0, inf), the class required for bounded symmetric variables
in place of signs.

Concurrency: enumeration is partitioned into fixed-size sign-prefix blocks
whose per-pattern values are computed by order-independent elementwise
arithmetic and merged by exact integer count addition, so results are
bit-identical regardless of block partitioning or thread count. The thread
cap comes from the ORTHANT_T2_THREADS environment variable (default 1).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import chi_kernel as ck
from .errors import DomainError
from .extremal_bounds import SHARP_CONSTANT, q_bound

MAX_LINEAR_N = 24
MAX_QUADRATIC_N = 20

#: Support values are rounded to this many decimals before merging duplicates.
_MERGE_DECIMALS = 12
_BLOCK_BITS = 16

THREADS_ENV_VAR = "ORTHANT_T2_THREADS"


def _thread_count(threads: int | None) -> int:
    if threads is None:
        raw = os.environ.get(THREADS_ENV_VAR)
        if raw is None:
            return 1
        try:
            threads = int(raw)
        except ValueError:
            raise DomainError(f"{THREADS_ENV_VAR} must be a positive integer, got {raw!r}") from None
    if threads != int(threads) or threads < 1:
        raise DomainError(f"thread count must be a positive integer, got {threads!r}")
    return int(threads)


@dataclass(frozen=True)
class TestFunction:
    """Even function a + b u^2/2 + sum w_k (|u| - t_k)^3_+ / 6."""

    __test__ = False  # keep pytest from collecting the class by its name

    a: float
    b: float
    knots: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        knots = tuple((float(t), float(w)) for t, w in self.knots)
        for t, w in knots:
            if t < 0.0 or w < 0.0:
                raise DomainError(f"knots need t >= 0 and weight >= 0, got ({t!r}, {w!r})")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "knots", knots)

    @property
    def increasing_class(self) -> bool:
        """True iff f is also nonnegative and nondecreasing on [0, inf)."""
        return self.a >= 0.0 and self.b >= 0.0

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        au = np.abs(u)
        out = self.a + 0.5 * self.b * u * u
        for t, w in self.knots:
            out = out + (w / 6.0) * np.clip(au - t, 0.0, None) ** 3
        if out.ndim == 0:
            return float(out)
        return out


@dataclass(frozen=True)
class SignDistribution:
    """Finite distribution with exact dyadic weights counts[i] / 2^n."""

    support: np.ndarray
    probs: np.ndarray
    counts: np.ndarray
    denom: int

    def __post_init__(self):
        if abs(float(self.probs.sum()) - 1.0) > 1e-12:
            raise DomainError("probabilities must sum to 1")
        if int(self.counts.sum()) != self.denom:
            raise DomainError("counts must sum to the enumeration denominator")

    def tail_prob(self, u: float) -> float:
        """P(X >= u), exact when u is a support point."""
        c = int(self.counts[self.support >= float(u)].sum())
        return c / self.denom

    def mean_of(self, f) -> float:
        return float(math.fsum(p * v for p, v in zip(self.probs, np.asarray(f(self.support), dtype=float).ravel())))


def _canonical(vals: np.ndarray) -> np.ndarray:
    vals = np.round(vals, _MERGE_DECIMALS)
    return np.where(vals == 0.0, 0.0, vals)


def _merge(parts: list[tuple[np.ndarray, np.ndarray]]) -> tuple[np.ndarray, np.ndarray]:
    vals = np.concatenate([v for v, _ in parts])
    cnts = np.concatenate([c for _, c in parts])
    uniq, inverse = np.unique(vals, return_inverse=True)
    out = np.zeros(uniq.shape[0], dtype=np.int64)
    np.add.at(out, inverse, cnts)
    return uniq, out


def _run_blocks(worker, half: int, threads: int) -> list[tuple[np.ndarray, np.ndarray]]:
    block = 1 << _BLOCK_BITS
    ranges = [(s, min(s + block, half)) for s in range(0, half, block)]
    if threads > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda se: worker(*se), ranges))
    return [worker(s, e) for s, e in ranges]


def exact_linear_distribution(x, *, threads: int | None = None) -> SignDistribution:
    """Exact distribution of sum eps_i x_i over all 2^n sign vectors.

    Enumerates the half with the first sign fixed to +1 and mirrors, since the
    distribution is symmetric. Refuses n > 24; use the Monte Carlo path
    (bounded_symmetric_sample) beyond that.
    """
    x = np.asarray(x, dtype=float).ravel()
    n = x.shape[0]
    if n < 1:
        raise DomainError("coefficient vector must be nonempty")
    if not np.all(np.isfinite(x)):
        raise DomainError("coefficients must be finite")
    if n > MAX_LINEAR_N:
        raise DomainError(
            f"exact enumeration capped at n = {MAX_LINEAR_N}; "
            f"use the Monte Carlo path (bounded_symmetric_sample) for n = {n}"
        )
    threads = _thread_count(threads)
    half = 1 << (n - 1)

    def worker(start: int, stop: int) -> tuple[np.ndarray, np.ndarray]:
        k = np.arange(start, stop, dtype=np.int64)
        vals = np.full(stop - start, x[0])
        for i in range(n - 1):
            sign = (((k >> i) & 1) << 1).astype(float) - 1.0
            vals = vals + sign * x[i + 1]
        uniq, counts = np.unique(_canonical(vals), return_counts=True)
        return uniq, counts.astype(np.int64)

    vals, cnts = _merge(_run_blocks(worker, half, threads))
    support, counts = _merge([(vals, cnts), (_canonical(-vals), cnts)])
    probs = counts / float(1 << n)
    return SignDistribution(support=support, probs=probs, counts=counts, denom=1 << n)


def _check_projector(P: np.ndarray, tol: float = 1e-9) -> int:
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise DomainError(f"projector must be square, got shape {P.shape}")
    if np.max(np.abs(P - P.T)) > tol:
        raise DomainError("matrix is not symmetric to 1e-9; not a projector")
    if np.max(np.abs(P @ P - P)) > tol:
        raise DomainError("matrix is not idempotent to 1e-9; not a projector")
    return int(round(float(np.trace(P))))


def exact_quadratic_distribution(P, *, threads: int | None = None) -> SignDistribution:
    """Exact distribution of eps^T P eps for a symmetric idempotent P.

    Support lies in [0, n] and the mean equals trace(P) = rank. The global
    sign flip leaves the value unchanged, so only half the patterns are
    enumerated and counts are doubled.
    """
    P = np.asarray(P, dtype=float)
    _check_projector(P)
    n = P.shape[0]
    if n > MAX_QUADRATIC_N:
        raise DomainError(
            f"exact enumeration capped at n = {MAX_QUADRATIC_N}; "
            f"use the Monte Carlo path (bounded_symmetric_sample) for n = {n}"
        )
    threads = _thread_count(threads)
    half = 1 << (n - 1)

    def worker(start: int, stop: int) -> tuple[np.ndarray, np.ndarray]:
        k = np.arange(start, stop, dtype=np.int64)
        signs = [np.ones(stop - start)]
        for i in range(n - 1):
            signs.append((((k >> i) & 1) << 1).astype(float) - 1.0)
        acc = np.zeros(stop - start)
        for i in range(n):
            inner = np.zeros(stop - start)
            for j in range(n):
                inner = inner + P[i, j] * signs[j]
            acc = acc + signs[i] * inner
        uniq, counts = np.unique(_canonical(acc), return_counts=True)
        return uniq, counts.astype(np.int64)

    vals, cnts = _merge(_run_blocks(worker, half, threads))
    counts = 2 * cnts
    probs = counts / float(1 << n)
    return SignDistribution(support=vals, probs=probs, counts=counts, denom=1 << n)


def expectation_under(dist: SignDistribution, f) -> float:
    """E f(X) under a finite sign distribution, with compensated summation."""
    return dist.mean_of(f)


def chi_expectation(r: float, f: TestFunction) -> float:
    """E f(chi_r) in closed form: a + b r/2 + sum w_k C_r gamma3(t_k) / 6."""
    r = ck._check_degree(r)
    total = f.a + 0.5 * f.b * ck.moment(r, 2)
    for t, w in f.knots:
        total += (w / 6.0) * ck.norm_const(r) * ck.gamma3(r, t)
    return total


def verify_moment_inequality(target, f: TestFunction, r: float | None = None):
    """(lhs, rhs, holds) for the moment comparison against chi_r.

    A 1-d target is a unit coefficient vector (compared against chi_1); a 2-d
    target is a projector (compared against chi_rank). holds allows 1e-10 of
    slack so exact equality cases pass.
    """
    target = np.asarray(target, dtype=float)
    if target.ndim == 1:
        nrm = float(np.linalg.norm(target))
        if abs(nrm - 1.0) > 1e-9:
            raise DomainError(f"coefficient vector must have unit norm, got {nrm!r}")
        dist = exact_linear_distribution(target)
        lhs = expectation_under(dist, f)
        degree = 1.0 if r is None else float(r)
    else:
        rank = _check_projector(target)
        dist = exact_quadratic_distribution(target)
        lhs = expectation_under(dist, lambda v: f(np.sqrt(np.clip(v, 0.0, None))))
        degree = float(rank) if r is None else float(r)
    rhs = chi_expectation(degree, f)
    return lhs, rhs, lhs <= rhs + 1e-10


def verify_tail_bounds(target, u_grid=None) -> list[dict]:
    """Tail-bound verdicts at every positive support point (plus any extra grid).

    Linear targets check P(S_n >= u) <= Q_1(u)/2 and P(S_n >= u) < c (1 - Phi(u));
    projector targets check P(eps^T P eps >= u^2) <= Q_rank(u) and
    < c P(chi_rank >= u). Each verdict records both sides and the slack.
    """
    target = np.asarray(target, dtype=float)
    verdicts: list[dict] = []
    extra = [float(u) for u in (u_grid if u_grid is not None else [])]
    if target.ndim == 1:
        nrm = float(np.linalg.norm(target))
        if abs(nrm - 1.0) > 1e-9:
            raise DomainError(f"tail bounds need a unit coefficient vector, got norm {nrm!r}")
        dist = exact_linear_distribution(target)
        instance = f"linear n={target.shape[0]}"
        us = sorted({float(u) for u in dist.support if u > 0.0} | {u for u in extra if u > 0.0})
        for u in us:
            lhs = dist.tail_prob(u)
            rhs = 0.5 * q_bound(1.0, u).q_value
            verdicts.append(_verdict("half_q1_bound", instance, u, lhs, rhs, lhs <= rhs + 1e-12))
            rhs = SHARP_CONSTANT * ck.normal_sf(u)
            verdicts.append(_verdict("sharp_normal_tail", instance, u, lhs, rhs, lhs < rhs))
    else:
        rank = _check_projector(target)
        dist = exact_quadratic_distribution(target)
        instance = f"projector n={target.shape[0]} rank={rank}"
        vs = sorted({float(v) for v in dist.support if v > 0.0} | {u * u for u in extra if u > 0.0})
        for v in vs:
            u = math.sqrt(v)
            lhs = dist.tail_prob(v)
            rep = q_bound(float(rank), u)
            verdicts.append(_verdict("quadratic_q_bound", instance, u, lhs, rep.q_value, lhs <= rep.q_value + 1e-12))
            verdicts.append(_verdict("quadratic_sharp_chi_tail", instance, u, lhs, rep.eaton_bound, lhs < rep.eaton_bound))
    return verdicts


def _verdict(inequality: str, instance: str, u: float, lhs: float, rhs: float, holds: bool) -> dict:
    return {
        "inequality": inequality,
        "instance": instance,
        "u": u,
        "lhs": lhs,
        "rhs": rhs,
        "slack": rhs - lhs,
        "holds": bool(holds),
    }


_SAMPLE_KINDS = ("rademacher", "uniform_sign", "scaled_bernoulli")


def bounded_symmetric_sample(kind: str, seed: int, count: int) -> np.ndarray:
    """Seed-reproducible draws of mean-zero variables bounded by 1.

    rademacher: +/-1 equiprobable; uniform_sign: uniform on [-1, 1];
    scaled_bernoulli: +/-1/2 equiprobable. Same (kind, seed, count) always
    yields the identical stream.
    """
    if kind not in _SAMPLE_KINDS:
        raise DomainError(f"unknown sample kind {kind!r}; valid kinds: {', '.join(_SAMPLE_KINDS)}")
    if count < 0:
        raise DomainError("count must be nonnegative")
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    if kind == "rademacher":
        return rng.integers(0, 2, size=count).astype(float) * 2.0 - 1.0
    if kind == "uniform_sign":
        return rng.uniform(-1.0, 1.0, size=count)
    return (rng.integers(0, 2, size=count).astype(float) - 0.5)
