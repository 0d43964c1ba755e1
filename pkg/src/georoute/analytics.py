"""Drift constants, delay predictions and concentration checks.

A drift constant is the expected projection of one hop onto the
destination bearing, in units of the range M. Delays scale as
``1 / (p * beta * M)``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import integrate

from .core import DomainError, ScalingParams, transmission_range
from .strategies import HALF_PI, Kind, StrategySpec, draw_steps

QUAD_TOL = 1e-9


@dataclass(frozen=True)
class DriftConstant:
    value: float
    method: str  # closed_form | quadrature | monte_carlo
    abs_error_estimate: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class BoundReport:
    lower_hops: float
    point_estimate: float
    upper_hops: float
    c1: float
    c2: float

    def to_dict(self) -> dict:
        return asdict(self)


def _expectation(integrand, density, *angle_breaks):
    """E[integrand] over radius (0, 1) and the angle range spanned by ``angle_breaks``.

    Pieces between consecutive breaks are integrated separately so kinks in
    the integrand sit on piece boundaries.
    """
    val = err = 0.0
    for a_lo, a_hi in zip(angle_breaks[:-1], angle_breaks[1:]):
        # dblquad integrates func(y, x) with x the outer variable; outer = angle
        v, e = integrate.dblquad(
            lambda l, a: integrand(l, a) * density(l, a), a_lo, a_hi, 0.0, 1.0,
            epsabs=QUAD_TOL, epsrel=QUAD_TOL,
        )
        val += v
        err += e
    return val, err


def beta_sector_closed_form(phi1: float, phi2: float) -> float:
    return (2.0 / 3.0) * (math.sin(phi2) - math.sin(phi1)) / (phi2 - phi1)


def beta_sector(phi1: float, phi2: float) -> DriftConstant:
    """Mean projection of a point uniform over the unit sector [phi1, phi2]."""
    if not -math.pi <= phi1 <= phi2 <= math.pi:
        raise DomainError(f"sector angles out of range: [{phi1}, {phi2}]")
    if phi2 - phi1 <= 0:
        raise DomainError("zero-width sector")
    closed = beta_sector_closed_form(phi1, phi2)
    width = phi2 - phi1
    quad, err = _expectation(lambda l, a: l * math.cos(a), lambda l, a: 2.0 * l / width, phi1, phi2)
    return DriftConstant(closed, "closed_form", abs(closed - quad) + err)


def quadrant_uniform_density(l: float, a: float) -> float:
    # generative law: kappa ~ U[0, pi/2], then uniform area over [kappa - pi/2, kappa]
    return (8.0 / math.pi**2) * l * (HALF_PI - abs(a)) if abs(a) < HALF_PI else 0.0


def beta_quadrant_uniform() -> DriftConstant:
    val, err = _expectation(lambda l, a: l * math.cos(a), quadrant_uniform_density, -HALF_PI, 0.0, HALF_PI)
    return DriftConstant(val, "quadrature", err)


def beta_quadrant_adversarial() -> DriftConstant:
    """E[L min(cos g, sin g)] for a point uniform over the area of a unit quadrant."""
    val, err = _expectation(
        lambda l, g: l * min(math.cos(g), math.sin(g)),
        lambda l, g: 2.0 * l / HALF_PI,
        0.0, 0.5 * HALF_PI, HALF_PI,
    )
    return DriftConstant(val, "quadrature", err)


def beta_monte_carlo(spec: StrategySpec, draws: int, seed: int) -> DriftConstant:
    """Sample-mean projection with its standard error."""
    rng = np.random.default_rng(seed)
    length, angle, _ = draw_steps(spec, rng, draws)
    x = length * np.cos(angle)
    return DriftConstant(float(x.mean()), "monte_carlo", float(x.std(ddof=1) / math.sqrt(draws)))


def drift_constant(spec: StrategySpec) -> float:
    """Analytic per-hop drift (units of M) including the informed fraction."""
    kind = spec.kind
    if kind is Kind.STRAIGHT_LINE:
        return 1.0
    if kind is Kind.SECTOR:
        return beta_sector_closed_form(spec.phi1, spec.phi2)
    if kind is Kind.QUADRANT_UNIFORM:
        return 16.0 / (3.0 * math.pi**2)
    if kind is Kind.QUADRANT_ADVERSARIAL:
        return (2.0 / 3.0) * (4.0 / math.pi) * (1.0 - math.sqrt(0.5))
    if kind is Kind.RANDOM_DISK:
        return 0.0
    # uninformed hops are symmetric about the bearing and contribute no drift
    return spec.p * drift_constant(spec.inner)


def predicted_delay(
    beta: DriftConstant | float,
    p: float,
    scaling: ScalingParams,
    c1: float | None = None,
    c2: float | None = None,
) -> BoundReport:
    """Hop-count prediction ``1/(p beta M)`` with bracketing constants.

    ``c1`` and ``c2`` default to 10% either side of ``1/(p beta)``.
    """
    value = beta.value if isinstance(beta, DriftConstant) else float(beta)
    if value <= 0:
        raise DomainError(f"no drift toward the destination (beta={value}); delay bounds do not apply")
    if not 0.0 < p <= 1.0:
        raise DomainError(f"p must lie in (0, 1], got {p}")
    inv = 1.0 / (p * value)
    c1 = 0.9 * inv if c1 is None else c1
    c2 = 1.1 * inv if c2 is None else c2
    if not c1 < inv < c2:
        raise DomainError(f"constants must straddle 1/(p beta)={inv:.6g}, got c1={c1}, c2={c2}")
    M = scaling.M
    return BoundReport(c1 / M, inv / M, c2 / M, c1, c2)


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    M: float
    terms: int
    max_deviation: float
    mean_deviation: float
    exceedance: float


def triangular_array_check(
    projection_dist: StrategySpec,
    n_list,
    trials: int,
    seed: int,
    eps: float = 0.05,
    K: float = 1.0,
    chunk: int = 250,
) -> list[ConvergenceRow]:
    """Scaled partial sums ``M(n) * sum_{i <= 1/M(n)} X_i`` against ``E X``.

    ``X`` is the normalized hop projection of ``projection_dist``. For every
    n the deviation is replicated ``trials`` times; rows report the largest
    and mean absolute deviation and the fraction exceeding ``eps``.
    """
    n_list = list(n_list)
    if len(n_list) < 3 or sorted(n_list) != n_list:
        raise DomainError("n_list must be ascending with at least three entries")
    mean = drift_constant(projection_dist)
    rows = []
    for n in n_list:
        M = transmission_range(n, K)
        terms = int(math.floor(1.0 / M))
        rng = np.random.default_rng([seed, n])
        dev = np.empty(trials)
        for start in range(0, trials, chunk):
            size = min(chunk, trials - start)
            length, angle, _ = draw_steps(projection_dist, rng, size * terms)
            sums = (length * np.cos(angle)).reshape(size, terms).sum(axis=1)
            dev[start:start + size] = np.abs(M * sums - mean)
        rows.append(ConvergenceRow(n, M, terms, float(dev.max()), float(dev.mean()), float((dev > eps).mean())))
    return rows


def mu_bound(n: int, delta: float) -> float:
    """High-probability ceiling on the busiest tile's path count."""
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    if not 0.0 < delta <= 1.0:
        raise DomainError(f"delta must lie in (0, 1], got {delta}")
    ln = math.log(n)
    lead = math.sqrt(n * ln) / delta
    return lead + math.sqrt(6.0 * ln * lead)
