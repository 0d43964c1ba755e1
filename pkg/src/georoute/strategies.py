"""Next-hop samplers for the randomized forwarding schemes.

All angles are measured from the true bearing toward the destination.
Continuum samplers return a point uniform over the AREA of the candidate
region (so ``length = M * sqrt(U)``); the discrete model instead asks for
the candidate region itself via :func:`draw_window` and picks a node in it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import DomainError, PolarStep, ScalingParams

HALF_PI = 0.5 * math.pi
QUARTER_PI = 0.25 * math.pi


class Kind(str, Enum):
    STRAIGHT_LINE = "straight_line"
    SECTOR = "sector"
    QUADRANT_UNIFORM = "quadrant_uniform"
    QUADRANT_ADVERSARIAL = "quadrant_adversarial"
    FRACTIONAL = "fractional"
    RANDOM_DISK = "random_disk"


@dataclass(frozen=True)
class StrategySpec:
    kind: Kind
    phi1: float | None = None
    phi2: float | None = None
    p: float | None = None
    inner: "StrategySpec | None" = None

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.kind is Kind.SECTOR:
            if self.phi1 is None or self.phi2 is None:
                raise DomainError("sector needs phi1 and phi2")
            if not -math.pi <= self.phi1 < self.phi2 <= math.pi:
                raise DomainError(
                    f"sector angles must satisfy -pi <= phi1 < phi2 <= pi, got [{self.phi1}, {self.phi2}]"
                )
            # drift E[L cos a] is proportional to sin(phi2) - sin(phi1)
            if not math.sin(self.phi2) - math.sin(self.phi1) > 1e-12:
                raise DomainError(
                    f"sector [{self.phi1:.4f}, {self.phi2:.4f}] has no positive drift toward the destination"
                )
        if self.kind is Kind.FRACTIONAL:
            if self.p is None or not 0.0 < self.p < 1.0:
                raise DomainError(f"fractional p must lie in (0, 1), got {self.p}")
            inner = self.inner if self.inner is not None else StrategySpec(Kind.QUADRANT_UNIFORM)
            if inner.kind is Kind.FRACTIONAL:
                raise DomainError("fractional inner strategy must not itself be fractional")
            object.__setattr__(self, "inner", inner)

    @classmethod
    def straight_line(cls) -> "StrategySpec":
        return cls(Kind.STRAIGHT_LINE)

    @classmethod
    def sector(cls, phi1: float, phi2: float) -> "StrategySpec":
        return cls(Kind.SECTOR, phi1=phi1, phi2=phi2)

    @classmethod
    def quadrant(cls) -> "StrategySpec":
        return cls(Kind.QUADRANT_UNIFORM)

    @classmethod
    def adversarial(cls) -> "StrategySpec":
        return cls(Kind.QUADRANT_ADVERSARIAL)

    @classmethod
    def fractional(cls, p: float, inner: "StrategySpec | None" = None) -> "StrategySpec":
        return cls(Kind.FRACTIONAL, p=p, inner=inner)

    @classmethod
    def random_disk(cls) -> "StrategySpec":
        return cls(Kind.RANDOM_DISK)

    @property
    def informed_probability(self) -> float:
        return self.p if self.kind is Kind.FRACTIONAL else 1.0

    def describe(self) -> str:
        if self.kind is Kind.SECTOR:
            return f"sector[{math.degrees(self.phi1):g}deg,{math.degrees(self.phi2):g}deg]"
        if self.kind is Kind.FRACTIONAL:
            return f"fractional(p={self.p:g},{self.inner.describe()})"
        return self.kind.value

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind.value}
        if self.kind is Kind.SECTOR:
            out.update(phi1=self.phi1, phi2=self.phi2)
        if self.kind is Kind.FRACTIONAL:
            out.update(p=self.p, inner=self.inner.to_dict())
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "StrategySpec":
        inner = data.get("inner")
        return cls(
            Kind(data["kind"]),
            phi1=data.get("phi1"),
            phi2=data.get("phi2"),
            p=data.get("p"),
            inner=cls.from_dict(inner) if isinstance(inner, dict) else inner,
        )


@dataclass(frozen=True)
class StepSample:
    step: PolarStep
    informed: bool = True


# -- vectorized draws in units of M ----------------------------------------

def _area_uniform_radius(rng: np.random.Generator, size):
    return np.sqrt(rng.random(size))


def _sector_draw(phi1, phi2, rng, size):
    length = _area_uniform_radius(rng, size)
    angle = phi1 + (phi2 - phi1) * rng.random(size)
    return length, angle


def _quadrant_draw(rng, size):
    kappa = HALF_PI * rng.random(size)
    length = _area_uniform_radius(rng, size)
    angle = kappa - HALF_PI + HALF_PI * rng.random(size)
    return length, angle


def _adversarial_draw(rng, size):
    length = _area_uniform_radius(rng, size)
    gamma = HALF_PI * rng.random(size)
    sign = np.where(rng.random(size) < 0.5, -1.0, 1.0)
    # the adversary aligns the bearing with whichever quadrant edge gives less progress
    return length, sign * np.maximum(gamma, HALF_PI - gamma)


def draw_steps(spec: StrategySpec, rng: np.random.Generator, size: int):
    """Draw ``size`` i.i.d. hops as arrays ``(length / M, angle, informed)``."""
    kind = spec.kind
    informed = np.ones(size, dtype=bool)
    if kind is Kind.STRAIGHT_LINE:
        return np.ones(size), np.zeros(size), informed
    if kind is Kind.SECTOR:
        length, angle = _sector_draw(spec.phi1, spec.phi2, rng, size)
    elif kind is Kind.QUADRANT_UNIFORM:
        length, angle = _quadrant_draw(rng, size)
    elif kind is Kind.QUADRANT_ADVERSARIAL:
        length, angle = _adversarial_draw(rng, size)
    elif kind is Kind.RANDOM_DISK:
        length, angle = _sector_draw(-math.pi, math.pi, rng, size)
    else:
        informed = rng.random(size) < spec.p
        il, ia, _ = draw_steps(spec.inner, rng, size)
        ul, ua = _sector_draw(-math.pi, math.pi, rng, size)
        length = np.where(informed, il, ul)
        angle = np.where(informed, ia, ua)
    return length, angle, informed


# -- per-hop samplers -------------------------------------------------------

def _scalar(spec, scaling, rng) -> StepSample:
    length, angle, informed = draw_steps(spec, rng, 1)
    return StepSample(PolarStep(scaling.M * float(length[0]), float(angle[0])), bool(informed[0]))


def sample_straight_line(scaling: ScalingParams) -> StepSample:
    return StepSample(PolarStep(scaling.M, 0.0), True)


def sample_sector(phi1: float, phi2: float, scaling: ScalingParams, rng: np.random.Generator) -> StepSample:
    """Point uniform over the sector of radius M between ``phi1`` and ``phi2``."""
    return _scalar(StrategySpec.sector(phi1, phi2), scaling, rng)


def sample_quadrant_uniform(scaling: ScalingParams, rng: np.random.Generator) -> StepSample:
    """Uniform local-frame offset kappa, then a point uniform in quadrant [kappa - pi/2, kappa]."""
    return _scalar(StrategySpec.quadrant(), scaling, rng)


def sample_quadrant_adversarial(scaling: ScalingParams, rng: np.random.Generator) -> StepSample:
    return _scalar(StrategySpec.adversarial(), scaling, rng)


def sample_random_disk(scaling: ScalingParams, rng: np.random.Generator) -> StepSample:
    return _scalar(StrategySpec.random_disk(), scaling, rng)


def sample_fractional(
    p: float, inner: StrategySpec | None, scaling: ScalingParams, rng: np.random.Generator
) -> StepSample:
    return _scalar(StrategySpec.fractional(p, inner), scaling, rng)


def sample_step(spec: StrategySpec, scaling: ScalingParams, rng: np.random.Generator) -> StepSample:
    if spec.kind is Kind.STRAIGHT_LINE:
        return sample_straight_line(scaling)
    return _scalar(spec, scaling, rng)


# -- candidate regions for the node-level model ----------------------------

def draw_window(spec: StrategySpec, rng: np.random.Generator) -> tuple[float, float, bool]:
    """Angular window ``(lo, hi, informed)`` of the region a relay is drawn from.

    The region is the part of the radius-M disk whose bearing offset lies in
    ``[lo, hi)``. Straight-line routing has no window and is rejected.
    """
    kind = spec.kind
    if kind is Kind.SECTOR:
        return spec.phi1, spec.phi2, True
    if kind is Kind.QUADRANT_UNIFORM:
        kappa = HALF_PI * rng.random()
        return kappa - HALF_PI, kappa, True
    if kind is Kind.QUADRANT_ADVERSARIAL:
        # uniform-area point in a quadrant folded onto its worse half = the far octant
        if rng.random() < 0.5:
            return -HALF_PI, -QUARTER_PI, True
        return QUARTER_PI, HALF_PI, True
    if kind is Kind.RANDOM_DISK:
        return -math.pi, math.pi, True
    if kind is Kind.FRACTIONAL:
        if rng.random() < spec.p:
            return draw_window(spec.inner, rng)
        return -math.pi, math.pi, False
    raise DomainError("straight-line routing has no candidate window")
