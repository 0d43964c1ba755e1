"""Geometry, range scaling and per-hop progress arithmetic.

Distances are in unit-square units. A hop is described in polar form
relative to the true bearing toward the destination: ``length`` is the
radial hop size and ``angle`` the deviation from the bearing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

TWO_PI = 2.0 * math.pi


class DomainError(ValueError):
    """Raised when an argument lies outside an operation's domain."""


class Point2(NamedTuple):
    x: float
    y: float


def normalize_angle(angle: float) -> float:
    """Map ``angle`` onto (-pi, pi]."""
    a = math.remainder(angle, TWO_PI)
    return math.pi if a == -math.pi else a


@dataclass(frozen=True)
class PolarStep:
    length: float
    angle: float

    def __post_init__(self):
        if self.length < 0 or not math.isfinite(self.length):
            raise DomainError(f"step length must be finite and >= 0, got {self.length}")
        object.__setattr__(self, "angle", normalize_angle(self.angle))

    @property
    def projection(self) -> float:
        """Component of the hop along the destination bearing."""
        return self.length * math.cos(self.angle)


def transmission_range(n: int, K: float) -> float:
    """Common radio range ``K * sqrt(ln n / n)``."""
    if n < 2:
        raise DomainError(f"n must be >= 2 for a positive log, got {n}")
    if K <= 0:
        raise DomainError(f"K must be positive, got {K}")
    return K * math.sqrt(math.log(n) / n)


def destination_ball_radius(n: int, M: float) -> float:
    # n^{-1/4}, floored at two hops so the ball always dominates the step size
    return max(n ** -0.25, 2.0 * M)


@dataclass(frozen=True)
class ScalingParams:
    """Network scale: node count ``n``, range constant ``K``, source distance ``d``.

    Use :meth:`with_range` to pin the transmission range directly (the
    calibration mode used to reproduce published hop counts).
    """

    n: int
    K: float
    d: float = 1.0

    def __post_init__(self):
        if self.n < 2:
            raise DomainError(f"n must be >= 2, got {self.n}")
        if self.K <= 0:
            raise DomainError(f"K must be positive, got {self.K}")
        if self.d <= 0:
            raise DomainError(f"d must be positive, got {self.d}")
        if not self.M < self.d:
            raise DomainError(f"range M={self.M:.6g} must be smaller than d={self.d}")
        if not self.eps < self.d:
            raise DomainError(f"ball radius eps={self.eps:.6g} must be smaller than d={self.d}")

    @classmethod
    def with_range(cls, n: int, M: float, d: float = 1.0) -> "ScalingParams":
        if M <= 0:
            raise DomainError(f"M must be positive, got {M}")
        if n < 2:
            raise DomainError(f"n must be >= 2, got {n}")
        return cls(n=n, K=M / math.sqrt(math.log(n) / n), d=d)

    @property
    def M(self) -> float:
        return transmission_range(self.n, self.K)

    @property
    def eps(self) -> float:
        return destination_ball_radius(self.n, self.M)


def exact_progress(dist_to_dest: float, step: PolarStep) -> float:
    """Reduction in distance to the destination produced by ``step``.

    Equals ``|OA| - |OB|``; negative for backward hops. While the hop ends
    short of the destination's abscissa it is evaluated as
    ``S cos a - (S sin a)^2 / (|OB| + d - S cos a)``: no cancellation, and
    the result never exceeds ``S cos a`` even after rounding.
    """
    if dist_to_dest <= 0:
        raise DomainError(f"distance to destination must be positive, got {dist_to_dest}")
    s, a = step.length, step.angle
    along = s * math.cos(a)
    across = s * math.sin(a)
    short = dist_to_dest - along
    remaining = math.hypot(short, across)
    if short > 0:
        return along - across * across / (remaining + short)
    return (2.0 * dist_to_dest * along - s * s) / (dist_to_dest + remaining)


def progress_bounds(step: PolarStep, eps: float, dist: float | None = None) -> tuple[float, float]:
    """Lower/upper bounds ``(S cos a - S^2/eps, S cos a)`` on the hop's progress.

    The bounds bracket :func:`exact_progress` whenever the packet is farther
    than ``step.length + eps`` from the destination; pass ``dist`` to have
    that hypothesis checked.
    """
    if eps <= 0:
        raise DomainError(f"eps must be positive, got {eps}")
    if dist is not None and not dist > step.length + eps:
        raise DomainError(
            f"bounds need dist > length + eps, got dist={dist}, length={step.length}, eps={eps}"
        )
    upper = step.projection
    return upper - step.length * step.length / eps, upper
