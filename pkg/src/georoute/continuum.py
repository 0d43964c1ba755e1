"""Continuum walk toward the destination ball and hop-count ensembles.

The packet starts a distance ``d`` from the destination. Each hop is drawn
i.i.d. from the strategy relative to the current bearing, so the walk is
fully described by the scalar distance to the destination; a planar pose
is tracked only when a trajectory is requested.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .analytics import drift_constant
from .core import DomainError, Point2, PolarStep, ScalingParams, exact_progress
from .seeding import derive_seed
from .strategies import StrategySpec, draw_steps

BLOCK = 256


class Termination(str, Enum):
    HIT_BALL = "HitBall"
    HOP_BUDGET_EXCEEDED = "HopBudgetExceeded"


@dataclass
class HopRecord:
    step: PolarStep
    dist_before: float
    progress: float


@dataclass
class WalkResult:
    tau: int | None
    total_hops: int
    terminated: Termination
    trajectory: list[Point2] | None = None
    hops: list[HopRecord] | None = None

    @property
    def censored(self) -> bool:
        return self.terminated is Termination.HOP_BUDGET_EXCEEDED


def default_hop_budget(spec: StrategySpec, scaling: ScalingParams) -> int:
    drift = drift_constant(spec)
    M = scaling.M
    if drift <= 0:
        # diffusive walk: hitting the ball takes order (d / M)^2 hops
        return int(math.ceil(50.0 * (scaling.d / M) ** 2))
    return int(math.ceil(50.0 * scaling.d / (drift * M)))


def run_walk(
    spec: StrategySpec,
    scaling: ScalingParams,
    seed: int,
    hop_budget: int | None = None,
    record_trajectory: bool = False,
    count_final_leg: bool = True,
) -> WalkResult:
    """Walk from distance ``d`` until the packet is within ``eps`` of the destination.

    ``tau`` is the first hop after which the remaining distance is at most
    ``eps``. With ``count_final_leg`` the straight-line hops needed to cover
    the remaining distance are added to ``total_hops``.
    """
    M, eps, d = scaling.M, scaling.eps, scaling.d
    budget = default_hop_budget(spec, scaling) if hop_budget is None else hop_budget
    if budget < 1.0 / M:
        raise DomainError(f"hop budget {budget} is below the straight-line minimum 1/M={1 / M:.1f}")

    rng = np.random.default_rng(seed)
    dist = d
    pos = (0.0, 0.0)
    dest = (d, 0.0)
    trajectory = [Point2(*pos)] if record_trajectory else None
    hops: list[HopRecord] | None = [] if record_trajectory else None

    j = 0
    while dist > eps:
        if j >= budget:
            return WalkResult(None, j, Termination.HOP_BUDGET_EXCEEDED, trajectory, hops)
        if j % BLOCK == 0:
            lengths, angles, _ = draw_steps(spec, rng, BLOCK)
            lengths = lengths * M
        k = j % BLOCK
        step = PolarStep(float(lengths[k]), float(angles[k]))
        progress = exact_progress(dist, step)
        if record_trajectory:
            hops.append(HopRecord(step, dist, progress))
            bearing = math.atan2(dest[1] - pos[1], dest[0] - pos[0]) + step.angle
            pos = (pos[0] + step.length * math.cos(bearing), pos[1] + step.length * math.sin(bearing))
            trajectory.append(Point2(*pos))
        dist -= progress
        j += 1

    tau = j
    total = tau
    if count_final_leg and dist > 0:
        leg = int(math.ceil(dist / M))
        total += leg
        if record_trajectory:
            # straight hops of length M along the bearing, last one lands on the destination
            dx, dy = dest[0] - pos[0], dest[1] - pos[1]
            norm = math.hypot(dx, dy)
            for i in range(1, leg + 1):
                frac = min(i * M / norm, 1.0) if norm > 0 else 1.0
                trajectory.append(Point2(pos[0] + frac * dx, pos[1] + frac * dy))
    return WalkResult(tau, total, Termination.HIT_BALL, trajectory, hops)


@dataclass
class DelayHistogram:
    """Unit-width histogram of hop counts.

    ``counts[i]`` holds trials with ``edges[i] <= hops < edges[i + 1]``;
    censored trials are kept out of the bins and the moments, so
    ``sum(counts) + censored == trials``.
    """

    edges: list[int]
    counts: list[int]
    trials: int
    mean: float
    stddev: float
    censored: int = 0
    values: list[int] = field(default_factory=list, repr=False, compare=False)

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError("a histogram needs at least one trial")
        if sum(self.counts) + self.censored != self.trials:
            raise DomainError("bin counts and censored trials must add up to trials")
        if len(self.edges) != len(self.counts) + 1:
            raise DomainError("edges must have exactly one more entry than counts")

    @classmethod
    def from_values(cls, values, trials: int | None = None, censored: int = 0) -> "DelayHistogram":
        values = [int(v) for v in values]
        trials = len(values) + censored if trials is None else trials
        if trials < 1:
            raise DomainError("a histogram needs at least one trial")
        if values:
            lo, hi = min(values), max(values)
            edges = list(range(lo, hi + 2))
            counts = np.bincount(np.asarray(values) - lo, minlength=hi - lo + 1).tolist()
            arr = np.asarray(values, dtype=float)
            mean = round_sig(float(arr.mean()))
            stddev = round_sig(float(arr.std()))
        else:
            edges, counts, mean, stddev = [0], [], float("nan"), float("nan")
        return cls(edges, counts, trials, mean, stddev, censored, values)

    def merge(self, other: "DelayHistogram") -> "DelayHistogram":
        return DelayHistogram.from_values(self.values + other.values, censored=self.censored + other.censored)

    def to_dict(self) -> dict:
        return {
            "edges": list(self.edges),
            "counts": list(self.counts),
            "trials": self.trials,
            "mean": self.mean,
            "stddev": self.stddev,
            "censored": self.censored,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DelayHistogram":
        values = [e for e, c in zip(data["edges"], data["counts"]) for _ in range(c)]
        return cls(
            list(data["edges"]), list(data["counts"]), int(data["trials"]),
            float(data["mean"]), float(data["stddev"]), int(data.get("censored", 0)), values,
        )


def round_sig(x: float, digits: int = 9) -> float:
    return float(f"{x:.{digits}g}")


def run_ensemble(
    spec: StrategySpec,
    scaling: ScalingParams,
    trials: int,
    master_seed: int,
    label: str = "continuum",
    hop_budget: int | None = None,
    count_final_leg: bool = True,
) -> DelayHistogram:
    """Independent walks aggregated into a hop-count histogram."""
    if trials < 1:
        raise DomainError("trials must be >= 1")
    values, censored = [], 0
    for t in range(trials):
        res = run_walk(spec, scaling, derive_seed(master_seed, label, t), hop_budget,
                       count_final_leg=count_final_leg)
        if res.censored:
            censored += 1
        else:
            values.append(res.total_hops)
    return DelayHistogram.from_values(values, trials=trials, censored=censored)


@dataclass(frozen=True)
class SweepRow:
    n: int
    M: float
    mean_tau_M: float
    mean_total_M: float
    inverse_drift: float
    censored: int


def scaling_sweep(
    spec: StrategySpec,
    n_list,
    K: float,
    trials: int,
    master_seed: int,
    d: float = 1.0,
) -> list[SweepRow]:
    """Mean normalized delay ``tau * M(n)`` across network sizes."""
    n_list = list(n_list)
    if sorted(n_list) != n_list:
        raise DomainError("n_list must be ascending")
    drift = drift_constant(spec)
    rows = []
    for n in n_list:
        scaling = ScalingParams(n, K, d)
        taus, totals, censored = [], [], 0
        for t in range(trials):
            res = run_walk(spec, scaling, derive_seed(master_seed, f"sweep-{n}", t))
            if res.censored:
                censored += 1
                continue
            taus.append(res.tau)
            totals.append(res.total_hops)
        M = scaling.M
        rows.append(SweepRow(
            n, M,
            float(np.mean(taus)) * M if taus else float("nan"),
            float(np.mean(totals)) * M if totals else float("nan"),
            1.0 / drift if drift > 0 else float("inf"),
            censored,
        ))
    return rows
