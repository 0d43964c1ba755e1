"""Node-level routing on random fields in the unit square.

Nodes are i.i.d. uniform on [0, 1)^2 and indexed by a uniform grid whose
cell side is at least the radio range, so a range query only inspects the
3x3 block of cells around the query point. Sources and destinations are
arbitrary points; in a :class:`PathResult` they appear as the virtual node
indices ``n`` (source) and ``n + 1`` (destination).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .analytics import drift_constant
from .continuum import DelayHistogram
from .core import TWO_PI, DomainError, Point2, ScalingParams
from .seeding import derive_seed
from .strategies import Kind, StrategySpec, draw_window

PAPER_SOURCE = Point2(0.0, 0.0)
PAPER_DESTINATION = Point2(0.7, 0.7)


class NodeField:
    """Immutable node positions plus a uniform-bucket index at scale ``M``."""

    def __init__(self, positions, M: float, torus: bool = False):
        pos = np.array(positions, dtype=float).reshape(-1, 2)
        if pos.size and (pos.min() < 0.0 or pos.max() > 1.0):
            raise DomainError("node positions must lie in the unit square")
        if M <= 0:
            raise DomainError(f"range must be positive, got {M}")
        pos.setflags(write=False)
        self.positions = pos
        self.M = float(M)
        self.torus = torus
        self.cells = max(1, int(math.floor(1.0 / M)))
        cell = self._cell_ids(pos)
        self._order = np.argsort(cell, kind="stable")
        self._starts = np.concatenate(([0], np.cumsum(np.bincount(cell, minlength=self.cells**2))))

    @property
    def n(self) -> int:
        return len(self.positions)

    @property
    def cell_side(self) -> float:
        return 1.0 / self.cells

    def _cell_xy(self, xy):
        c = np.floor(np.asarray(xy) * self.cells).astype(np.int64)
        return np.clip(c, 0, self.cells - 1)

    def _cell_ids(self, pts):
        c = self._cell_xy(pts)
        return c[:, 0] * self.cells + c[:, 1]

    def displacement(self, at, pts):
        """Vectors from ``at`` to ``pts``, taking the short way round on a torus."""
        d = np.asarray(pts, dtype=float) - np.asarray(at, dtype=float)
        if self.torus:
            d -= np.round(d)
        return d

    def distance(self, a, b) -> float:
        d = self.displacement(a, b)
        return float(math.hypot(d[0], d[1]))

    def _block(self, at):
        cx, cy = (int(v) for v in self._cell_xy(at))
        span = range(-1, 2)
        if self.torus:
            xs = {(cx + i) % self.cells for i in span}
            ys = {(cy + j) % self.cells for j in span}
        else:
            xs = {cx + i for i in span if 0 <= cx + i < self.cells}
            ys = {cy + j for j in span if 0 <= cy + j < self.cells}
        parts = [self._order[self._starts[c]:self._starts[c + 1]]
                 for x in sorted(xs) for y in sorted(ys) for c in (x * self.cells + y,)]
        return np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)

    def disk(self, at, exclude: int | None = None):
        """Indices (ascending) of nodes strictly within range of ``at`` plus their offsets."""
        idx = self._block(at)
        d = self.displacement(at, self.positions[idx])
        keep = np.hypot(d[:, 0], d[:, 1]) < self.M
        if exclude is not None:
            keep &= idx != exclude
        idx, d = idx[keep], d[keep]
        order = np.argsort(idx)
        return idx[order], d[order]

    def brute_force_disk(self, at, exclude: int | None = None):
        d = self.displacement(at, self.positions)
        keep = np.hypot(d[:, 0], d[:, 1]) < self.M
        if exclude is not None and 0 <= exclude < self.n:
            keep[exclude] = False
        return np.flatnonzero(keep)


@dataclass(frozen=True)
class Region:
    """Angular window ``[start, start + width)`` (absolute angles) of the radius-M disk."""

    start: float = 0.0
    width: float = TWO_PI

    @classmethod
    def disk(cls) -> "Region":
        return cls()

    @classmethod
    def sector(cls, phi1: float, phi2: float, bearing: float) -> "Region":
        return cls(bearing + phi1, phi2 - phi1)

    @classmethod
    def quadrant(cls, axis: float) -> "Region":
        return cls(axis, 0.5 * math.pi)

    def contains(self, angles):
        if self.width >= TWO_PI:
            return np.ones(np.shape(angles), dtype=bool)
        return np.mod(np.asarray(angles) - self.start, TWO_PI) < self.width


def generate_field(scaling: ScalingParams, seed: int, torus: bool = False) -> NodeField:
    rng = np.random.default_rng(seed)
    return NodeField(rng.random((scaling.n, 2)), scaling.M, torus)


def neighbors_in_region(field: NodeField, at, region: Region, exclude: int | None = None) -> list[int]:
    idx, d = field.disk(at, exclude)
    ang = np.arctan2(d[:, 1], d[:, 0])
    return idx[region.contains(ang)].tolist()


@dataclass(frozen=True)
class DeadEndPolicy:
    resample_attempts: int = 8
    fallback_disk: bool = True


class RouteStatus(str, Enum):
    DELIVERED = "delivered"
    DEAD_END = "dead_end"
    BUDGET_EXHAUSTED = "budget_exhausted"


@dataclass
class PathResult:
    hops: list[int]
    positions: list[Point2]
    status: RouteStatus = RouteStatus.DELIVERED
    dead_end_events: int = 0
    fallback_events: int = 0
    informed: list[bool] = field(default_factory=list)

    @property
    def hop_count(self) -> int:
        return len(self.hops) - 1

    @property
    def delivered(self) -> bool:
        return self.status is RouteStatus.DELIVERED


def _route(field: NodeField, spec: StrategySpec, src_pos, dst_pos, rng, policy: DeadEndPolicy,
           hop_budget: int, src_index: int, dst_index: int, min_progress: float = -math.inf):
    """Relay loop shared by the planar experiments and the torus capacity runs.

    A candidate qualifies when it lies in the strategy's region and its
    distance to the destination is at least ``min_progress`` below the
    current one.
    """
    M = field.M
    cur_idx, cur = src_index, np.asarray(src_pos, dtype=float)
    dst = np.asarray(dst_pos, dtype=float)
    hops, positions, informed = [src_index], [Point2(*map(float, cur))], []
    dead_ends = fallbacks = 0
    pos = field.positions
    greedy = spec.kind is Kind.STRAIGHT_LINE

    def result(status):
        return PathResult(hops, positions, status, dead_ends, fallbacks, informed)

    while True:
        to_dst = field.displacement(cur, dst)
        dist = math.hypot(to_dst[0], to_dst[1])
        if dist < M:
            hops.append(dst_index)
            positions.append(Point2(float(dst[0]), float(dst[1])))
            informed.append(True)
            return result(RouteStatus.DELIVERED)
        if len(hops) - 1 >= hop_budget:
            return result(RouteStatus.BUDGET_EXHAUSTED)

        idx, d = field.disk(cur, exclude=cur_idx)
        rem = field.displacement(dst, pos[idx]) if len(idx) else d
        progress = dist - np.hypot(rem[:, 0], rem[:, 1])
        ok = progress >= min_progress
        idx, d, progress = idx[ok], d[ok], progress[ok]

        if greedy:
            if len(idx) == 0 or progress.max() <= 0.0:
                dead_ends += 1
                return result(RouteStatus.DEAD_END)
            nxt, was_informed = int(idx[np.argmax(progress)]), True
        else:
            bearing = math.atan2(to_dst[1], to_dst[0])
            ang = np.arctan2(d[:, 1], d[:, 0])
            pick = None
            for _ in range(1 + policy.resample_attempts):
                lo, hi, was_informed = draw_window(spec, rng)
                mask = Region.sector(lo, hi, bearing).contains(ang)
                if mask.any():
                    pick = idx[mask]
                    break
                dead_ends += 1
            if pick is None:
                if not policy.fallback_disk or len(idx) == 0:
                    return result(RouteStatus.DEAD_END)
                fallbacks += 1
                pick, was_informed = idx, False
            nxt = int(pick[rng.integers(len(pick))])

        cur_idx, cur = nxt, pos[nxt]
        hops.append(nxt)
        positions.append(Point2(float(cur[0]), float(cur[1])))
        informed.append(was_informed)


def default_discrete_budget(spec: StrategySpec, M: float, d: float) -> int:
    drift = drift_constant(spec)
    if drift <= 0:
        return int(math.ceil(50.0 * (d / M) ** 2))
    return int(math.ceil(50.0 * d / (drift * M)))


def route_discrete(
    field: NodeField,
    spec: StrategySpec,
    src=PAPER_SOURCE,
    dst=PAPER_DESTINATION,
    policy: DeadEndPolicy = DeadEndPolicy(),
    seed: int = 0,
    hop_budget: int | None = None,
) -> PathResult:
    """Route a packet from ``src`` to ``dst`` through the field's nodes.

    Greedy routing forwards to the neighbor closest to the destination and
    aborts when no neighbor is closer. Randomized strategies forward to a
    uniformly chosen node in their candidate region; an empty region is
    retried with a fresh draw of the strategy's offset or coin and, failing
    that, a uniform neighbor in the full disk is used. The last hop goes
    straight to the destination once it is in range.
    """
    for p in (src, dst):
        if not (0.0 <= p[0] <= 1.0 and 0.0 <= p[1] <= 1.0):
            raise DomainError(f"endpoint {tuple(p)} lies outside the unit square")
    budget = hop_budget or default_discrete_budget(spec, field.M, field.distance(src, dst))
    rng = np.random.default_rng(seed)
    return _route(field, spec, src, dst, rng, policy, budget, field.n, field.n + 1)


def discrete_trials(
    spec: StrategySpec,
    scaling: ScalingParams,
    trials: int,
    master_seed: int,
    resample_field: bool = True,
    label: str = "discrete",
    src=PAPER_SOURCE,
    dst=PAPER_DESTINATION,
    policy: DeadEndPolicy = DeadEndPolicy(),
) -> list[PathResult]:
    if trials < 1:
        raise DomainError("trials must be >= 1")
    results = []
    shared = None if resample_field else generate_field(scaling, derive_seed(master_seed, label + "/field", 0))
    for t in range(trials):
        fld = shared if shared is not None else generate_field(scaling, derive_seed(master_seed, label + "/field", t))
        results.append(route_discrete(fld, spec, src, dst, policy, derive_seed(master_seed, label + "/route", t)))
    return results


def discrete_ensemble(
    spec: StrategySpec,
    scaling: ScalingParams,
    trials: int,
    master_seed: int,
    resample_field: bool = True,
    label: str = "discrete",
    src=PAPER_SOURCE,
    dst=PAPER_DESTINATION,
    policy: DeadEndPolicy = DeadEndPolicy(),
) -> DelayHistogram:
    """Hop-count histogram over ``trials`` routed packets; failed routes count as censored."""
    results = discrete_trials(spec, scaling, trials, master_seed, resample_field, label, src, dst, policy)
    values = [r.hop_count for r in results if r.delivered]
    return DelayHistogram.from_values(values, trials=trials, censored=trials - len(values))


def calibrate_range(
    target_hops: float,
    n: int,
    trials: int = 60,
    seed: int = 0,
    lo: float | None = None,
    hi: float | None = None,
    iters: int = 20,
    src=PAPER_SOURCE,
    dst=PAPER_DESTINATION,
) -> float:
    """Range M at which greedy routing averages ``target_hops`` hops.

    Bisection over M with the same node fields at every probe (node
    positions do not depend on M), so the objective is monotone up to
    ties. Calibration fields use their own seed label and never overlap
    with experiment streams.
    """
    d = math.hypot(dst[0] - src[0], dst[1] - src[1])
    lo = d / (2.0 * target_hops) if lo is None else lo
    hi = 2.0 * d / target_hops if hi is None else hi
    spec = StrategySpec.straight_line()
    fields = [np.random.default_rng(derive_seed(seed, "calibration/field", t)).random((n, 2)) for t in range(trials)]

    def mean_hops(M):
        counts = [route_discrete(NodeField(p, M), spec, src, dst, seed=0).hop_count for p in fields]
        return float(np.mean(counts))

    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mean_hops(mid) > target_hops:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
