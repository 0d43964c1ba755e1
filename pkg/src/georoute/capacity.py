"""Hot-spot measurement for progressive routing on the unit torus.

The torus is cut into square tiles of side about ``sqrt(ln n / n)``. Tiles
whose transmissions could collide under the protocol model are joined in
an interference graph and colored; a slot is split evenly among the
colors, and inside a tile among the hops that tile must carry.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analytics import mu_bound
from .core import DomainError, ScalingParams
from .discrete import DeadEndPolicy, NodeField, PathResult, _route, generate_field
from .strategies import StrategySpec

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class Tiling:
    n: int
    a_nominal: float
    tiles_per_axis: int

    @property
    def a(self) -> float:
        return 1.0 / self.tiles_per_axis

    @property
    def count(self) -> int:
        return self.tiles_per_axis**2

    def tile_of(self, pts):
        """Tile index ``i * T + j`` of each point (x in column i, y in row j)."""
        T = self.tiles_per_axis
        ij = np.floor(np.mod(np.asarray(pts, dtype=float), 1.0) * T).astype(np.int64) % T
        return ij[..., 0] * T + ij[..., 1]

    def coords(self, k: int) -> tuple[int, int]:
        return divmod(int(k), self.tiles_per_axis)


def build_tiling(scaling: ScalingParams) -> Tiling:
    a = math.sqrt(math.log(scaling.n) / scaling.n)
    T = int(round(1.0 / a))
    if T < 3:
        raise DomainError(f"only {T} tiles per axis; need at least 3 (n={scaling.n} is too small)")
    return Tiling(scaling.n, a, T)


def _axis_gap(di: int, T: int) -> int:
    di = abs(di) % T
    return max(0, min(di, T - di) - 1)


def tile_gap(tiling: Tiling, u: int, v: int) -> float:
    """Smallest torus distance between points of tiles ``u`` and ``v``."""
    (ui, uj), (vi, vj) = tiling.coords(u), tiling.coords(v)
    T = tiling.tiles_per_axis
    return tiling.a * math.hypot(_axis_gap(ui - vi, T), _axis_gap(uj - vj, T))


@dataclass
class InterferenceGraph:
    adjacency: list[set[int]]
    reach: float = 0.0
    Delta: float = 0.0

    @property
    def J(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    def edges(self):
        return [(u, v) for u, nb in enumerate(self.adjacency) for v in nb if u < v]


def interference_reach(M: float, Delta: float, a: float) -> float:
    """Tile-gap threshold below which two tiles interfere.

    ``(1 + Delta) M + sqrt(2) a`` covers any receiver placement as long as
    ``sqrt(2) a >= M``; past that the receiver offset ``M`` is what matters.
    """
    return (1.0 + Delta) * M + max(SQRT2 * a, M)


def build_interference_graph(tiling: Tiling, M: float, Delta: float) -> InterferenceGraph:
    """Join tiles holding any pair of transmitters that could violate the protocol model.

    A transmitter in one tile can disturb a receiver of another tile's
    sender only if the two senders are closer than ``(2 + Delta) M``; tiles
    are joined when their minimum torus gap is below
    :func:`interference_reach`, which is never smaller than that.
    """
    if Delta < 0:
        raise DomainError(f"Delta must be non-negative, got {Delta}")
    T, a = tiling.tiles_per_axis, tiling.a
    reach = interference_reach(M, Delta, a)
    span = int(math.ceil(reach / a)) + 1
    offsets = [
        (di, dj)
        for di in range(-span, span + 1)
        for dj in range(-span, span + 1)
        if (di, dj) != (0, 0) and a * math.hypot(max(0, abs(di) - 1), max(0, abs(dj) - 1)) < reach
    ]
    adjacency = []
    for k in range(tiling.count):
        i, j = divmod(k, T)
        nb = {((i + di) % T) * T + (j + dj) % T for di, dj in offsets}
        nb.discard(k)
        adjacency.append(nb)
    return InterferenceGraph(adjacency, reach, Delta)


def brute_force_interference_graph(tiling: Tiling, M: float, Delta: float) -> InterferenceGraph:
    reach = interference_reach(M, Delta, tiling.a)
    N = tiling.count
    adjacency = [set() for _ in range(N)]
    for u in range(N):
        for v in range(u + 1, N):
            if tile_gap(tiling, u, v) < reach:
                adjacency[u].add(v)
                adjacency[v].add(u)
    return InterferenceGraph(adjacency, reach, Delta)


def color_tiles(graph: InterferenceGraph) -> list[int]:
    """Greedy first-fit coloring in index order; uses at most J + 1 colors."""
    colors = [-1] * len(graph.adjacency)
    for v, nb in enumerate(graph.adjacency):
        taken = {colors[u] for u in nb if colors[u] >= 0}
        c = 0
        while c in taken:
            c += 1
        colors[v] = c
    return colors


def is_proper(graph: InterferenceGraph, colors) -> bool:
    return all(colors[u] != colors[v] for u, v in graph.edges())


@dataclass
class FlowSet:
    sources: np.ndarray
    destinations: np.ndarray
    paths: list[PathResult]
    delta: float
    M: float

    @property
    def failed(self) -> int:
        return sum(not p.delivered for p in self.paths)

    @property
    def delivered_paths(self) -> list[PathResult]:
        return [p for p in self.paths if p.delivered]


def route_flows(
    field: NodeField,
    spec: StrategySpec,
    delta: float,
    seed: int,
    flows: int | None = None,
    policy: DeadEndPolicy = DeadEndPolicy(),
) -> FlowSet:
    """Pair the nodes at random into ``n/2`` flows and route each progressively.

    Every relay hop must cut the torus distance to the destination by at
    least ``delta * M``; candidates failing that are filtered out before
    the strategy picks. The delivery hop into the destination is exempt.
    """
    if not field.torus:
        raise DomainError("capacity routing needs a torus field")
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    n = field.n
    flows = n // 2 if flows is None else flows
    if not 1 <= flows <= n // 2:
        raise DomainError(f"flows must lie in [1, n/2], got {flows}")
    perm = np.random.default_rng(seed).permutation(n)
    sources, destinations = perm[:flows], perm[flows:2 * flows]
    step = delta * field.M
    budget = int(math.floor(1.0 / step)) + 1
    pos = field.positions
    paths = []
    for i, (s, t) in enumerate(zip(sources, destinations)):
        rng = np.random.default_rng([seed, i])
        paths.append(_route(field, spec, pos[s], pos[t], rng, policy, budget, int(s), int(t), min_progress=step))
    return FlowSet(sources, destinations, paths, delta, field.M)


@dataclass
class TileReport:
    a: float
    tiles: int
    colors_used: int
    J: int
    max_tile_hops: int
    H_proxy: float
    mu_bound: float
    achieved_rate: float
    target_rate: float
    failed_flows: int
    flows: int
    max_hops_in_tile_per_flow: int
    max_tiles_per_flow: int
    max_path_hops: int
    mean_touch_probability: float
    touch_bound: float
    tile_hops: list[int] = field(repr=False, default_factory=list)
    tile_touches: list[int] = field(repr=False, default_factory=list)

    @property
    def rate_scaled(self) -> float:
        """Achieved rate in units of ``1 / sqrt(n ln n)``."""
        return self.achieved_rate / self.target_rate

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "tiles": self.tiles,
            "colors_used": self.colors_used,
            "J": self.J,
            "max_tile_hops": self.max_tile_hops,
            "mu_bound": self.mu_bound,
            "achieved_rate": self.achieved_rate,
            "target_rate": self.target_rate,
            "failed_flows": self.failed_flows,
            "flows": self.flows,
            "H_proxy": self.H_proxy,
            "max_hops_in_tile_per_flow": self.max_hops_in_tile_per_flow,
            "max_tiles_per_flow": self.max_tiles_per_flow,
            "max_path_hops": self.max_path_hops,
            "mean_touch_probability": self.mean_touch_probability,
            "touch_bound": self.touch_bound,
            "tile_hops": list(self.tile_hops),
        }


def congestion_report(
    tiling: Tiling,
    flows: FlowSet,
    graph: InterferenceGraph,
    colors,
) -> TileReport:
    """Per-tile hop load, the busiest tile, and the slot-normalized rate.

    A hop is charged to the tile of its transmitter; a flow touches every
    tile holding one of its path nodes.
    """
    n = tiling.n
    hops_per_tile = np.zeros(tiling.count, dtype=np.int64)
    touches = np.zeros(tiling.count, dtype=np.int64)
    worst_in_tile = worst_tiles = worst_hops = 0
    touched_total = 0
    delivered = flows.delivered_paths
    for path in delivered:
        pts = np.asarray(path.positions)
        tx = tiling.tile_of(pts[:-1])
        per_tile = np.bincount(tx, minlength=tiling.count)
        hops_per_tile += per_tile
        touched = np.unique(tiling.tile_of(pts))
        touches[touched] += 1
        touched_total += len(touched)
        worst_in_tile = max(worst_in_tile, int(per_tile.max()))
        worst_tiles = max(worst_tiles, len(touched))
        worst_hops = max(worst_hops, path.hop_count)
    colors_used = max(colors) + 1
    max_tile_hops = int(hops_per_tile.max())
    achieved = 1.0 / (colors_used * max_tile_hops) if max_tile_hops else float("inf")
    count = len(delivered)
    return TileReport(
        a=tiling.a,
        tiles=tiling.count,
        colors_used=colors_used,
        J=graph.J,
        max_tile_hops=max_tile_hops,
        H_proxy=SQRT2 / flows.delta * int(touches.max()),
        mu_bound=mu_bound(n, flows.delta),
        achieved_rate=achieved,
        target_rate=1.0 / math.sqrt(n * math.log(n)),
        failed_flows=flows.failed,
        flows=len(flows.paths),
        max_hops_in_tile_per_flow=worst_in_tile,
        max_tiles_per_flow=worst_tiles,
        max_path_hops=worst_hops,
        mean_touch_probability=touched_total / (count * tiling.count) if count else 0.0,
        touch_bound=worst_tiles / tiling.count,
        tile_hops=hops_per_tile.tolist(),
        tile_touches=touches.tolist(),
    )


def schedule_violations(flows: FlowSet, tiling: Tiling, colors, Delta: float, limit: int | None = None) -> int:
    """Count protocol-model violations when all same-colored tiles transmit at once.

    Every hop is checked against every transmitter of every other tile of
    its color: the receiver must sit at least ``(1 + Delta) M`` from each.
    """
    M = flows.M
    tx, rx = [], []
    for path in flows.delivered_paths:
        pts = np.asarray(path.positions)
        tx.append(pts[:-1])
        rx.append(pts[1:])
    tx, rx = np.concatenate(tx), np.concatenate(rx)
    if limit is not None:
        tx, rx = tx[:limit], rx[:limit]
    tx_tile = tiling.tile_of(tx)
    color = np.asarray(colors)[tx_tile]
    guard = (1.0 + Delta) * M
    index = NodeField(tx, guard, torus=True)
    bad = 0
    for h in range(len(rx)):
        idx, _ = index.disk(rx[h])
        clash = (color[idx] == color[h]) & (tx_tile[idx] != tx_tile[h])
        bad += int(clash.sum())
    return bad


def run_capacity(
    scaling: ScalingParams,
    spec: StrategySpec,
    delta: float,
    Delta: float,
    seed: int,
    flows: int | None = None,
):
    """Field, tiling, interference graph, coloring, flows and their report for one seed."""
    tiling = build_tiling(scaling)
    graph = build_interference_graph(tiling, scaling.M, Delta)
    colors = color_tiles(graph)
    fld = generate_field(scaling, seed, torus=True)
    flow_set = route_flows(fld, spec, delta, seed, flows)
    report = congestion_report(tiling, flow_set, graph, colors)
    return report, flow_set, tiling, graph, colors
