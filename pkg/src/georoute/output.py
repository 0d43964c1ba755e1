"""Deterministic writers for histograms, paths, tile reports and run manifests.

Floats are rounded to 9 significant digits and JSON keys keep a fixed
order, so identical inputs give byte-identical files.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .continuum import DelayHistogram, round_sig
from .core import DomainError

MANIFEST_SUFFIX = ".manifest.json"


def fmt(x) -> str:
    if isinstance(x, bool) or not isinstance(x, float):
        return str(x)
    return f"{x:.9g}"


def _clean(obj):
    if isinstance(obj, float):
        return round_sig(obj) if math.isfinite(obj) else obj
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dump_json(data, path) -> Path:
    path = Path(path)
    text = json.dumps(_clean(data), indent=2) + "\n"
    path.write_text(text)
    return path


def manifest_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + MANIFEST_SUFFIX)


def emit_histogram(hist: DelayHistogram, path, fmt_name: str = "json", manifest: str | None = None) -> Path:
    """Write ``hist`` as JSON (schema keys in fixed order) or CSV (one row per bin)."""
    if hist.trials < 1 or sum(hist.counts) + hist.censored != hist.trials:
        raise DomainError("histogram is inconsistent or has no trials; nothing written")
    path = Path(path)
    if fmt_name == "json":
        data = hist.to_dict()
        if manifest is not None:
            data["manifest"] = manifest
        return dump_json(data, path)
    if fmt_name != "csv":
        raise DomainError(f"unknown format {fmt_name!r}")
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["bin_lo", "bin_hi", "count"])
        for lo, hi, c in zip(hist.edges[:-1], hist.edges[1:], hist.counts):
            w.writerow([lo, hi, c])
    return path


def load_histogram(path) -> DelayHistogram:
    data = json.loads(Path(path).read_text())
    return DelayHistogram.from_dict(data)


def _rows(path, header, rows) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def emit_trajectory(points, path) -> Path:
    return _rows(path, ["hop", "x", "y"], ((i, float(p[0]), float(p[1])) for i, p in enumerate(points)))


def emit_field(positions, path) -> Path:
    return _rows(path, ["x", "y"], ((float(x), float(y)) for x, y in positions))


def emit_path(result, path) -> Path:
    """Relay sequence of a routed packet: ``hop,node,x,y``."""
    rows = ((i, node, float(p[0]), float(p[1])) for i, (node, p) in enumerate(zip(result.hops, result.positions)))
    return _rows(path, ["hop", "node", "x", "y"], rows)


def emit_coloring(colors, path) -> Path:
    return _rows(path, ["tile", "color"], enumerate(colors))


def emit_tile_report(report, path, manifest: str | None = None) -> Path:
    data = report.to_dict()
    if manifest is not None:
        data["manifest"] = manifest
    return dump_json(data, path)


@dataclass
class RunManifest:
    """What ran and how: enough to rerun and get the same files."""

    config: dict
    version: str
    master_seed: int
    derived_seeds: dict = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)
    wall_clock_seconds: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "version": self.version,
            "master_seed": self.master_seed,
            "derived_seeds": self.derived_seeds,
            "outputs": list(self.outputs),
            "wall_clock_seconds": self.wall_clock_seconds,
        }

    def write(self, path) -> Path:
        return dump_json(self.to_dict(), path)
