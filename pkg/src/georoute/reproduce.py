"""The eight published hop-count experiments, rerun on fresh random fields.

Source (0, 0), destination (0.7, 0.7), 150 trials each. The N=1000 range
is the 1/7 scale (K = 1.717, M = 0.14270), at which the 60 degree sector
prediction is 11.01 hops. The N=10000 range is the value at which greedy
routing averages 28 hops on calibration fields (see ``calibrate_range``),
frozen here so runs do not repeat the bisection.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .analytics import drift_constant
from .continuum import DelayHistogram
from .core import DomainError, ScalingParams
from .discrete import PAPER_DESTINATION, PAPER_SOURCE, discrete_trials
from .output import RunManifest, dump_json, emit_histogram, emit_path
from .seeding import derive_seed
from .strategies import StrategySpec

K_SMALL = 1.717
M_LARGE = 0.03975
TRIALS = 150


class ExperimentError(RuntimeError):
    def __init__(self, label: str, cause: Exception):
        super().__init__(f"[{label}] {cause}")
        self.label = label


@dataclass(frozen=True)
class PaperExperiment:
    label: str
    N: int
    spec: StrategySpec
    paper_mean: float
    lo: float | None  # acceptance band; None for rows reported without a tolerance
    hi: float | None

    def scaling(self) -> ScalingParams:
        if self.N == 1000:
            return ScalingParams(self.N, K_SMALL, d=PAPER_DISTANCE)
        return ScalingParams.with_range(self.N, M_LARGE, d=PAPER_DISTANCE)


PAPER_DISTANCE = math.hypot(PAPER_DESTINATION[0] - PAPER_SOURCE[0], PAPER_DESTINATION[1] - PAPER_SOURCE[1])

SECTOR_60 = StrategySpec.sector(-math.pi / 6, math.pi / 6)
BIASED = StrategySpec.sector(0.0, math.pi / 2)
QUADRANT = StrategySpec.quadrant()
FRACTIONAL = StrategySpec.fractional(0.35)
GREEDY = StrategySpec.straight_line()

EXPERIMENTS = (
    PaperExperiment("n1000-greedy", 1000, GREEDY, 7.0, 6.0, 8.0),
    PaperExperiment("n1000-sector60", 1000, SECTOR_60, 11.0, 9.5, 12.5),
    PaperExperiment("n1000-biased-sector", 1000, BIASED, 15.0, None, None),
    PaperExperiment("n1000-quadrant", 1000, QUADRANT, 15.0, 13.0, 17.0),
    PaperExperiment("n1000-fractional", 1000, FRACTIONAL, 40.0, 35.0, 46.0),
    PaperExperiment("n10000-greedy", 10000, GREEDY, 28.0, 25.0, 31.0),
    PaperExperiment("n10000-quadrant", 10000, QUADRANT, 42.0, 37.0, 48.0),
    PaperExperiment("n10000-fractional", 10000, FRACTIONAL, 120.0, 105.0, 135.0),
)


@dataclass
class ExperimentRow:
    experiment: PaperExperiment
    hist: DelayHistogram
    analytic: float
    seconds: float
    sample_path: object = None

    @property
    def simulated(self) -> float:
        return self.hist.mean

    @property
    def status(self) -> str:
        e = self.experiment
        if e.lo is None:
            return "info"
        return "pass" if e.lo <= self.simulated <= e.hi else "fail"

    def as_record(self) -> dict:
        e = self.experiment
        return {
            "label": e.label,
            "N": e.N,
            "M": e.scaling().M,
            "strategy": e.spec.describe(),
            "paper_mean": e.paper_mean,
            "analytic": self.analytic,
            "simulated_mean": self.simulated,
            "stddev": self.hist.stddev,
            "censored": self.hist.censored,
            "band_lo": e.lo,
            "band_hi": e.hi,
            "status": self.status,
        }


def analytic_delay(exp: PaperExperiment) -> float:
    """Drift prediction ``1 / (p beta M)`` for a unit source distance."""
    return 1.0 / (drift_constant(exp.spec) * exp.scaling().M)


def run_experiment(exp: PaperExperiment, seed: int, trials: int = TRIALS) -> ExperimentRow:
    t0 = time.perf_counter()
    try:
        results = discrete_trials(exp.spec, exp.scaling(), trials, seed, label=exp.label)
    except (DomainError, ValueError, RuntimeError) as exc:
        raise ExperimentError(exp.label, exc) from exc
    values = [r.hop_count for r in results if r.delivered]
    hist = DelayHistogram.from_values(values, trials=trials, censored=trials - len(values))
    return ExperimentRow(exp, hist, analytic_delay(exp), time.perf_counter() - t0, results[0])


def run_paper_experiments(seed: int, trials: int = TRIALS, sizes=(1000, 10000)) -> list[ExperimentRow]:
    return [run_experiment(e, seed, trials) for e in EXPERIMENTS if e.N in sizes]


def format_table(rows: list[ExperimentRow]) -> str:
    head = f"{'experiment':<22}{'paper':>8}{'analytic':>10}{'simulated':>11}{'band':>16}  status"
    lines = [head, "-" * len(head)]
    for r in rows:
        e = r.experiment
        band = "-" if e.lo is None else f"[{e.lo:g}, {e.hi:g}]"
        lines.append(f"{e.label:<22}{e.paper_mean:>8g}{r.analytic:>10.2f}{r.simulated:>11.2f}{band:>16}  {r.status}")
    return "\n".join(lines)


def reproduce_paper(seed: int, out_dir, trials: int = TRIALS, sizes=(1000, 10000)) -> list[ExperimentRow]:
    """Run the suite and write histograms, sample paths, the comparison table and a manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = run_paper_experiments(seed, trials, sizes)
    manifest_name = "manifest.json"
    outputs = []
    for r in rows:
        label = r.experiment.label
        outputs.append(emit_histogram(r.hist, out / f"{label}.hist.json", "json", manifest_name).name)
        outputs.append(emit_path(r.sample_path, out / f"{label}.path.csv").name)
    outputs.append(dump_json({"manifest": manifest_name, "rows": [r.as_record() for r in rows]},
                             out / "comparison.json").name)
    (out / "comparison.txt").write_text(format_table(rows) + "\n")
    outputs.append("comparison.txt")
    manifest = RunManifest(
        config={"command": "reproduce-paper", "trials": trials, "sizes": list(sizes),
                "experiments": [{"label": r.experiment.label, "N": r.experiment.N, "M": r.experiment.scaling().M,
                                 "strategy": r.experiment.spec.to_dict()} for r in rows]},
        version=__version__,
        master_seed=seed,
        derived_seeds={r.experiment.label: {
            "field": [derive_seed(seed, r.experiment.label + "/field", t) for t in range(trials)],
            "route": [derive_seed(seed, r.experiment.label + "/route", t) for t in range(trials)],
        } for r in rows},
        outputs=outputs,
        wall_clock_seconds={r.experiment.label: r.seconds for r in rows},
    )
    manifest.write(out / manifest_name)
    return rows
