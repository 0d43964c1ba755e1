"""Acceptance criteria, each at its stated tolerance.

Every test logs one PASS/FAIL line; the lines are repeated in the terminal
summary under "acceptance criteria".
"""
import json
import math
import time

import numpy as np
import pytest

from georoute.analytics import beta_sector, drift_constant, predicted_delay, triangular_array_check
from georoute.capacity import is_proper, run_capacity
from georoute.continuum import run_walk
from georoute.core import PolarStep, ScalingParams, exact_progress, progress_bounds
from georoute.reproduce import EXPERIMENTS, reproduce_paper
from georoute.seeding import derive_seed
from georoute.strategies import StrategySpec

pytestmark = pytest.mark.acceptance

SEED = 7
SECTOR60 = StrategySpec.sector(-math.pi / 6, math.pi / 6)


@pytest.fixture(scope="module")
def reproduction(tmp_path_factory):
    root = tmp_path_factory.mktemp("reproduce")
    rows = reproduce_paper(SEED, root / "run1")
    reproduce_paper(SEED, root / "run2")
    return {r.experiment.label: r for r in rows}, root


def _bands(rows, labels):
    parts, ok = [], True
    for label in labels:
        r = rows[label]
        e = r.experiment
        good = e.lo <= r.simulated <= e.hi
        ok &= good
        parts.append(f"{label}={r.simulated:.2f} in [{e.lo:g},{e.hi:g}] {'ok' if good else 'MISS'}")
    return ok, parts


def test_c1_small_network_reproduction(reproduction, acceptance_log):
    rows, _ = reproduction
    ok, parts = _bands(rows, ["n1000-greedy", "n1000-sector60", "n1000-quadrant", "n1000-fractional"])
    seconds = sum(r.seconds for label, r in rows.items() if label.startswith("n1000"))
    ok &= seconds < 60
    acceptance_log("C1 N=1000 reproduction", ok, "; ".join(parts) + f"; runtime {seconds:.1f}s < 60s")
    assert ok


def test_c2_large_network_reproduction(reproduction, acceptance_log):
    rows, _ = reproduction
    ok, parts = _bands(rows, ["n10000-greedy", "n10000-quadrant", "n10000-fractional"])
    seconds = sum(r.seconds for label, r in rows.items() if label.startswith("n10000"))
    ok &= seconds < 300
    acceptance_log("C2 N=10000 reproduction", ok, "; ".join(parts) + f"; runtime {seconds:.1f}s < 300s")
    assert ok


def test_c3_analytic_constants(reproduction, acceptance_log):
    rows, _ = reproduction
    beta = beta_sector(-math.pi / 6, math.pi / 6).value
    beta_ok = abs(beta - 2 / math.pi) <= 1e-6
    sector = next(e for e in EXPERIMENTS if e.label == "n1000-sector60")
    pred = predicted_delay(beta, 1.0, sector.scaling()).point_estimate
    pred_ok = abs(pred - 11.01) <= 0.05
    lo, hi = 0.85 / 0.35, 1.15 / 0.35
    ratios = {N: rows[f"n{N}-fractional"].simulated / rows[f"n{N}-quadrant"].simulated for N in (1000, 10000)}
    ratio_ok = all(lo <= r <= hi for r in ratios.values())
    ok = beta_ok and pred_ok and ratio_ok
    acceptance_log("C3 analytic constants", ok,
                   f"beta_sector={beta:.9f} (2/pi={2 / math.pi:.9f}); predicted sector delay={pred:.4f}; "
                   + "; ".join(f"frac/quad N={N}: {r:.3f} in [{lo:.3f},{hi:.3f}]" for N, r in ratios.items()))
    assert ok


def test_c4_theorem1_convergence(acceptance_log):
    t0 = time.perf_counter()
    ok, parts = True, []
    for spec in (SECTOR60, StrategySpec.quadrant()):
        beta = drift_constant(spec)
        norms = []
        for n in (10**4, 10**5, 10**6):
            sc = ScalingParams(n, 1.0)
            label = f"theorem1-{spec.kind.value}-{n}"
            taus = [run_walk(spec, sc, derive_seed(SEED, label, t)).tau for t in range(100)]
            norms.append(float(np.mean(taus)) * sc.M * beta)
        devs = [abs(v - 1.0) for v in norms]
        last_ok = 0.95 <= norms[-1] <= 1.05
        shrink = devs[0] > devs[1] > devs[2]
        ok &= last_ok and shrink
        parts.append(f"{spec.kind.value}: tau M beta = " + ", ".join(f"{v:.4f}" for v in norms))
    seconds = time.perf_counter() - t0
    ok &= seconds < 300
    acceptance_log("C4 continuum convergence", ok, "; ".join(parts) + f"; runtime {seconds:.1f}s")
    assert ok


def test_c5_progress_sandwich(acceptance_log):
    rng = np.random.default_rng(SEED)
    cases = 10**6
    length = rng.random(cases) * 0.2
    angle = rng.uniform(-math.pi, math.pi, cases)
    eps = rng.uniform(1e-3, 0.5, cases)
    dist = length + eps + rng.random(cases) * 2.0 + 1e-9
    violations = 0
    for s, a, e, d in zip(length.tolist(), angle.tolist(), eps.tolist(), dist.tolist()):
        step = PolarStep(s, a)
        lo, hi = progress_bounds(step, e, dist=d)
        p = exact_progress(d, step)
        if not lo <= p <= hi:
            violations += 1
    ok = violations == 0
    acceptance_log("C5 progress sandwich", ok, f"{violations} violations in {cases} cases")
    assert ok


def test_c6_concentration(acceptance_log):
    rows = triangular_array_check(SECTOR60, [10**3, 10**4, 10**5, 10**6], 1000, SEED, eps=0.05)
    fracs = [r.exceedance for r in rows]
    monotone = all(a >= b for a, b in zip(fracs, fracs[1:])) and fracs[0] > fracs[-1]
    zero = round(fracs[-1] * 1000) == 0
    ok = monotone and zero
    acceptance_log("C6 concentration", ok,
                   "exceedance " + ", ".join(f"n={r.n}: {r.exceedance:.3f}" for r in rows))
    assert ok


RATE_BAND_C = 2.0
CAP_SEEDS = range(20)


@pytest.fixture(scope="module")
def capacity_suite():
    t0 = time.perf_counter()
    reports = {}
    for n, seeds in ((4000, [0]), (10**4, CAP_SEEDS), (4 * 10**4, [0])):
        sc = ScalingParams(n, 1.177)
        for seed in seeds:
            report, flows, tiling, graph, colors = run_capacity(sc, SECTOR60, 0.5, 0.5, seed)
            reports[(n, seed)] = (report, is_proper(graph, colors))
    return reports, time.perf_counter() - t0


def test_c7_capacity(capacity_suite, acceptance_log):
    reports, seconds = capacity_suite
    main = [reports[(10**4, s)] for s in CAP_SEEDS]
    coloring_ok = all(proper and r.colors_used <= r.J + 1 for r, proper in main)
    claim1 = max(r.max_hops_in_tile_per_flow for r, _ in main)
    claim1_ok = claim1 <= math.ceil(math.sqrt(2) / 0.5)
    H = max(r.max_tile_hops for r, _ in main)
    H_proxy = max(r.H_proxy for r, _ in main)
    mu = main[0][0].mu_bound
    H_ok = H <= mu and H_proxy <= mu and abs(mu - 790.2) <= 0.5
    ref = reports[(4000, 0)][0].rate_scaled
    scaled = {key: r.rate_scaled / ref for key, (r, _) in reports.items()}
    band_ok = all(1 / RATE_BAND_C <= v <= RATE_BAND_C for v in scaled.values())
    ok = coloring_ok and claim1_ok and H_ok and band_ok and seconds < 600
    by_n = {n: [v for (m, _), v in scaled.items() if m == n] for n in (4000, 10**4, 4 * 10**4)}
    acceptance_log(
        "C7 capacity suite", ok,
        f"coloring proper, colors<=J+1 on 20 seeds: {coloring_ok}; max per-flow per-tile hops {claim1} <= 3; "
        f"H raw max {H} / proxy max {H_proxy:.1f} <= mu {mu:.2f}; "
        "rate/ref band [0.5,2]: " + ", ".join(f"n={n}: {min(v):.3f}..{max(v):.3f}" for n, v in by_n.items())
        + f"; runtime {seconds:.1f}s < 600s",
    )
    assert ok


def test_c7b_capacity_flow_failures(capacity_suite, acceptance_log):
    reports, _ = capacity_suite
    fractions = {key: r.failed_flows / r.flows for key, (r, _) in reports.items()}
    worst = max(fractions.values())
    ok = worst < 0.01
    acceptance_log("C7b capacity failed-flow fraction < 1%", ok,
                   f"worst {worst:.4f}; n=10^4 mean "
                   f"{np.mean([v for (n, _), v in fractions.items() if n == 10**4]):.4f}")
    assert ok


def test_c8_determinism(reproduction, acceptance_log):
    _, root = reproduction
    a_dir, b_dir = root / "run1", root / "run2"
    names = sorted(p.name for p in a_dir.iterdir())
    same_names = names == sorted(p.name for p in b_dir.iterdir())
    mismatched = []
    for name in names:
        a, b = (a_dir / name).read_bytes(), (b_dir / name).read_bytes()
        if name == "manifest.json":
            ma, mb = json.loads(a), json.loads(b)
            ma.pop("wall_clock_seconds")
            mb.pop("wall_clock_seconds")
            if ma != mb:
                mismatched.append(name)
        elif a != b:
            mismatched.append(name)
    ok = same_names and not mismatched
    acceptance_log("C8 determinism", ok,
                   f"{len(names)} files compared byte-for-byte (manifest timing excluded); mismatches: {mismatched}")
    assert ok
