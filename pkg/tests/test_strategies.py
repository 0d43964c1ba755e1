import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from georoute.core import DomainError, ScalingParams
from georoute.strategies import (
    HALF_PI, QUARTER_PI, Kind, StrategySpec, draw_steps, draw_window, sample_fractional,
    sample_quadrant_adversarial, sample_quadrant_uniform, sample_random_disk, sample_sector, sample_step,
    sample_straight_line,
)

DRAWS = 10**6
SCALING = ScalingParams(1000, 1.717)
SECTOR60 = StrategySpec.sector(-math.pi / 6, math.pi / 6)


def projection(spec, seed=0, size=DRAWS):
    length, angle, informed = draw_steps(spec, np.random.default_rng(seed), size)
    return length * np.cos(angle), length, angle, informed


def test_straight_line_is_deterministic():
    s = sample_straight_line(SCALING)
    assert s.step.length == pytest.approx(SCALING.M) and s.step.angle == 0.0 and s.informed
    hops = math.ceil(1.0 / SCALING.M)
    assert (hops - 1) * SCALING.M < 1.0 <= hops * SCALING.M


def test_sector_mean_projection():
    x, *_ = projection(SECTOR60)
    assert x.mean() == pytest.approx(2 / math.pi, abs=0.002)
    x, *_ = projection(StrategySpec.random_disk(), seed=1)
    assert x.mean() == pytest.approx(0.0, abs=0.002)


def test_narrow_sector_approaches_mean_radius():
    theta = 1e-4
    x, length, *_ = projection(StrategySpec.sector(-theta, theta))
    assert x.mean() == pytest.approx(2 / 3, abs=0.002)


def test_sector_rejects_bad_angles():
    with pytest.raises(DomainError):
        StrategySpec.sector(0.5, 0.5)
    with pytest.raises(DomainError):
        StrategySpec.sector(-4.0, 0.0)
    with pytest.raises(DomainError):
        StrategySpec.sector(math.pi / 2, math.pi)  # drifts away from the destination
    with pytest.raises(DomainError):
        sample_sector(0.3, 0.1, SCALING, np.random.default_rng(0))


def test_quadrant_angle_density_and_mean():
    x, _, angle, _ = projection(StrategySpec.quadrant())
    assert np.all(np.abs(angle) < HALF_PI)
    w = 0.05
    at0 = np.mean(np.abs(angle) < w / 2)
    at45 = np.mean(np.abs(angle - QUARTER_PI) < w / 2)
    assert at0 / at45 == pytest.approx(2.0, rel=0.05)
    assert x.mean() == pytest.approx(16 / (3 * math.pi**2), abs=0.002)


def test_adversarial_credit():
    x, length, angle, _ = projection(StrategySpec.adversarial())
    # the step angle is the worse edge, so its cosine is min(cos g, sin g)
    g = np.abs(angle)
    assert np.all((g >= QUARTER_PI) & (g <= HALF_PI))
    assert np.all(np.cos(g) <= np.sin(g) + 1e-15)
    assert x.mean() == pytest.approx((2 / 3) * (4 / math.pi) * (1 - math.sqrt(2) / 2), abs=0.002)
    assert min(math.cos(QUARTER_PI), math.sin(QUARTER_PI)) == pytest.approx(math.sqrt(2) / 2)


def test_fractional_mixture():
    spec = StrategySpec.fractional(0.35)
    x, _, _, informed = projection(spec)
    assert informed.mean() == pytest.approx(0.35, abs=0.002)
    assert x.mean() == pytest.approx(0.35 * 16 / (3 * math.pi**2), abs=0.002)


def test_fractional_near_one_matches_inner():
    a, *_ = projection(StrategySpec.fractional(1 - 1e-12), seed=3, size=10**5)
    b, *_ = projection(StrategySpec.quadrant(), seed=4, size=10**5)
    assert stats.ks_2samp(a, b).pvalue > 0.01


def test_fractional_validation():
    for p in (0.0, 1.0, 1.5, -0.2, None):
        with pytest.raises(DomainError):
            StrategySpec.fractional(p)
    with pytest.raises(DomainError):
        StrategySpec.fractional(0.5, StrategySpec.fractional(0.5))
    with pytest.raises(DomainError):
        sample_fractional(1.2, None, SCALING, np.random.default_rng(0))


def test_drift_ordering():
    means = [projection(s, seed=i)[0].mean() for i, s in enumerate([
        StrategySpec.straight_line(), SECTOR60, StrategySpec.quadrant(), StrategySpec.adversarial(),
        StrategySpec.fractional(0.35), StrategySpec.random_disk(),
    ])]
    assert means[0] == 1.0
    # every gap is far beyond 10 standard errors (about 0.0005 at 1e6 draws)
    assert all(a - b > 0.01 for a, b in zip(means, means[1:5]))
    assert means[4] - means[5] > 0.01


ALL_SPECS = [StrategySpec.straight_line(), SECTOR60, StrategySpec.quadrant(), StrategySpec.adversarial(),
             StrategySpec.fractional(0.35), StrategySpec.random_disk(), StrategySpec.sector(0, HALF_PI)]


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: s.describe())
def test_scalar_samplers_within_range_and_reproducible(spec):
    a = [sample_step(spec, SCALING, np.random.default_rng(11)) for _ in range(3)]
    rng1, rng2 = np.random.default_rng(5), np.random.default_rng(5)
    s1 = [sample_step(spec, SCALING, rng1) for _ in range(200)]
    s2 = [sample_step(spec, SCALING, rng2) for _ in range(200)]
    assert s1 == s2 and a[0] == a[1] == a[2]
    assert all(0.0 <= s.step.length <= SCALING.M for s in s1)


def test_named_samplers_agree_with_spec():
    for fn, spec in ((sample_quadrant_uniform, StrategySpec.quadrant()),
                     (sample_quadrant_adversarial, StrategySpec.adversarial()),
                     (sample_random_disk, StrategySpec.random_disk())):
        assert fn(SCALING, np.random.default_rng(2)) == sample_step(spec, SCALING, np.random.default_rng(2))
    assert sample_sector(-0.5, 0.5, SCALING, np.random.default_rng(2)) == \
        sample_step(StrategySpec.sector(-0.5, 0.5), SCALING, np.random.default_rng(2))


spec_strategy = st.one_of(
    st.just(StrategySpec.straight_line()),
    st.just(StrategySpec.quadrant()),
    st.just(StrategySpec.adversarial()),
    st.just(StrategySpec.random_disk()),
    st.floats(-1.4, 0.0).flatmap(lambda lo: st.floats(lo + 0.05, 1.5).map(lambda hi: StrategySpec.sector(lo, hi))),
    st.floats(0.01, 0.99).map(StrategySpec.fractional),
)


@given(spec_strategy)
def test_spec_dict_roundtrip(spec):
    assert StrategySpec.from_dict(spec.to_dict()) == spec


@settings(max_examples=50)
@given(spec_strategy, st.integers(0, 2**32))
def test_draw_lengths_bounded(spec, seed):
    length, angle, informed = draw_steps(spec, np.random.default_rng(seed), 500)
    assert np.all((length >= 0) & (length <= 1))
    assert np.all(np.abs(angle) <= math.pi)
    if spec.kind is not Kind.FRACTIONAL:
        assert informed.all()


def test_windows():
    rng = np.random.default_rng(0)
    with pytest.raises(DomainError):
        draw_window(StrategySpec.straight_line(), rng)
    assert draw_window(SECTOR60, rng) == (-math.pi / 6, math.pi / 6, True)
    for _ in range(200):
        lo, hi, inf = draw_window(StrategySpec.quadrant(), rng)
        assert hi - lo == pytest.approx(HALF_PI) and lo <= 0.0 <= hi and inf
        lo, hi, _ = draw_window(StrategySpec.adversarial(), rng)
        assert (lo, hi) in ((-HALF_PI, -QUARTER_PI), (QUARTER_PI, HALF_PI))
    coins = [draw_window(StrategySpec.fractional(0.35), rng)[2] for _ in range(20000)]
    assert np.mean(coins) == pytest.approx(0.35, abs=0.015)
