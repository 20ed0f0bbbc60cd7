"""Monte Carlo harness: intervals, grids, estimation, exponent fits."""

from __future__ import annotations

import dataclasses
import math

import numpy as np
import pytest

from leaksim.channels import NoiseParams
from leaksim.experiment import (
    CSV_FIELDS,
    SweepRecord,
    build_grid,
    estimate_point,
    fit_exponent,
    sweep,
    thread_count,
    wilson_interval,
)
from leaksim.rng import derive_point_seed
from leaksim.simulator import Architecture, LeakageModel, TrialConfig


def test_wilson_interval_zero_failures_pins_the_floor():
    lo, hi = wilson_interval(0, 100)
    assert lo == 0.0
    assert 0.0 < hi < 0.05


def test_wilson_interval_all_failures_pins_the_ceiling():
    lo, hi = wilson_interval(100, 100)
    assert hi == pytest.approx(1.0, abs=1e-12)
    assert 0.95 < lo < 1.0


def test_wilson_interval_half_is_symmetric_and_sized():
    lo, hi = wilson_interval(50, 100)
    assert (lo + hi) / 2.0 == pytest.approx(0.5, abs=1e-12)
    assert hi - lo == pytest.approx(0.19, abs=0.01)


def test_wilson_interval_brackets_the_point_estimate():
    for failures, trials in ((1, 10), (7, 1000), (499, 500)):
        lo, hi = wilson_interval(failures, trials)
        assert 0.0 <= lo <= failures / trials <= hi <= 1.0


def test_wilson_interval_validation():
    with pytest.raises(ValueError):
        wilson_interval(1, 0)
    with pytest.raises(ValueError):
        wilson_interval(-1, 10)
    with pytest.raises(ValueError):
        wilson_interval(11, 10)
    with pytest.raises(ValueError):
        wilson_interval(1, 10, z=0.0)


def test_thread_count_priority(monkeypatch):
    monkeypatch.delenv("LEAKSIM_THREADS", raising=False)
    assert thread_count() == 1
    assert thread_count(4) == 4
    monkeypatch.setenv("LEAKSIM_THREADS", "3")
    assert thread_count() == 3
    assert thread_count(2) == 2  # explicit argument wins
    monkeypatch.setenv("LEAKSIM_THREADS", "zebra")
    with pytest.raises(ValueError):
        thread_count()
    with pytest.raises(ValueError):
        thread_count(0)


def test_fit_exponent_recovers_exact_power_laws():
    for k in (1.0, 2.0, 3.0):
        points = [(p, 0.7 * p**k) for p in (1e-3, 3e-3, 1e-2, 3e-2)]
        assert fit_exponent(points) == pytest.approx(k, abs=1e-12)


def test_fit_exponent_accepts_records():
    def record(p_s, p_L):
        return SweepRecord(arch="zeeman", model="ms", d=3, rounds=3,
                           p_s=p_s, p_s_1q=0.0, p_M=0.0, sigma_uG=None,
                           trials=1000, failures_x=0, failures_z=0,
                           failures=int(p_L * 1000), p_L=p_L, ci_lo=0.0,
                           ci_hi=1.0, seed=0)

    records = [record(p, 2.0 * p**2) for p in (1e-3, 1e-2, 1e-1)]
    assert fit_exponent(records) == pytest.approx(2.0, abs=1e-12)


def test_fit_exponent_rejects_unusable_points():
    with pytest.raises(ValueError, match="increase trials"):
        fit_exponent([(1e-3, 0.0), (1e-2, 1e-3)])
    with pytest.raises(ValueError):
        fit_exponent([(0.0, 1e-3), (1e-2, 1e-3)])
    with pytest.raises(ValueError):
        fit_exponent([(1e-3, 1e-3)])
    with pytest.raises(ValueError):
        fit_exponent([])


def test_build_grid_derives_point_seeds_in_order():
    grid = build_grid("mixed", "ms", 3, [1e-3, 3e-3, 1e-2], 1000, 42,
                      sigma_uG=10.0)
    assert len(grid) == 3
    for i, config in enumerate(grid):
        assert config.seed == derive_point_seed(42, i)
        assert config.arch is Architecture.MIXED_SPECIES
        assert config.model is LeakageModel.MOLMER_SORENSEN
        assert config.noise.sigma_uG == 10.0
        assert config.noise.p_M == 7.75e-5
        assert config.trials == 1000
    assert [c.noise.p_s_2q for c in grid] == [1e-3, 3e-3, 1e-2]


def test_build_grid_accepts_enum_arguments_and_rounds():
    grid = build_grid(Architecture.PURE_ZEEMAN, LeakageModel.DEPOLARIZING,
                      5, [1e-3], 10, 0, rounds=2, p_M=1e-4)
    assert grid[0].rounds == 2
    assert grid[0].noise.p_M == 1e-4
    assert grid[0].d == 5


def _point(trials=4000, p_s=3e-2, seed=11):
    return TrialConfig(arch=Architecture.PURE_ZEEMAN,
                       model=LeakageModel.MOLMER_SORENSEN, d=3,
                       noise=NoiseParams(p_s_2q=p_s), seed=seed,
                       trials=trials)


def test_estimate_point_record_is_consistent():
    record = estimate_point(_point())
    assert record.arch == "zeeman" and record.model == "ms"
    assert record.d == 3 and record.rounds == 3
    assert record.trials == 4000
    assert record.p_L == record.failures / record.trials
    assert record.ci_lo <= record.p_L <= record.ci_hi
    assert record.failures <= record.failures_x + record.failures_z
    assert max(record.failures_x, record.failures_z) <= record.failures
    assert record.sigma_uG is None
    assert record.seed == _point().seed
    lo, hi = wilson_interval(record.failures, record.trials)
    assert (record.ci_lo, record.ci_hi) == (lo, hi)


def test_estimate_point_is_independent_of_worker_count():
    a = estimate_point(_point(), threads=1)
    b = estimate_point(_point(), threads=3)
    assert a == b


def test_estimate_point_reference_backend_agrees():
    small = _point(trials=60)
    assert estimate_point(small, backend="reference") == estimate_point(
        small, backend="kernel")


def test_sweep_yields_records_in_grid_order():
    grid = build_grid("zeeman", "ms", 3, [1e-2, 3e-2], 2000, 7)
    records = list(sweep(grid))
    assert [r.p_s for r in records] == [1e-2, 3e-2]
    assert all(isinstance(r, SweepRecord) for r in records)
    # Higher scattering rate must not look better at these separations.
    assert records[0].p_L < records[1].p_L


def test_csv_fields_cover_the_record_exactly():
    names = tuple(f.name for f in dataclasses.fields(SweepRecord))
    assert names == CSV_FIELDS


def test_scaled_prediction_matches_quadratic_growth():
    # With no dephasing the Zeeman logical rate grows as the square of
    # the scattering rate: scaling the low point's interval by (3)^2
    # must overlap the interval measured at three times the rate.
    grid = build_grid("zeeman", "ms", 3, [1e-3, 3e-3], 100000, 5)
    low, high = (estimate_point(c) for c in grid)
    pred_lo, pred_hi = low.ci_lo * 9.0, low.ci_hi * 9.0
    assert pred_lo <= high.ci_hi and high.ci_lo <= pred_hi
    ratio = high.p_L / low.p_L
    assert 6.0 < ratio < 13.0


def test_estimate_point_rejects_bad_thread_counts():
    with pytest.raises(ValueError):
        estimate_point(_point(trials=10), threads=-2)


def test_point_estimates_scale_with_trial_count_consistently():
    # Same seed, nested trial prefixes: failures can only grow.
    small = estimate_point(_point(trials=1000))
    large = estimate_point(_point(trials=4000))
    assert small.failures <= large.failures
    assert math.isclose(small.p_L, large.p_L,
                        rel_tol=0.6) or small.failures < 10
