"""Monte Carlo estimation: points, sweeps, intervals, exponent fits.

A sweep is an ordered list of trial configurations; every point owns a
seed derived from the run seed and its grid index, and every trial owns
a stream derived from the point seed and its global trial index.  Trial
outcomes therefore never depend on how work is chunked across
processes, so output files are byte-identical for any worker count
(``LEAKSIM_THREADS`` or the ``threads`` argument).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channels import NoiseParams
from .engine import run_point
from .rng import derive_point_seed
from .simulator import Architecture, LeakageModel, TrialConfig

# Column order of the delimited output; emit() relies on it verbatim.
CSV_FIELDS = (
    "arch", "model", "d", "rounds", "p_s", "p_s_1q", "p_M", "sigma_uG",
    "trials", "failures_x", "failures_z", "failures", "p_L", "ci_lo",
    "ci_hi", "seed",
)


@dataclass(frozen=True)
class SweepRecord:
    """One Monte Carlo point, carrying every output column."""

    arch: str
    model: str
    d: int
    rounds: int
    p_s: float
    p_s_1q: float
    p_M: float
    sigma_uG: float | None
    trials: int
    failures_x: int
    failures_z: int
    failures: int
    p_L: float
    ci_lo: float
    ci_hi: float
    seed: int


def wilson_interval(failures: int, trials: int, z: float = 1.96):
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError(f"trials must be positive, got {trials}")
    if not 0 <= failures <= trials:
        raise ValueError(f"failures {failures} outside [0, {trials}]")
    if z <= 0:
        raise ValueError(f"z must be positive, got {z}")
    p = failures / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2.0 * trials)) / denom
    half = (z / denom) * math.sqrt(p * (1.0 - p) / trials
                                   + z2 / (4.0 * trials * trials))
    return max(0.0, center - half), min(1.0, center + half)


def thread_count(threads: int | None = None) -> int:
    """Resolve the worker count (argument wins over LEAKSIM_THREADS)."""
    if threads is None:
        raw = os.environ.get("LEAKSIM_THREADS", "1")
        try:
            threads = int(raw)
        except ValueError:
            raise ValueError(f"LEAKSIM_THREADS={raw!r} is not an integer")
    if threads < 1:
        raise ValueError(f"thread count must be >= 1, got {threads}")
    return threads


def _chunk_bounds(trials: int, n_chunks: int):
    n_chunks = max(1, min(n_chunks, trials))
    base, rem = divmod(trials, n_chunks)
    bounds = []
    start = 0
    for i in range(n_chunks):
        count = base + (1 if i < rem else 0)
        if count:
            bounds.append((start, count))
        start += count
    return bounds


def _count_chunk(args):
    config, start, count, backend = args
    bits = run_point(config, start, count, backend=backend)
    fx = int(bits[:, 0].sum())
    fz = int(bits[:, 1].sum())
    fany = int(bits.any(axis=1).sum())
    return fx, fz, fany


def estimate_point(config: TrialConfig, backend: str = "auto",
                   threads: int | None = None) -> SweepRecord:
    """Estimate the logical failure rate of one configuration.

    ``config.seed`` is the point seed; per-trial streams derive from it
    and the global trial index, so results do not depend on ``threads``.
    """
    workers = thread_count(threads)
    bounds = _chunk_bounds(config.trials, workers)
    if len(bounds) == 1:
        counts = [_count_chunk((config, 0, config.trials, backend))]
    else:
        jobs = [(config, start, count, backend) for start, count in bounds]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(_count_chunk, jobs))
    failures_x = sum(c[0] for c in counts)
    failures_z = sum(c[1] for c in counts)
    failures = sum(c[2] for c in counts)
    ci_lo, ci_hi = wilson_interval(failures, config.trials)
    noise = config.noise
    return SweepRecord(
        arch=config.arch.token,
        model=config.model.token,
        d=config.d,
        rounds=config.rounds,
        p_s=noise.p_s_2q,
        p_s_1q=noise.p_s_1q,
        p_M=noise.p_M,
        sigma_uG=noise.sigma_uG,
        trials=config.trials,
        failures_x=failures_x,
        failures_z=failures_z,
        failures=failures,
        p_L=failures / config.trials,
        ci_lo=ci_lo,
        ci_hi=ci_hi,
        seed=config.seed,
    )


def build_grid(arch, model, d: int, ps_values, trials: int, seed: int, *,
               p_M: float | None = None, sigma_uG: float | None = None,
               rounds: int | None = None,
               leaked_meas_random: bool = False) -> list[TrialConfig]:
    """Expand a scattering-rate sweep into per-point configurations.

    Point i gets seed ``derive_point_seed(seed, i)``; the emitted record
    carries that derived seed, so any row can be reproduced standalone.
    """
    if isinstance(arch, str):
        arch = Architecture.from_token(arch)
    if isinstance(model, str):
        model = LeakageModel.from_token(model)
    configs = []
    for i, p_s in enumerate(ps_values):
        noise = NoiseParams(p_s_2q=float(p_s), p_M=p_M, sigma_uG=sigma_uG)
        configs.append(TrialConfig(
            arch=arch, model=model, d=d, noise=noise,
            seed=derive_point_seed(seed, i), rounds=rounds, trials=trials,
            leaked_meas_random=leaked_meas_random))
    return configs


def sweep(configs, backend: str = "auto", threads: int | None = None):
    """Yield one :class:`SweepRecord` per configuration, in grid order."""
    for config in configs:
        yield estimate_point(config, backend=backend, threads=threads)


def fit_exponent(points) -> float:
    """Least-squares slope of log(p_L) against log(p_s).

    Accepts :class:`SweepRecord` items or plain ``(p_s, p_L)`` pairs.
    Zero failure rates cannot enter a log-log fit and raise a
    ``ValueError`` naming the offending point.
    """
    xs = []
    ys = []
    for point in points:
        if hasattr(point, "p_s"):
            x, y = point.p_s, point.p_L
        else:
            x, y = point
        if x <= 0:
            raise ValueError(f"p_s={x} is not positive")
        if y <= 0:
            raise ValueError(
                f"p_L={y} at p_s={x}: points with zero observed failures "
                "cannot enter a log-log fit; increase trials")
        xs.append(float(x))
        ys.append(float(y))
    if len(xs) < 2:
        raise ValueError(f"need at least two points, got {len(xs)}")
    slope = np.polyfit(np.log(xs), np.log(ys), 1)[0]
    return float(slope)
