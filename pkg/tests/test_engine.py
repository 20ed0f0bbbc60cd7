"""Compiled kernel versus reference pipeline: bit-identical outcomes."""

from __future__ import annotations

import numpy as np
import pytest

from leaksim.channels import NoiseParams
from leaksim.engine import (
    HAS_NUMBA,
    run_point,
    run_point_kernel,
    run_point_reference,
)
from leaksim.simulator import Architecture, LeakageModel, TrialConfig

needs_numba = pytest.mark.skipif(not HAS_NUMBA, reason="numba unavailable")

ARCHS = (Architecture.HYPERFINE_SWAP_LRC, Architecture.PURE_ZEEMAN,
         Architecture.MIXED_SPECIES)
MODELS = (LeakageModel.DEPOLARIZING, LeakageModel.MOLMER_SORENSEN)


def _config(arch, model, p_M=0.0, d=3, p_s=3e-2, seed=1234, trials=80):
    return TrialConfig(arch=arch, model=model, d=d,
                       noise=NoiseParams(p_s_2q=p_s, p_M=p_M), seed=seed,
                       trials=trials)


@needs_numba
@pytest.mark.parametrize("arch", ARCHS)
@pytest.mark.parametrize("model", MODELS)
def test_kernel_matches_reference_trial_for_trial(arch, model):
    config = _config(arch, model, p_M=7.75e-4)
    kernel = run_point(config, backend="kernel")
    reference = run_point(config, backend="reference")
    assert np.array_equal(kernel, reference)
    assert kernel.shape == (config.trials, 2)


@needs_numba
def test_kernel_matches_reference_at_distance_five():
    config = _config(Architecture.MIXED_SPECIES,
                     LeakageModel.DEPOLARIZING, p_M=7.75e-3, d=5, trials=40)
    assert np.array_equal(run_point(config, backend="kernel"),
                          run_point(config, backend="reference"))


@needs_numba
def test_kernel_matches_reference_with_leaked_measurement_coin():
    config = TrialConfig(arch=Architecture.MIXED_SPECIES,
                         model=LeakageModel.MOLMER_SORENSEN, d=3,
                         noise=NoiseParams(p_s_2q=0.1), seed=77, trials=80,
                         leaked_meas_random=True)
    assert np.array_equal(run_point(config, backend="kernel"),
                          run_point(config, backend="reference"))


@needs_numba
def test_chunked_execution_is_equivalent_to_one_block():
    config = _config(Architecture.MIXED_SPECIES,
                     LeakageModel.MOLMER_SORENSEN, trials=100)
    whole = run_point(config, 0, 100, backend="kernel")
    parts = np.concatenate([
        run_point(config, 0, 37, backend="kernel"),
        run_point(config, 37, 63, backend="kernel"),
    ])
    assert np.array_equal(whole, parts)
    ref_parts = np.concatenate([
        run_point(config, 0, 37, backend="reference"),
        run_point(config, 37, 63, backend="reference"),
    ])
    assert np.array_equal(whole, ref_parts)


@needs_numba
def test_kernel_debug_trial_replays_the_reference_record():
    from leaksim.decoder import decode_record
    from leaksim.rng import CounterStream, derive_trial_seed
    from leaksim.simulator import run_trial

    config = _config(Architecture.HYPERFINE_SWAP_LRC,
                     LeakageModel.MOLMER_SORENSEN, p_M=0.0, p_s=0.1,
                     trials=5)
    fail, (syn, fx, fz) = run_point_kernel(config, debug_trial=3)
    rng = CounterStream(derive_trial_seed(config.seed, 3))
    record = run_trial(config, rng)
    assert np.array_equal(syn, record.syndromes)
    assert np.array_equal(fx, record.final_x)
    assert np.array_equal(fz, record.final_z)
    result = decode_record(record)
    assert fail[3, 0] == result.x_failure
    assert fail[3, 1] == result.z_failure


def test_reference_backend_runs_without_kernel():
    config = _config(Architecture.PURE_ZEEMAN,
                     LeakageModel.MOLMER_SORENSEN, trials=10)
    bits = run_point(config, backend="reference")
    assert bits.shape == (10, 2)
    assert set(np.unique(bits)).issubset({0, 1})


def test_unknown_backend_is_rejected():
    config = _config(Architecture.PURE_ZEEMAN,
                     LeakageModel.MOLMER_SORENSEN, trials=1)
    with pytest.raises(ValueError):
        run_point(config, backend="gpu")
