"""Stochastic toric-code memory simulator for trapped-ion architectures.

Pauli-frame simulation of distance-d toric-code syndrome extraction under
photon-scattering, dephasing, and leakage noise, with exact minimum-weight
perfect-matching decoding and a Monte Carlo harness for logical-error-rate
sweeps across hyperfine, Zeeman, and mixed-species qubit assignments.
"""

from __future__ import annotations

from .channels import (
    Channel,
    FaultOutcome,
    NoiseParams,
    bit_twirl_channel,
    dephasing_channel,
    depolarize_channel,
    hyperfine_scatter_channel,
    pM_from_sigma,
    phase_twirl_channel,
    zeeman_scatter_channel,
)
from .decoder import (
    Correction,
    DecodeResult,
    decode_record,
    logical_failure,
    mwpm,
    syndromes_to_defects,
)
from .engine import run_point, run_point_kernel, run_point_reference
from .experiment import (
    CSV_FIELDS,
    SweepRecord,
    build_grid,
    estimate_point,
    fit_exponent,
    sweep,
    thread_count,
    wilson_interval,
)
from .faults import FaultEnumeration, enumerate_single_faults
from .lattice import ToricLayout, build_layout
from .matching import min_weight_perfect_matching
from .rng import CounterStream, derive_point_seed, derive_trial_seed
from .simulator import (
    Architecture,
    LeakageModel,
    TrialConfig,
    TrialRecord,
    extraction_round,
    run_trial,
)

__all__ = [
    "Architecture",
    "CSV_FIELDS",
    "Channel",
    "Correction",
    "CounterStream",
    "DecodeResult",
    "FaultEnumeration",
    "FaultOutcome",
    "LeakageModel",
    "NoiseParams",
    "SweepRecord",
    "ToricLayout",
    "TrialConfig",
    "TrialRecord",
    "bit_twirl_channel",
    "build_grid",
    "build_layout",
    "decode_record",
    "dephasing_channel",
    "depolarize_channel",
    "derive_point_seed",
    "derive_trial_seed",
    "enumerate_single_faults",
    "estimate_point",
    "extraction_round",
    "fit_exponent",
    "hyperfine_scatter_channel",
    "logical_failure",
    "min_weight_perfect_matching",
    "mwpm",
    "pM_from_sigma",
    "phase_twirl_channel",
    "run_point",
    "run_point_kernel",
    "run_point_reference",
    "run_trial",
    "sweep",
    "syndromes_to_defects",
    "thread_count",
    "wilson_interval",
    "zeeman_scatter_channel",
]

__version__ = "0.1.0"
