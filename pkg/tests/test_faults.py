"""Exhaustive single-fault enumeration: structure and verdicts."""

from __future__ import annotations

import pytest

from leaksim.faults import enumerate_single_faults
from leaksim.simulator import Architecture, LeakageModel


def test_summary_reports_counts():
    result = enumerate_single_faults("mixed", "ms", 3, rounds=1)
    text = result.summary()
    assert "mixed/ms d=3 rounds=1" in text
    assert f"uncorrectable={result.n_uncorrectable}" in text


def test_string_tokens_match_enum_arguments():
    by_token = enumerate_single_faults("mixed", "ms", 3, rounds=1)
    by_enum = enumerate_single_faults(Architecture.MIXED_SPECIES,
                                      LeakageModel.MOLMER_SORENSEN, 3,
                                      rounds=1)
    assert by_token.n_sites == by_enum.n_sites
    assert by_token.n_faults == by_enum.n_faults
    assert by_token.n_uncorrectable == by_enum.n_uncorrectable


@pytest.mark.parametrize("arch,sites_per_round", [
    # scatter sites: 18 preparations + one per two-qubit gate + 18
    # measurements; dephasing sites: one per susceptible participant.
    ("zeeman", (18 + 72 + 18) + 144),
    ("mixed", (18 + 72 + 18) + 72),
    ("hyperfine", (18 + 90 + 18) + 0),
])
def test_site_census_scales_with_rounds(arch, sites_per_round):
    one = enumerate_single_faults(arch, "ms", 3, rounds=1)
    three = enumerate_single_faults(arch, "ms", 3, rounds=3)
    assert one.n_sites == sites_per_round
    assert three.n_sites == 3 * sites_per_round


def test_every_single_fault_is_correctable_mixed_ms():
    result = enumerate_single_faults("mixed", "ms", 3)
    assert result.n_uncorrectable == 0
    assert not result.stopped_early
    assert result.n_faults == 1188


def test_every_single_fault_is_correctable_zeeman():
    # No leakage anywhere: every single fault is one Pauli, and distance
    # 3 corrects any single Pauli, so the failure rate has no linear
    # term in either model.
    result = enumerate_single_faults("zeeman", "ms", 3)
    assert result.n_uncorrectable == 0
    assert result.n_runs == result.n_faults + 1


def test_every_single_fault_is_correctable_hyperfine_ms():
    # Residual Molmer-Sorensen twirls keep every leak branch within the
    # code's correction radius, so the hyperfine architecture also loses
    # its linear term under this model.
    result = enumerate_single_faults("hyperfine", "ms", 3)
    assert result.n_uncorrectable == 0


def test_depolarizing_leaks_break_single_fault_correction():
    result = enumerate_single_faults("mixed", "dp", 3, stop_on_first=True)
    assert result.n_uncorrectable >= 1
    assert result.stopped_early
    assert "stopped" in result.summary()
    first = result.uncorrectable[0]
    assert first.outcome.name == "LEAK"
    assert first.x_failure or first.z_failure


def test_branch_budget_guard_raises_cleanly():
    with pytest.raises(ValueError, match="twirl branches"):
        enumerate_single_faults("mixed", "dp", 3, max_branches=2)
