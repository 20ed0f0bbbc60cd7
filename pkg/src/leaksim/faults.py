"""Exhaustive single-fault analysis of the extraction circuit.

Every stochastic decision in a trial happens at a named site: scattering
after each preparation, gate participation, and pre-measurement window,
dephasing after each two-qubit gate on a susceptible participant, and a
residual twirl whenever a gate meets a leaked ion.  Forcing exactly one
site to one non-identity outcome (leaving all others ideal, and leaked
ions leaked, which drops only O(p^2) return events) enumerates the full
O(p) failure budget of the circuit.

A forced leak deterministically triggers twirl draws at every later gate
the leaked ion touches.  Which gates those are depends only on the leak
flags, never on Pauli outcomes, so a single probe run discovers the
twirl sites and the branch space is the product of each site's outcome
set.  Under the Molmer-Sorensen model each twirl is binary (identity or
one flip); under depolarizing it is four-way.  A fault is uncorrectable
when any branch flips a logical operator: all branches have nonzero
probability, so any failing branch contributes at first order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .channels import FaultOutcome, NoiseParams
from .decoder import decode_record
from .simulator import (
    Architecture,
    ForcedInjector,
    LeakageModel,
    TrialConfig,
    run_trial,
)


@dataclass(frozen=True)
class FaultResult:
    """One uncorrectable fault: the forced site plus the failing branch."""

    site: tuple
    outcome: FaultOutcome
    twirl_branch: tuple[tuple[tuple, FaultOutcome], ...]
    x_failure: bool
    z_failure: bool


@dataclass(frozen=True)
class FaultEnumeration:
    arch: Architecture
    model: LeakageModel
    d: int
    rounds: int
    n_sites: int
    n_faults: int
    n_runs: int
    uncorrectable: tuple[FaultResult, ...]
    stopped_early: bool

    @property
    def n_uncorrectable(self) -> int:
        return len(self.uncorrectable)

    def summary(self) -> str:
        tag = " (stopped at first failure)" if self.stopped_early else ""
        return (f"{self.arch.token}/{self.model.token} d={self.d} "
                f"rounds={self.rounds}: sites={self.n_sites} "
                f"faults={self.n_faults} runs={self.n_runs} "
                f"uncorrectable={self.n_uncorrectable}{tag}")


def _catalog_config(arch: Architecture, model: LeakageModel, d: int,
                    rounds: int | None) -> TrialConfig:
    # Probabilities are irrelevant to forced runs; they only need to be
    # nonzero so each channel reports its full outcome support.
    return TrialConfig(arch=arch, model=model, d=d,
                       noise=NoiseParams(p_s_2q=1e-3), seed=0, rounds=rounds)


def _decode_failure(config: TrialConfig, faults: dict,
                    twirl_plan: dict | None = None,
                    twirl_log: list | None = None):
    injector = ForcedInjector(faults=faults, twirl_plan=twirl_plan,
                              twirl_log=twirl_log)
    record = run_trial(config, injector=injector)
    result = decode_record(record)
    return result.x_failure, result.z_failure


def enumerate_single_faults(arch, model, d: int = 3,
                            rounds: int | None = None,
                            stop_on_first: bool = False,
                            max_branches: int = 1 << 20,
                            max_examples: int = 32) -> FaultEnumeration:
    """Force every single fault (and, for leaks, every twirl branch).

    With ``stop_on_first`` the scan returns at the first uncorrectable
    fault, which is the cheap way to certify that some O(p) failure
    exists.  Without it the full fault set is classified; that is fast
    for binary twirl branches but can explode combinatorially for
    depolarizing leak cascades, bounded by ``max_branches`` per fault.
    """
    if isinstance(arch, str):
        arch = Architecture.from_token(arch)
    if isinstance(model, str):
        model = LeakageModel.from_token(model)
    config = _catalog_config(arch, model, d, rounds)

    catalog: list = []
    run_trial(config, injector=ForcedInjector(catalog=catalog))
    n_sites = len(catalog)

    uncorrectable: list[FaultResult] = []
    n_faults = 0
    n_runs = 1
    stopped = False

    for kind, site, outcomes in catalog:
        if stopped:
            break
        for outcome in outcomes:
            n_faults += 1
            fault = {site: int(outcome)}
            twirl_log: list = []
            n_runs += 1
            fx, fz = _decode_failure(config, fault, twirl_log=twirl_log)
            failing_branch = None
            if fx or fz:
                failing_branch = ()
            elif outcome == FaultOutcome.LEAK and twirl_log:
                sites = [s for s, _ in twirl_log]
                choices = [(FaultOutcome.IDENTITY,) + support
                           for _, support in twirl_log]
                total = 1
                for c in choices:
                    total *= len(c)
                if total > max_branches:
                    raise ValueError(
                        f"fault at {site!r} spans {total} twirl branches "
                        f"(> {max_branches}); use stop_on_first or raise "
                        "max_branches")
                for branch in itertools.product(*choices):
                    if all(o == FaultOutcome.IDENTITY for o in branch):
                        continue  # identity branch is the probe run
                    plan = {s: int(o) for s, o in zip(sites, branch)
                            if o != FaultOutcome.IDENTITY}
                    n_runs += 1
                    fx, fz = _decode_failure(config, fault, twirl_plan=plan)
                    if fx or fz:
                        failing_branch = tuple(
                            (s, FaultOutcome(o)) for s, o in zip(sites, branch)
                            if o != FaultOutcome.IDENTITY)
                        break
            if failing_branch is not None:
                if len(uncorrectable) < max_examples:
                    uncorrectable.append(FaultResult(
                        site=site, outcome=FaultOutcome(outcome),
                        twirl_branch=failing_branch,
                        x_failure=bool(fx), z_failure=bool(fz)))
                else:
                    uncorrectable.append(FaultResult(
                        site=site, outcome=FaultOutcome(outcome),
                        twirl_branch=(), x_failure=bool(fx),
                        z_failure=bool(fz)))
                if stop_on_first:
                    stopped = True
                    break

    return FaultEnumeration(
        arch=arch, model=model, d=d, rounds=config.rounds,
        n_sites=n_sites, n_faults=n_faults, n_runs=n_runs,
        uncorrectable=tuple(uncorrectable), stopped_early=stopped)
