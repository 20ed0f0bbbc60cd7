"""Pauli-frame execution of noisy syndrome-extraction rounds.

All noise in scope is stochastic Pauli plus leakage, so a trial tracks
one classical frame (x_flip, z_flip) and a leaked flag per qubit; that
representation is exact for this noise class and cheap enough for
millions of trials.

Three architectures are supported.  ``HYPERFINE_SWAP_LRC`` uses
leak-capable, dephasing-immune qubits everywhere and appends one extra
CNOT per stabilizer that swaps the ancilla with its final data partner,
bounding how long a leaked ion can sit on a data slot.  ``PURE_ZEEMAN``
uses leak-free but dephasing-susceptible qubits everywhere.
``MIXED_SPECIES`` puts leak-capable, immune ancillas next to leak-free,
susceptible data qubits, so every leak dies at the next ancilla
reinitialization.

Two models describe a two-qubit gate with a leaked participant: the
depolarizing model scrambles the unleaked partner uniformly, while the
Molmer-Sorensen model leaves residual rotations that twirl to a 50/50
bit flip on the target (leaked control) or a 50/50 phase flip on the
control (leaked target).  Either way no entangling action occurs, and
a gate with both participants leaked does nothing.

Execution order contract, which the batch engine mirrors draw for draw:
per round -- ancilla reinitialization (no draws), preparation noise on X
then Z ancillas, four CNOT layers (X stabilizers 0..d^2-1 then Z), the
optional swap layer (X then Z, content exchange immediately after each
gate's noise), measurement noise on X then Z ancillas, measurement.
Within a CNOT -- leak interaction or ideal propagation, control
scattering, target scattering, control dephasing (if susceptible),
target dephasing (if susceptible).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np

from .channels import (
    Channel,
    FaultOutcome,
    NoiseParams,
    bit_twirl_channel,
    depolarize_channel,
    hyperfine_scatter_channel,
    phase_twirl_channel,
    zeeman_scatter_channel,
)
from .lattice import X_STABILIZER, Z_STABILIZER, ToricLayout, build_layout
from .rng import CounterStream, derive_trial_seed

# Frame flips per canonical outcome index (I, X, Y, Z, Leak).
_FLIP_X = (0, 1, 1, 0, 0)
_FLIP_Z = (0, 0, 1, 1, 0)

# Return from leakage lands in a uniformly random Pauli frame.
_RETURN_FRAMES = ((0, 0), (1, 0), (1, 1), (0, 1))


class Architecture(Enum):
    HYPERFINE_SWAP_LRC = "hyperfine"
    PURE_ZEEMAN = "zeeman"
    MIXED_SPECIES = "mixed"

    @classmethod
    def from_token(cls, token: str) -> "Architecture":
        for member in cls:
            if member.value == token:
                return member
        raise ValueError(f"unknown architecture {token!r}")

    @property
    def token(self) -> str:
        return self.value

    @property
    def ancilla_hyperfine(self) -> bool:
        return self is not Architecture.PURE_ZEEMAN

    @property
    def data_hyperfine(self) -> bool:
        return self is Architecture.HYPERFINE_SWAP_LRC

    @property
    def ancilla_leak_capable(self) -> bool:
        return self.ancilla_hyperfine

    @property
    def data_leak_capable(self) -> bool:
        return self.data_hyperfine

    @property
    def ancilla_memory_susceptible(self) -> bool:
        return not self.ancilla_hyperfine

    @property
    def data_memory_susceptible(self) -> bool:
        return not self.data_hyperfine

    @property
    def uses_swap_lrc(self) -> bool:
        return self is Architecture.HYPERFINE_SWAP_LRC


class LeakageModel(Enum):
    DEPOLARIZING = "dp"
    MOLMER_SORENSEN = "ms"

    @classmethod
    def from_token(cls, token: str) -> "LeakageModel":
        for member in cls:
            if member.value == token:
                return member
        raise ValueError(f"unknown leakage model {token!r}")

    @property
    def token(self) -> str:
        return self.value


@dataclass(slots=True)
class QubitState:
    """Per-qubit Pauli frame plus leaked flag.

    While ``leaked`` is set the frame bits are frozen and ignored by all
    gate propagation; they are replaced wholesale on return.
    """

    x_flip: int = 0
    z_flip: int = 0
    leaked: bool = False


@dataclass(frozen=True)
class SyndromeRound:
    round_index: int
    x_outcomes: np.ndarray
    z_outcomes: np.ndarray


@dataclass(frozen=True)
class TrialConfig:
    """Everything one trial (or one Monte Carlo point) depends on."""

    arch: Architecture
    model: LeakageModel
    d: int
    noise: NoiseParams
    seed: int
    rounds: int | None = None
    trials: int = 1
    leaked_meas_random: bool = False

    def __post_init__(self):
        if self.d < 3 or self.d % 2 == 0:
            raise ValueError(f"d must be odd and >= 3, got {self.d}")
        if self.rounds is None:
            object.__setattr__(self, "rounds", self.d)
        if self.rounds < 1:
            raise ValueError(f"rounds must be >= 1, got {self.rounds}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")


@dataclass(frozen=True)
class TrialRecord:
    """Syndrome history plus the final data frame of one trial."""

    config: TrialConfig
    # (rounds+1, 2, d^2); index [t, stype, s]; the last round is noiseless.
    syndromes: np.ndarray
    final_x: np.ndarray
    final_z: np.ndarray
    events: list | None = None


@dataclass
class SimState:
    """Mutable qubit register for one trial."""

    layout: ToricLayout
    data: list[QubitState]
    x_anc: list[QubitState]
    z_anc: list[QubitState]
    round_index: int = 0
    events: list | None = None
    leak_birth: dict | None = None

    def ancillas(self, stype: int) -> list[QubitState]:
        return self.x_anc if stype == X_STABILIZER else self.z_anc


def new_state(layout: ToricLayout, track_events: bool = False) -> SimState:
    return SimState(
        layout=layout,
        data=[QubitState() for _ in range(layout.n_data)],
        x_anc=[QubitState() for _ in range(layout.n_stab)],
        z_anc=[QubitState() for _ in range(layout.n_stab)],
        events=[] if track_events else None,
        leak_birth={} if track_events else None,
    )


@lru_cache(maxsize=None)
def get_layout(d: int) -> ToricLayout:
    return build_layout(d)


# ---------------------------------------------------------------------------
# Injectors: where each random decision comes from.


class StreamInjector:
    """Draws every decision from a uniform stream in program order."""

    __slots__ = ("stream",)

    def __init__(self, stream):
        self.stream = stream

    def scatter(self, site, channel: Channel) -> int:
        return channel.sample_index(self.stream.uniform())

    def leak_return(self, site, channel: Channel) -> bool:
        return self.stream.uniform() < channel.leak_probability

    def return_frame(self, site) -> tuple[int, int]:
        k = int(self.stream.uniform() * 4.0)
        if k > 3:
            k = 3
        return _RETURN_FRAMES[k]

    def twirl(self, site, channel: Channel) -> int:
        return channel.sample_index(self.stream.uniform())

    def dephase(self, site, p_M: float) -> bool:
        return self.stream.uniform() < p_M

    def leaked_outcome(self, site) -> int:
        return 1 if self.stream.uniform() < 0.5 else 0


class ForcedInjector:
    """Deterministic injector for exhaustive fault analysis.

    Unlisted scattering and dephasing sites act as identity, leaked
    qubits never return, and leak-interaction twirls follow
    ``twirl_plan`` (identity when absent).  Optional ``catalog`` and
    ``twirl_log`` lists record every site encountered together with the
    channel outcomes possible there.
    """

    __slots__ = ("faults", "twirl_plan", "catalog", "twirl_log")

    def __init__(self, faults=None, twirl_plan=None, catalog=None, twirl_log=None):
        self.faults = faults or {}
        self.twirl_plan = twirl_plan or {}
        self.catalog = catalog
        self.twirl_log = twirl_log

    def scatter(self, site, channel: Channel) -> int:
        if self.catalog is not None:
            support = channel.support()
            if support:
                self.catalog.append(("scatter", site, support))
        return int(self.faults.get(site, 0))

    def leak_return(self, site, channel: Channel) -> bool:
        return False

    def return_frame(self, site) -> tuple[int, int]:
        raise AssertionError("return_frame unreachable when leak_return is False")

    def twirl(self, site, channel: Channel) -> int:
        if self.twirl_log is not None:
            self.twirl_log.append((site, channel.support()))
        return int(self.twirl_plan.get(site, 0))

    def dephase(self, site, p_M: float) -> bool:
        if self.catalog is not None:
            self.catalog.append(("deph", site, (FaultOutcome.PAULI_Z,)))
        return int(self.faults.get(site, 0)) == int(FaultOutcome.PAULI_Z)

    def leaked_outcome(self, site) -> int:
        return 1


# ---------------------------------------------------------------------------
# Channel kit: per-trial resolution of architecture + noise parameters.


@dataclass(frozen=True)
class _ChannelKit:
    anc_1q: Channel
    anc_2q: Channel
    p_M: float
    anc_susceptible: bool
    dat_susceptible: bool
    anc_leak_capable: bool
    use_swap: bool
    leaked_meas_random: bool


def _make_kit(arch: Architecture, noise: NoiseParams,
              leaked_meas_random: bool = False) -> _ChannelKit:
    def scatter_for(hyperfine: bool, p: float) -> Channel:
        return hyperfine_scatter_channel(p) if hyperfine else zeeman_scatter_channel(p)

    # p_s_2q budgets the whole gate and is drawn once, on the ancilla
    # side: scattering rides the gate drive, and only one participant of
    # each CNOT can leak (one-sided leakage), so the per-gate channel is
    # the ancilla species' channel at the full rate.
    return _ChannelKit(
        anc_1q=scatter_for(arch.ancilla_hyperfine, noise.p_s_1q),
        anc_2q=scatter_for(arch.ancilla_hyperfine, noise.p_s_2q),
        p_M=noise.p_M,
        anc_susceptible=arch.ancilla_memory_susceptible,
        dat_susceptible=arch.data_memory_susceptible,
        anc_leak_capable=arch.ancilla_leak_capable,
        use_swap=arch.uses_swap_lrc,
        leaked_meas_random=leaked_meas_random,
    )


# ---------------------------------------------------------------------------
# Gate primitives.


def propagate_cnot(control: QubitState, target: QubitState):
    """Ideal CNOT conjugation of the Pauli frame.

    X on the control copies to the target, Z on the target copies to the
    control.  Callers must dispatch leaked participants to
    :func:`leak_interaction` instead.
    """
    if control.leaked or target.leaked:
        raise ValueError("propagate_cnot called with a leaked participant")
    target.x_flip ^= control.x_flip
    control.z_flip ^= target.z_flip
    return control, target


def _leak_twirl(control: QubitState, target: QubitState, model: LeakageModel,
                injector, site_ctrl, site_tgt, events) -> None:
    cl, tl = control.leaked, target.leaked
    if cl and tl:
        return
    if model is LeakageModel.DEPOLARIZING:
        channel = depolarize_channel()
        recipient, site = (target, site_tgt) if cl else (control, site_ctrl)
    elif cl:
        channel = bit_twirl_channel()
        recipient, site = target, site_tgt
    else:
        channel = phase_twirl_channel()
        recipient, site = control, site_ctrl
    k = injector.twirl(site, channel)
    recipient.x_flip ^= _FLIP_X[k]
    recipient.z_flip ^= _FLIP_Z[k]
    if events is not None:
        events.append(("interaction", site, int(k)))


def leak_interaction(control: QubitState, target: QubitState,
                     model: LeakageModel, rng):
    """Two-qubit gate action when at least one participant is leaked."""
    if not (control.leaked or target.leaked):
        raise ValueError("leak_interaction requires a leaked participant")
    injector = StreamInjector(rng)
    _leak_twirl(control, target, model,
                injector, ("adhoc", "ctrl"), ("adhoc", "tgt"), None)
    return control, target


def _gate_noise(qb: QubitState, channel: Channel, leak_ok: bool,
                injector, site, events) -> None:
    if qb.leaked:
        if injector.leak_return(site, channel):
            qb.leaked = False
            qb.x_flip, qb.z_flip = injector.return_frame(site)
            if events is not None:
                events.append(("return", site))
    else:
        k = injector.scatter(site, channel)
        if k == 4:
            if not leak_ok:
                raise RuntimeError(
                    f"leak emitted for a leak-incapable qubit at {site!r}"
                )
            qb.leaked = True
            if events is not None:
                events.append(("leak", site))
        else:
            qb.x_flip ^= _FLIP_X[k]
            qb.z_flip ^= _FLIP_Z[k]


def apply_gate_noise(qubit: QubitState, channel: Channel, rng) -> QubitState:
    """Apply one gate's worth of a scattering channel to one qubit.

    Unleaked qubits sample the channel (a Leak outcome sets the flag and
    freezes the frame).  Leaked qubits return to the computational
    subspace with probability equal to the channel's Leak probability,
    landing in a uniformly random Pauli frame.
    """
    _gate_noise(qubit, channel, True, StreamInjector(rng), ("adhoc",), None)
    return qubit


def _exchange(a: QubitState, b: QubitState, state: SimState,
              key_a, key_b) -> None:
    a.x_flip, b.x_flip = b.x_flip, a.x_flip
    a.z_flip, b.z_flip = b.z_flip, a.z_flip
    a.leaked, b.leaked = b.leaked, a.leaked
    births = state.leak_birth
    if births is not None:
        ba, bb = births.get(key_a), births.get(key_b)
        if ba is None:
            births.pop(key_b, None)
        else:
            births[key_b] = ba
        if bb is None:
            births.pop(key_a, None)
        else:
            births[key_a] = bb


def _apply_cnot(state: SimState, kit: _ChannelKit, model: LeakageModel,
                injector, t: int, layer: int, stype: int, s: int,
                ctrl: QubitState, tgt: QubitState,
                ctrl_is_anc: bool) -> None:
    site_ctrl = ("cnot", t, layer, stype, s, "anc" if ctrl_is_anc else "data")
    site_tgt = ("cnot", t, layer, stype, s, "data" if ctrl_is_anc else "anc")
    ev = state.events
    if ctrl.leaked or tgt.leaked:
        _leak_twirl(control=ctrl, target=tgt, model=model, injector=injector,
                    site_ctrl=("li",) + site_ctrl[1:],
                    site_tgt=("li",) + site_tgt[1:], events=ev)
    else:
        tgt.x_flip ^= ctrl.x_flip
        ctrl.z_flip ^= tgt.z_flip

    anc_qb = ctrl if ctrl_is_anc else tgt
    anc_site = site_ctrl if ctrl_is_anc else site_tgt
    # One scattering draw per gate, taken by the ancilla participant:
    # the gate drive scatters whichever ion can leave the computational
    # subspace, and only one side of each CNOT is leak-capable.
    _gate_noise(anc_qb, kit.anc_2q, kit.anc_leak_capable, injector,
                anc_site, ev)
    if state.leak_birth is not None:
        key = _qkey(anc_site, state.layout)
        if anc_qb.leaked:
            state.leak_birth.setdefault(key, t)
        else:
            state.leak_birth.pop(key, None)

    susc_ctrl = kit.anc_susceptible if ctrl_is_anc else kit.dat_susceptible
    susc_tgt = kit.dat_susceptible if ctrl_is_anc else kit.anc_susceptible
    if susc_ctrl and injector.dephase(("deph",) + site_ctrl[1:], kit.p_M):
        ctrl.z_flip ^= 1
    if susc_tgt and injector.dephase(("deph",) + site_tgt[1:], kit.p_M):
        tgt.z_flip ^= 1


def _qkey(site, layout: ToricLayout):
    """Stable qubit identity for a cnot/prep/meas site tuple."""
    kind = site[0]
    if kind in ("prep", "meas"):
        _, _, stype, s = site
        return ("xanc" if stype == X_STABILIZER else "zanc", s)
    _, t, layer, stype, s, role = site
    if role == "anc":
        return ("xanc" if stype == X_STABILIZER else "zanc", s)
    sched = layout.x_schedule if stype == X_STABILIZER else layout.z_schedule
    return ("data", int(sched[s][min(layer, 3)]))


def _extraction_round(state: SimState, kit: _ChannelKit, model: LeakageModel,
                      injector) -> tuple[np.ndarray, np.ndarray]:
    layout = state.layout
    d2 = layout.n_stab
    t = state.round_index
    ev = state.events

    # Ancilla reinitialization never leaks and never misfires.
    for stype in (X_STABILIZER, Z_STABILIZER):
        for s, qb in enumerate(state.ancillas(stype)):
            qb.x_flip = 0
            qb.z_flip = 0
            if qb.leaked:
                qb.leaked = False
                if ev is not None:
                    ev.append(("reinit_clear", t, stype, s))
                if state.leak_birth is not None:
                    state.leak_birth.pop(
                        ("xanc" if stype == X_STABILIZER else "zanc", s), None)

    for stype in (X_STABILIZER, Z_STABILIZER):
        ancs = state.ancillas(stype)
        leak_ok = kit.anc_leak_capable
        for s, qb in enumerate(ancs):
            site = ("prep", t, stype, s)
            _gate_noise(qb, kit.anc_1q, leak_ok, injector, site, ev)
            if state.leak_birth is not None:
                key = _qkey(site, layout)
                if qb.leaked:
                    state.leak_birth.setdefault(key, t)
                else:
                    state.leak_birth.pop(key, None)

    for layer in range(3):
        for s in range(d2):
            a = state.x_anc[s]
            q = state.data[layout.x_schedule[s][layer]]
            _apply_cnot(state, kit, model, injector, t, layer,
                        X_STABILIZER, s, ctrl=a, tgt=q, ctrl_is_anc=True)
        for s in range(d2):
            q = state.data[layout.z_schedule[s][layer]]
            a = state.z_anc[s]
            _apply_cnot(state, kit, model, injector, t, layer,
                        Z_STABILIZER, s, ctrl=q, tgt=a, ctrl_is_anc=False)

    if kit.use_swap:
        # One extra reversed CNOT right before the final schedule gate:
        # the pair compiles to the ordinary syndrome CNOT followed by an
        # exact swap, so the measured slot ends up holding the full
        # parity while the ancilla slot inherits the data state.
        for s in range(d2):
            q = state.data[layout.x_schedule[s][3]]
            a = state.x_anc[s]
            _apply_cnot(state, kit, model, injector, t, 4,
                        X_STABILIZER, s, ctrl=q, tgt=a, ctrl_is_anc=False)
        for s in range(d2):
            a = state.z_anc[s]
            q = state.data[layout.z_schedule[s][3]]
            _apply_cnot(state, kit, model, injector, t, 4,
                        Z_STABILIZER, s, ctrl=a, tgt=q, ctrl_is_anc=True)

    for s in range(d2):
        a = state.x_anc[s]
        q = state.data[layout.x_schedule[s][3]]
        _apply_cnot(state, kit, model, injector, t, 3,
                    X_STABILIZER, s, ctrl=a, tgt=q, ctrl_is_anc=True)
    for s in range(d2):
        q = state.data[layout.z_schedule[s][3]]
        a = state.z_anc[s]
        _apply_cnot(state, kit, model, injector, t, 3,
                    Z_STABILIZER, s, ctrl=q, tgt=a, ctrl_is_anc=False)

    if kit.use_swap:
        # Swap the slot contents so every slot keeps its role: the
        # measured slot takes the syndrome-laden state, the data slot
        # keeps the data state, and the physical ions alternate roles.
        for s in range(d2):
            qi = layout.x_schedule[s][3]
            _exchange(state.x_anc[s], state.data[qi], state,
                      ("xanc", s), ("data", int(qi)))
        for s in range(d2):
            qi = layout.z_schedule[s][3]
            _exchange(state.z_anc[s], state.data[qi], state,
                      ("zanc", s), ("data", int(qi)))

    for stype in (X_STABILIZER, Z_STABILIZER):
        ancs = state.ancillas(stype)
        leak_ok = kit.anc_leak_capable
        for s, qb in enumerate(ancs):
            site = ("meas", t, stype, s)
            _gate_noise(qb, kit.anc_1q, leak_ok, injector, site, ev)
            if state.leak_birth is not None:
                key = _qkey(site, layout)
                if qb.leaked:
                    state.leak_birth.setdefault(key, t)
                else:
                    state.leak_birth.pop(key, None)

    x_out = np.zeros(d2, dtype=np.uint8)
    z_out = np.zeros(d2, dtype=np.uint8)
    for s, qb in enumerate(state.x_anc):
        if qb.leaked:
            x_out[s] = (injector.leaked_outcome(("lmeas", t, X_STABILIZER, s))
                        if kit.leaked_meas_random else 1)
        else:
            x_out[s] = qb.z_flip
    for s, qb in enumerate(state.z_anc):
        if qb.leaked:
            z_out[s] = (injector.leaked_outcome(("lmeas", t, Z_STABILIZER, s))
                        if kit.leaked_meas_random else 1)
        else:
            z_out[s] = qb.x_flip

    state.round_index += 1
    return x_out, z_out


def _perfect_syndromes(state: SimState) -> tuple[np.ndarray, np.ndarray]:
    layout = state.layout
    d2 = layout.n_stab
    x_out = np.zeros(d2, dtype=np.uint8)
    z_out = np.zeros(d2, dtype=np.uint8)
    for s in range(d2):
        px = 0
        for q in layout.x_schedule[s]:
            px ^= state.data[q].z_flip
        x_out[s] = px
        pz = 0
        for q in layout.z_schedule[s]:
            pz ^= state.data[q].x_flip
        z_out[s] = pz
    return x_out, z_out


def extraction_round(state: SimState, layout: ToricLayout, arch: Architecture,
                     model: LeakageModel, noise: NoiseParams, rng) -> SyndromeRound:
    """Run one noisy syndrome-extraction round on ``state``."""
    if state.layout.d != layout.d:
        raise ValueError("state dimensions do not match layout")
    kit = _make_kit(arch, noise)
    index = state.round_index
    x_out, z_out = _extraction_round(state, kit, model, StreamInjector(rng))
    return SyndromeRound(round_index=index, x_outcomes=x_out, z_outcomes=z_out)


def run_trial(config: TrialConfig, rng=None, *, injector=None,
              track_events: bool = False) -> TrialRecord:
    """Execute ``config.rounds`` noisy rounds plus one noiseless round.

    ``rng`` defaults to the canonical stream for trial 0 of the config's
    seed; :mod:`leaksim.experiment` supplies per-trial streams.  An
    explicit ``injector`` overrides ``rng`` entirely (used by the fault
    enumerator).
    """
    layout = get_layout(config.d)
    kit = _make_kit(config.arch, config.noise, config.leaked_meas_random)
    if injector is None:
        if rng is None:
            rng = CounterStream(derive_trial_seed(config.seed, 0))
        injector = StreamInjector(rng)
    state = new_state(layout, track_events)
    T = config.rounds
    syndromes = np.zeros((T + 1, 2, layout.n_stab), dtype=np.uint8)
    for t in range(T):
        x_out, z_out = _extraction_round(state, kit, config.model, injector)
        syndromes[t, 0] = x_out
        syndromes[t, 1] = z_out
    x_out, z_out = _perfect_syndromes(state)
    syndromes[T, 0] = x_out
    syndromes[T, 1] = z_out

    if config.arch is Architecture.MIXED_SPECIES:
        for qb in state.data:
            if qb.leaked:
                raise RuntimeError("data-qubit leak recorded in mixed-species run")

    final_x = np.fromiter((qb.x_flip for qb in state.data),
                          dtype=np.uint8, count=layout.n_data)
    final_z = np.fromiter((qb.z_flip for qb in state.data),
                          dtype=np.uint8, count=layout.n_data)
    syndromes.setflags(write=False)
    return TrialRecord(config=config, syndromes=syndromes,
                       final_x=final_x, final_z=final_z, events=state.events)
