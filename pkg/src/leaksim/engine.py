"""Compiled batch engine: simulate and decode many trials per call.

This is a transcription of the pure-Python pipeline (simulator plus
decoder) into one numba kernel, consuming random draws in the identical
program order from the identical counter-based generator, so the two
backends produce bit-identical failure outcomes trial for trial.  The
tests enforce that equivalence; any behavioral change must land in both
places.

Without numba the module still imports and :func:`run_point` silently
falls back to the reference path, which is exact but roughly three
orders of magnitude slower.
"""

from __future__ import annotations

import numpy as np

from .channels import Channel
from .decoder import decode_record
from .matching import HAS_NUMBA, _blossom_core, njit
from .rng import CounterStream, derive_trial_seed
from .simulator import (
    Architecture,
    LeakageModel,
    TrialConfig,
    _make_kit,
    get_layout,
    run_trial,
)

GOLDEN_U64 = np.uint64(0x9E3779B97F4A7C15)
_MIX_A = np.uint64(0xBF58476D1CE4E5B9)
_MIX_B = np.uint64(0x94D049BB133111EB)
_U30 = np.uint64(30)
_U27 = np.uint64(27)
_U31 = np.uint64(31)
_U11 = np.uint64(11)
_TO_UNIT = 1.1102230246251565e-16

# Twirl channels in cumulative form (canonical outcome order I,X,Y,Z,Leak).
_DEPOL_CUM = np.array([0.25, 0.5, 0.75, 1.0, 1.0])
_BIT_CUM = np.array([0.5, 1.0, 1.0, 1.0, 1.0])
_PHASE_CUM = np.array([0.5, 0.5, 0.5, 1.0, 1.0])


@njit(cache=True)
def _mix64(z):
    z = (z ^ (z >> _U30)) * _MIX_A
    z = (z ^ (z >> _U27)) * _MIX_B
    return z ^ (z >> _U31)


@njit(cache=True)
def _next_u(state):
    state = state + GOLDEN_U64
    z = _mix64(state)
    return state, np.float64(z >> _U11) * _TO_UNIT


@njit(cache=True)
def _sample_idx(u, cum, last):
    k = 0
    while k < 5:
        if u < cum[k]:
            return k
        k += 1
    return last


@njit(cache=True)
def _gate_noise_k(state, rx, rz, rl, idx, cum, last, leakp):
    if rl[idx] != 0:
        state, u = _next_u(state)
        if u < leakp:
            rl[idx] = 0
            state, u2 = _next_u(state)
            k = int(u2 * 4.0)
            if k > 3:
                k = 3
            rx[idx] = 1 if (k == 1 or k == 2) else 0
            rz[idx] = 1 if (k == 2 or k == 3) else 0
    else:
        state, u = _next_u(state)
        k = _sample_idx(u, cum, last)
        if k == 4:
            rl[idx] = 1
        else:
            if k == 1 or k == 2:
                rx[idx] ^= 1
            if k == 2 or k == 3:
                rz[idx] ^= 1
    return state


@njit(cache=True)
def _cnot_k(state, rx, rz, rl, ci, ti, model_ms):
    cl = rl[ci] != 0
    tl = rl[ti] != 0
    if cl or tl:
        if not (cl and tl):
            if model_ms:
                if cl:
                    ri = ti
                    cum = _BIT_CUM
                    last = 1
                else:
                    ri = ci
                    cum = _PHASE_CUM
                    last = 3
            else:
                ri = ti if cl else ci
                cum = _DEPOL_CUM
                last = 3
            state, u = _next_u(state)
            k = _sample_idx(u, cum, last)
            if k == 1 or k == 2:
                rx[ri] ^= 1
            if k == 2 or k == 3:
                rz[ri] ^= 1
    else:
        rx[ti] ^= rx[ci]
        rz[ci] ^= rz[ti]
    return state


@njit(cache=True)
def _wgt(ta, sa, tb, sb, d):
    ra = sa // d
    ca = sa % d
    rb = sb // d
    cb = sb % d
    dr = ra - rb
    if dr < 0:
        dr = -dr
    if d - dr < dr:
        dr = d - dr
    dc = ca - cb
    if dc < 0:
        dc = -dc
    if d - dc < dc:
        dc = d - dc
    dt = ta - tb
    if dt < 0:
        dt = -dt
    return dr + dc + dt


@njit(cache=True)
def _walk_k(sector, sa, sb, d, corr):
    ra = sa // d
    ca = sa % d
    rb = sb // d
    cb = sb % d
    d2 = d * d
    dr = (rb - ra) % d
    if dr > d - dr:
        step = -1
        ns = d - dr
    else:
        step = 1
        ns = dr
    r = ra
    c = ca
    for _ in range(ns):
        if sector == 0:
            if step == 1:
                e = ((r + 1) % d) * d + c
            else:
                e = r * d + c
        else:
            if step == 1:
                e = d2 + r * d + c
            else:
                e = d2 + ((r - 1) % d) * d + c
        corr[e] ^= 1
        r = (r + step) % d
    dc = (cb - ca) % d
    if dc > d - dc:
        step = -1
        ns = d - dc
    else:
        step = 1
        ns = dc
    for _ in range(ns):
        if sector == 0:
            if step == 1:
                e = d2 + r * d + (c + 1) % d
            else:
                e = d2 + r * d + c
        else:
            if step == 1:
                e = r * d + c
            else:
                e = r * d + (c - 1) % d
        corr[e] ^= 1
        c = (c + step) % d
    return 0


@njit(cache=True)
def _run_point(point_seed, start_trial, n_trials, d, rounds,
               xsched, zsched, xlog, zlog,
               anc1_cum, anc1_last, anc1_leakp,
               anc2_cum, anc2_last, anc2_leakp,
               p_M, anc_susc, dat_susc, use_swap, model_ms, lmr,
               fail_out, debug_trial, dbg_syn, dbg_fx, dbg_fz):
    d2 = d * d
    n_data = 2 * d2
    nq = n_data + 2 * d2
    x_off = n_data
    z_off = n_data + d2
    T = rounds

    rx = np.zeros(nq, dtype=np.uint8)
    rz = np.zeros(nq, dtype=np.uint8)
    rl = np.zeros(nq, dtype=np.uint8)
    syn = np.zeros((T + 1, 2, d2), dtype=np.uint8)
    cap = (T + 1) * d2
    def_t = np.zeros(cap, dtype=np.int64)
    def_s = np.zeros(cap, dtype=np.int64)
    corr_x = np.zeros(n_data, dtype=np.uint8)
    corr_z = np.zeros(n_data, dtype=np.uint8)
    res_x = np.zeros(n_data, dtype=np.uint8)
    res_z = np.zeros(n_data, dtype=np.uint8)
    wmat = np.zeros((cap + 1, cap + 1), dtype=np.int64)

    m = 2 * cap + 4
    width = cap + 2
    qcap = 4 * (cap + 2) * (cap + 2) + 64
    b_lab = np.zeros(m, dtype=np.int64)
    b_match = np.zeros(m, dtype=np.int64)
    b_slack = np.zeros(m, dtype=np.int64)
    b_st = np.zeros(m, dtype=np.int64)
    b_pa = np.zeros(m, dtype=np.int64)
    b_s = np.zeros(m, dtype=np.int64)
    b_vis = np.zeros(m, dtype=np.int64)
    b_gu = np.zeros((m, m), dtype=np.int64)
    b_gv = np.zeros((m, m), dtype=np.int64)
    b_gw = np.zeros((m, m), dtype=np.int64)
    b_flower = np.zeros((m, width), dtype=np.int64)
    b_flen = np.zeros(m, dtype=np.int64)
    b_ffrom = np.zeros((m, width), dtype=np.int64)
    b_q = np.zeros(qcap, dtype=np.int64)
    b_stack = np.zeros(4 * m + 16, dtype=np.int64)
    b_stack2 = np.zeros(8 * m + 32, dtype=np.int64)

    for i in range(n_trials):
        state = _mix64(point_seed + GOLDEN_U64 * np.uint64(start_trial + i + 1))
        for j in range(nq):
            rx[j] = 0
            rz[j] = 0
            rl[j] = 0

        for t in range(T):
            for s in range(d2):
                rx[x_off + s] = 0
                rz[x_off + s] = 0
                rl[x_off + s] = 0
            for s in range(d2):
                rx[z_off + s] = 0
                rz[z_off + s] = 0
                rl[z_off + s] = 0

            for s in range(d2):
                state = _gate_noise_k(state, rx, rz, rl, x_off + s,
                                      anc1_cum, anc1_last, anc1_leakp)
            for s in range(d2):
                state = _gate_noise_k(state, rx, rz, rl, z_off + s,
                                      anc1_cum, anc1_last, anc1_leakp)

            for layer in range(3):
                for s in range(d2):
                    ai = x_off + s
                    qi = xsched[s, layer]
                    state = _cnot_k(state, rx, rz, rl, ai, qi, model_ms)
                    state = _gate_noise_k(state, rx, rz, rl, ai,
                                          anc2_cum, anc2_last, anc2_leakp)
                    if anc_susc:
                        state, u = _next_u(state)
                        if u < p_M:
                            rz[ai] ^= 1
                    if dat_susc:
                        state, u = _next_u(state)
                        if u < p_M:
                            rz[qi] ^= 1
                for s in range(d2):
                    qi = zsched[s, layer]
                    ai = z_off + s
                    state = _cnot_k(state, rx, rz, rl, qi, ai, model_ms)
                    state = _gate_noise_k(state, rx, rz, rl, ai,
                                          anc2_cum, anc2_last, anc2_leakp)
                    if dat_susc:
                        state, u = _next_u(state)
                        if u < p_M:
                            rz[qi] ^= 1
                    if anc_susc:
                        state, u = _next_u(state)
                        if u < p_M:
                            rz[ai] ^= 1

            if use_swap:
                for s in range(d2):
                    qi = xsched[s, 3]
                    ai = x_off + s
                    state = _cnot_k(state, rx, rz, rl, qi, ai, model_ms)
                    state = _gate_noise_k(state, rx, rz, rl, ai,
                                          anc2_cum, anc2_last, anc2_leakp)
                    if dat_susc:
                        state, u = _next_u(state)
                        if u < p_M:
                            rz[qi] ^= 1
                    if anc_susc:
                        state, u = _next_u(state)
                        if u < p_M:
                            rz[ai] ^= 1
                for s in range(d2):
                    ai = z_off + s
                    qi = zsched[s, 3]
                    state = _cnot_k(state, rx, rz, rl, ai, qi, model_ms)
                    state = _gate_noise_k(state, rx, rz, rl, ai,
                                          anc2_cum, anc2_last, anc2_leakp)
                    if anc_susc:
                        state, u = _next_u(state)
                        if u < p_M:
                            rz[ai] ^= 1
                    if dat_susc:
                        state, u = _next_u(state)
                        if u < p_M:
                            rz[qi] ^= 1

            for s in range(d2):
                ai = x_off + s
                qi = xsched[s, 3]
                state = _cnot_k(state, rx, rz, rl, ai, qi, model_ms)
                state = _gate_noise_k(state, rx, rz, rl, ai,
                                      anc2_cum, anc2_last, anc2_leakp)
                if anc_susc:
                    state, u = _next_u(state)
                    if u < p_M:
                        rz[ai] ^= 1
                if dat_susc:
                    state, u = _next_u(state)
                    if u < p_M:
                        rz[qi] ^= 1
            for s in range(d2):
                qi = zsched[s, 3]
                ai = z_off + s
                state = _cnot_k(state, rx, rz, rl, qi, ai, model_ms)
                state = _gate_noise_k(state, rx, rz, rl, ai,
                                      anc2_cum, anc2_last, anc2_leakp)
                if dat_susc:
                    state, u = _next_u(state)
                    if u < p_M:
                        rz[qi] ^= 1
                if anc_susc:
                    state, u = _next_u(state)
                    if u < p_M:
                        rz[ai] ^= 1

            if use_swap:
                for s in range(d2):
                    ai = x_off + s
                    qi = xsched[s, 3]
                    tmp = rx[ai]
                    rx[ai] = rx[qi]
                    rx[qi] = tmp
                    tmp = rz[ai]
                    rz[ai] = rz[qi]
                    rz[qi] = tmp
                    tmp = rl[ai]
                    rl[ai] = rl[qi]
                    rl[qi] = tmp
                for s in range(d2):
                    ai = z_off + s
                    qi = zsched[s, 3]
                    tmp = rx[ai]
                    rx[ai] = rx[qi]
                    rx[qi] = tmp
                    tmp = rz[ai]
                    rz[ai] = rz[qi]
                    rz[qi] = tmp
                    tmp = rl[ai]
                    rl[ai] = rl[qi]
                    rl[qi] = tmp

            for s in range(d2):
                state = _gate_noise_k(state, rx, rz, rl, x_off + s,
                                      anc1_cum, anc1_last, anc1_leakp)
            for s in range(d2):
                state = _gate_noise_k(state, rx, rz, rl, z_off + s,
                                      anc1_cum, anc1_last, anc1_leakp)

            for s in range(d2):
                li = x_off + s
                if rl[li] != 0:
                    if lmr:
                        state, u = _next_u(state)
                        syn[t, 0, s] = 1 if u < 0.5 else 0
                    else:
                        syn[t, 0, s] = 1
                else:
                    syn[t, 0, s] = rz[li]
            for s in range(d2):
                li = z_off + s
                if rl[li] != 0:
                    if lmr:
                        state, u = _next_u(state)
                        syn[t, 1, s] = 1 if u < 0.5 else 0
                    else:
                        syn[t, 1, s] = 1
                else:
                    syn[t, 1, s] = rx[li]

        for s in range(d2):
            p = 0
            for l4 in range(4):
                p ^= rz[xsched[s, l4]]
            syn[T, 0, s] = p
            p = 0
            for l4 in range(4):
                p ^= rx[zsched[s, l4]]
            syn[T, 1, s] = p

        # --- decode ---
        for j in range(n_data):
            corr_x[j] = 0
            corr_z[j] = 0
        for sector in range(2):
            nd = 0
            for t in range(T + 1):
                for s in range(d2):
                    cur = syn[t, sector, s]
                    if t == 0:
                        prv = np.uint8(0)
                    else:
                        prv = syn[t - 1, sector, s]
                    if cur != prv:
                        def_t[nd] = t
                        def_s[nd] = s
                        nd += 1
            if nd == 0:
                continue
            corr = corr_z if sector == 0 else corr_x
            if nd == 2:
                _walk_k(sector, def_s[0], def_s[1], d, corr)
            elif nd == 4:
                t_a = (_wgt(def_t[0], def_s[0], def_t[1], def_s[1], d)
                       + _wgt(def_t[2], def_s[2], def_t[3], def_s[3], d))
                t_b = (_wgt(def_t[0], def_s[0], def_t[2], def_s[2], d)
                       + _wgt(def_t[1], def_s[1], def_t[3], def_s[3], d))
                t_c = (_wgt(def_t[0], def_s[0], def_t[3], def_s[3], d)
                       + _wgt(def_t[1], def_s[1], def_t[2], def_s[2], d))
                best = 0
                bestv = t_a
                if t_b < bestv:
                    best = 1
                    bestv = t_b
                if t_c < bestv:
                    best = 2
                if best == 0:
                    _walk_k(sector, def_s[0], def_s[1], d, corr)
                    _walk_k(sector, def_s[2], def_s[3], d, corr)
                elif best == 1:
                    _walk_k(sector, def_s[0], def_s[2], d, corr)
                    _walk_k(sector, def_s[1], def_s[3], d, corr)
                else:
                    _walk_k(sector, def_s[0], def_s[3], d, corr)
                    _walk_k(sector, def_s[1], def_s[2], d, corr)
            else:
                wmax = 0
                for a in range(nd):
                    for b in range(a + 1, nd):
                        w = _wgt(def_t[a], def_s[a], def_t[b], def_s[b], d)
                        if w > wmax:
                            wmax = w
                        wmat[a + 1, b + 1] = w
                        wmat[b + 1, a + 1] = w
                c0 = wmax + 1
                for a in range(1, nd + 1):
                    for b in range(1, nd + 1):
                        if a != b:
                            wmat[a, b] = c0 - wmat[a, b]
                _blossom_core(nd, wmat, b_lab, b_match, b_slack, b_st, b_pa,
                              b_s, b_vis, b_gu, b_gv, b_gw, b_flower, b_flen,
                              b_ffrom, b_q, b_stack, b_stack2)
                for uu in range(1, nd + 1):
                    vv = b_match[uu]
                    if vv > uu:
                        _walk_k(sector, def_s[uu - 1], def_s[vv - 1], d, corr)

        for j in range(n_data):
            res_x[j] = rx[j] ^ corr_x[j]
            res_z[j] = rz[j] ^ corr_z[j]
        for s in range(d2):
            p = 0
            for l4 in range(4):
                p ^= res_z[xsched[s, l4]]
            if p != 0:
                raise RuntimeError("correction leaves a plaquette syndrome set")
            p = 0
            for l4 in range(4):
                p ^= res_x[zsched[s, l4]]
            if p != 0:
                raise RuntimeError("correction leaves a vertex syndrome set")
        xf = 0
        zf = 0
        for k2 in range(2):
            p = 0
            for j in range(n_data):
                if zlog[k2, j] != 0:
                    p ^= res_x[j]
            if p != 0:
                xf = 1
            p = 0
            for j in range(n_data):
                if xlog[k2, j] != 0:
                    p ^= res_z[j]
            if p != 0:
                zf = 1
        fail_out[i, 0] = xf
        fail_out[i, 1] = zf

        if i == debug_trial:
            for t in range(T + 1):
                for sec in range(2):
                    for s in range(d2):
                        dbg_syn[t, sec, s] = syn[t, sec, s]
            for j in range(n_data):
                dbg_fx[j] = rx[j]
                dbg_fz[j] = rz[j]
    return 0


@njit(cache=True)
def _stream_probe(seed, out):
    state = seed
    for i in range(out.shape[0]):
        state, u = _next_u(state)
        out[i] = u
    return 0


@njit(cache=True)
def _derive_probe(base, out):
    for i in range(out.shape[0]):
        out[i] = _mix64(base + GOLDEN_U64 * np.uint64(i + 1))
    return 0


def _channel_arrays(channel: Channel):
    cum = np.array(channel.cumulative(), dtype=np.float64)
    return cum, channel.last_support_index(), channel.leak_probability


def _kernel_args(config: TrialConfig):
    layout = get_layout(config.d)
    kit = _make_kit(config.arch, config.noise, config.leaked_meas_random)
    a1c, a1l, a1p = _channel_arrays(kit.anc_1q)
    a2c, a2l, a2p = _channel_arrays(kit.anc_2q)
    return (
        config.d, config.rounds,
        layout.x_schedule.astype(np.int64), layout.z_schedule.astype(np.int64),
        layout.x_logicals, layout.z_logicals,
        a1c, a1l, a1p, a2c, a2l, a2p,
        kit.p_M, kit.anc_susceptible, kit.dat_susceptible, kit.use_swap,
        config.model is LeakageModel.MOLMER_SORENSEN,
        config.leaked_meas_random,
    )


def run_point_kernel(config: TrialConfig, start_trial: int = 0,
                     n_trials: int | None = None,
                     debug_trial: int = -1):
    """Run a block of trials through the compiled kernel.

    Returns ``(fail_bits, debug)`` where ``fail_bits`` is a
    (n_trials, 2) uint8 array of per-trial x/z logical failures and
    ``debug`` holds the syndrome history and final frames of the trial
    selected by ``debug_trial`` (all zeros when -1).
    """
    if not HAS_NUMBA:
        raise RuntimeError("numba is not available; use the reference backend")
    if n_trials is None:
        n_trials = config.trials
    (d, rounds, xsched, zsched, xlog, zlog,
     a1c, a1l, a1p, a2c, a2l, a2p,
     p_M, anc_susc, dat_susc, use_swap, model_ms, lmr) = _kernel_args(config)
    fail_out = np.zeros((n_trials, 2), dtype=np.uint8)
    d2 = d * d
    dbg_syn = np.zeros((rounds + 1, 2, d2), dtype=np.uint8)
    dbg_fx = np.zeros(2 * d2, dtype=np.uint8)
    dbg_fz = np.zeros(2 * d2, dtype=np.uint8)
    _run_point(np.uint64(config.seed % (1 << 64)), start_trial, n_trials,
               d, rounds, xsched, zsched, xlog, zlog,
               a1c, a1l, a1p, a2c, a2l, a2p,
               p_M, anc_susc, dat_susc, use_swap, model_ms, lmr,
               fail_out, debug_trial, dbg_syn, dbg_fx, dbg_fz)
    return fail_out, (dbg_syn, dbg_fx, dbg_fz)


def run_point_reference(config: TrialConfig, start_trial: int = 0,
                        n_trials: int | None = None):
    """Reference twin of :func:`run_point_kernel` (same trial seeds)."""
    if n_trials is None:
        n_trials = config.trials
    layout = get_layout(config.d)
    out = np.zeros((n_trials, 2), dtype=np.uint8)
    for i in range(n_trials):
        rng = CounterStream(derive_trial_seed(config.seed, start_trial + i))
        rec = run_trial(config, rng)
        res = decode_record(rec, layout)
        out[i, 0] = res.x_failure
        out[i, 1] = res.z_failure
    return out


def run_point(config: TrialConfig, start_trial: int = 0,
              n_trials: int | None = None, backend: str = "auto") -> np.ndarray:
    """Per-trial logical failure bits for a block of a Monte Carlo point."""
    if backend == "auto":
        backend = "kernel" if HAS_NUMBA else "reference"
    if backend == "kernel":
        fail, _ = run_point_kernel(config, start_trial, n_trials)
        return fail
    if backend == "reference":
        return run_point_reference(config, start_trial, n_trials)
    raise ValueError(f"unknown backend {backend!r}")
