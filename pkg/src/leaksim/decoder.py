"""Syndrome decoding: defects, matching, correction, logical verdict.

Stabilizer outcomes are compared between consecutive rounds (round -1 is
the all-zero reference), and every change becomes a defect node at
(round, stabilizer).  Within each sector the defect count is always
even: each data or measurement fault flips outcomes in pairs when
histories are diffed, so an odd count can only mean a caller bug and is
rejected loudly.

Sector 0 holds plaquette outcomes, which accumulate data Z flips, so
its matching produces Z corrections; sector 1 holds vertex outcomes and
produces X corrections.  Matched defects are joined by a canonical
shortest path: rows first, then columns, always the short way around
the torus (distances never tie because d is odd), which keeps the
pure-Python decoder and the compiled batch engine bit-identical.  Time
separation contributes weight |dt| but no correction, matching the
measurement-error interpretation of a vertical pair.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import ToricLayout, h_edge, v_edge
from .matching import min_weight_perfect_matching


@dataclass(frozen=True)
class DefectSet:
    """Defect nodes per sector, ordered by round then stabilizer index."""

    d: int
    rounds: int
    sectors: tuple[tuple[tuple[int, int], ...], tuple[tuple[int, int], ...]]


@dataclass(frozen=True)
class MatchingGraph:
    """Complete graph on one sector's defects with integer weights."""

    d: int
    nodes: tuple[tuple[int, int], ...]
    weights: np.ndarray


@dataclass(frozen=True)
class SectorMatching:
    sector: int
    nodes: tuple[tuple[int, int], ...]
    pairs: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class Correction:
    """Data-qubit flips that return the state to the codespace."""

    x_flips: np.ndarray
    z_flips: np.ndarray


@dataclass(frozen=True)
class DecodeResult:
    x_failure: bool
    z_failure: bool
    correction: Correction
    defects: DefectSet


def syndromes_to_defects(history, layout: ToricLayout) -> DefectSet:
    """Diff consecutive syndrome rounds into defect nodes.

    ``history`` has shape (rounds + 1, 2, d^2) with the final row coming
    from a noiseless readout.
    """
    arr = np.asarray(history, dtype=np.uint8)
    if arr.ndim != 3 or arr.shape[1] != 2 or arr.shape[2] != layout.n_stab:
        raise ValueError(
            f"history shape {arr.shape} does not match layout d={layout.d}")
    total = arr.shape[0]
    sectors = []
    for sector in (0, 1):
        nodes = []
        prev = np.zeros(layout.n_stab, dtype=np.uint8)
        for t in range(total):
            row = arr[t, sector]
            changed = np.nonzero(row ^ prev)[0]
            for s in changed:
                nodes.append((t, int(s)))
            prev = row
        sectors.append(tuple(nodes))
    return DefectSet(d=layout.d, rounds=total - 1,
                     sectors=(sectors[0], sectors[1]))


def _node_weight(a: tuple[int, int], b: tuple[int, int], d: int) -> int:
    ta, sa = a
    tb, sb = b
    ra, ca = divmod(sa, d)
    rb, cb = divmod(sb, d)
    dr = abs(ra - rb)
    dc = abs(ca - cb)
    return min(dr, d - dr) + min(dc, d - dc) + abs(ta - tb)


def build_matching_graph(defects, layout: ToricLayout) -> MatchingGraph:
    """Complete weighted graph on one sector's defect nodes."""
    nodes = tuple(defects)
    n = len(nodes)
    weights = np.zeros((n, n), dtype=np.int64)
    d = layout.d
    for i in range(n):
        for j in range(i + 1, n):
            w = _node_weight(nodes[i], nodes[j], d)
            weights[i, j] = w
            weights[j, i] = w
    return MatchingGraph(d=d, nodes=nodes, weights=weights)


def _match_indices(weights: np.ndarray) -> tuple[tuple[int, int], ...]:
    """Minimum-weight perfect matching with small-n fast paths.

    The n <= 4 cases are resolved directly (first strictly better
    pairing wins) so the hot path never touches the blossom solver;
    the batch engine implements the identical rule.
    """
    n = weights.shape[0]
    if n % 2 == 1:
        raise ValueError(f"odd defect count {n} violates the parity contract")
    if n == 0:
        return ()
    if n == 2:
        return ((0, 1),)
    if n == 4:
        totals = (
            weights[0, 1] + weights[2, 3],
            weights[0, 2] + weights[1, 3],
            weights[0, 3] + weights[1, 2],
        )
        best = 0
        if totals[1] < totals[best]:
            best = 1
        if totals[2] < totals[best]:
            best = 2
        if best == 0:
            return ((0, 1), (2, 3))
        if best == 1:
            return ((0, 2), (1, 3))
        return ((0, 3), (1, 2))
    return tuple(min_weight_perfect_matching(weights))


def mwpm(graph: MatchingGraph) -> tuple[tuple[int, int], ...]:
    """Exact minimum-weight perfect matching of a defect graph.

    Raises ``ValueError`` on an odd node count, which can only arise
    from a corrupted syndrome history.
    """
    return _match_indices(np.asarray(graph.weights))


def _walk_correction(sector: int, sa: int, sb: int, d: int,
                     corr: np.ndarray) -> None:
    """Flip the data qubits joining two stabilizers along the canonical path.

    Rows first, then columns, short way around the torus.  Plaquette
    steps cross their shared horizontal/vertical edges; vertex steps the
    dual ones.
    """
    ra, ca = divmod(sa, d)
    rb, cb = divmod(sb, d)
    dr = (rb - ra) % d
    if dr > d - dr:
        step, nsteps = -1, d - dr
    else:
        step, nsteps = 1, dr
    r, c = ra, ca
    for _ in range(nsteps):
        if sector == 0:
            edge = h_edge(r + 1, c, d) if step == 1 else h_edge(r, c, d)
        else:
            edge = v_edge(r, c, d) if step == 1 else v_edge(r - 1, c, d)
        corr[edge] ^= 1
        r = (r + step) % d
    dc = (cb - ca) % d
    if dc > d - dc:
        step, nsteps = -1, d - dc
    else:
        step, nsteps = 1, dc
    for _ in range(nsteps):
        if sector == 0:
            edge = v_edge(r, c + 1, d) if step == 1 else v_edge(r, c, d)
        else:
            edge = h_edge(r, c, d) if step == 1 else h_edge(r, c - 1, d)
        corr[edge] ^= 1
        c = (c + step) % d


def matching_to_correction(matchings, layout: ToricLayout) -> Correction:
    """Convert sector matchings into data-qubit corrections.

    Accepts one :class:`SectorMatching` or an iterable covering both
    sectors.  Sector 0 pairs produce Z flips, sector 1 pairs X flips.
    """
    if isinstance(matchings, SectorMatching):
        matchings = (matchings,)
    x_corr = np.zeros(layout.n_data, dtype=np.uint8)
    z_corr = np.zeros(layout.n_data, dtype=np.uint8)
    for m in matchings:
        corr = z_corr if m.sector == 0 else x_corr
        for i, j in m.pairs:
            _, sa = m.nodes[i]
            _, sb = m.nodes[j]
            _walk_correction(m.sector, sa, sb, layout.d, corr)
    return Correction(x_flips=x_corr, z_flips=z_corr)


def _stab_parity(frame: np.ndarray, schedule: np.ndarray, s: int) -> int:
    p = 0
    for q in schedule[s]:
        p ^= int(frame[q])
    return p


def logical_failure(final_x, final_z, correction: Correction,
                    layout: ToricLayout) -> tuple[bool, bool]:
    """Check the corrected final frame for logical operator flips.

    The corrected frame must be syndrome-free; anything else means the
    correction did not come from this trial's defects and is reported
    as a ``RuntimeError`` rather than a failure count.  A residual X
    frame that anticommutes with either Z logical is an X failure, and
    symmetrically for Z.
    """
    residual_x = (np.asarray(final_x, dtype=np.uint8)
                  ^ correction.x_flips).astype(np.uint8)
    residual_z = (np.asarray(final_z, dtype=np.uint8)
                  ^ correction.z_flips).astype(np.uint8)
    for s in range(layout.n_stab):
        if _stab_parity(residual_z, layout.x_schedule, s):
            raise RuntimeError("correction leaves a plaquette syndrome set")
        if _stab_parity(residual_x, layout.z_schedule, s):
            raise RuntimeError("correction leaves a vertex syndrome set")
    x_failure = bool(
        (int(np.bitwise_and(residual_x, layout.z_logicals[0]).sum()) & 1)
        or (int(np.bitwise_and(residual_x, layout.z_logicals[1]).sum()) & 1))
    z_failure = bool(
        (int(np.bitwise_and(residual_z, layout.x_logicals[0]).sum()) & 1)
        or (int(np.bitwise_and(residual_z, layout.x_logicals[1]).sum()) & 1))
    return x_failure, z_failure


def decode_record(record, layout: ToricLayout | None = None) -> DecodeResult:
    """Full decode of one trial record: defects, matching, verdict."""
    if layout is None:
        from .simulator import get_layout

        layout = get_layout(record.config.d)
    defects = syndromes_to_defects(record.syndromes, layout)
    matchings = []
    for sector in (0, 1):
        nodes = defects.sectors[sector]
        graph = build_matching_graph(nodes, layout)
        pairs = _match_indices(graph.weights)
        matchings.append(SectorMatching(sector=sector, nodes=nodes,
                                        pairs=pairs))
    correction = matching_to_correction(matchings, layout)
    x_failure, z_failure = logical_failure(record.final_x, record.final_z,
                                           correction, layout)
    return DecodeResult(x_failure=x_failure, z_failure=z_failure,
                        correction=correction, defects=defects)
