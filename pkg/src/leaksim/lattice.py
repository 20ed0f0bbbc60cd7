"""Geometry of the distance-d toric code.

Data qubits live on the edges of a d x d square grid with periodic
boundaries.  Horizontal edge (r, c) joins vertices (r, c) and (r, c+1);
vertical edge (r, c) joins vertices (r, c) and (r+1, c), with rows
growing downward and both coordinates taken mod d.

Index conventions used everywhere downstream:

* horizontal edge (r, c) -> r*d + c
* vertical edge   (r, c) -> d*d + r*d + c
* plaquette (X stabilizer) (r, c) -> r*d + c, supported on the four
  edges bordering the face whose top-left vertex is (r, c)
* vertex (Z stabilizer) (r, c) -> r*d + c, supported on the four edges
  meeting vertex (r, c)

Stabilizer supports are stored in the time-step order their
syndrome-extraction CNOTs fire: plaquettes interact (north, west, east,
south) and vertices (north, east, west, south).  That interleaving lets
every stabilizer run its four CNOTs in four fully parallel steps: in
each step the plaquettes touch one full edge orientation and the
vertices the other, so no data qubit is contended.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

X_STABILIZER = 0
Z_STABILIZER = 1


def h_edge(r: int, c: int, d: int) -> int:
    """Index of the horizontal edge at (r, c), coordinates wrapped."""
    return (r % d) * d + (c % d)


def v_edge(r: int, c: int, d: int) -> int:
    """Index of the vertical edge at (r, c), coordinates wrapped."""
    return d * d + (r % d) * d + (c % d)


def torus_distance(a: tuple[int, int], b: tuple[int, int], d: int) -> int:
    """Manhattan distance on the d x d torus (per-axis wraparound)."""
    dr = abs(a[0] - b[0]) % d
    dc = abs(a[1] - b[1]) % d
    return min(dr, d - dr) + min(dc, d - dc)


@dataclass(frozen=True)
class ToricLayout:
    """Immutable geometry shared by the simulator and the decoder."""

    d: int
    n_data: int
    n_stab: int
    # (d*d, 4) data-qubit indices per stabilizer, in CNOT firing order.
    x_schedule: np.ndarray
    z_schedule: np.ndarray
    # (2, n_data) 0/1 masks; row i is one non-contractible loop.
    x_logicals: np.ndarray
    z_logicals: np.ndarray

    @property
    def data_qubits(self) -> range:
        return range(self.n_data)

    @property
    def x_stabilizers(self) -> range:
        return range(self.n_stab)

    @property
    def z_stabilizers(self) -> range:
        return range(self.n_stab)

    def support(self, stype: int, s: int) -> np.ndarray:
        """Ordered 4-qubit support of stabilizer ``s`` of type ``stype``."""
        if stype == X_STABILIZER:
            return self.x_schedule[s]
        if stype == Z_STABILIZER:
            return self.z_schedule[s]
        raise ValueError(f"unknown stabilizer type {stype!r}")

    def stab_coord(self, s: int) -> tuple[int, int]:
        """Grid coordinate of stabilizer index ``s`` (both types)."""
        return divmod(s, self.d)

    def swap_partner(self, stype: int, s: int) -> int:
        """Data qubit exchanged with ancilla ``s`` by the role-swap circuit.

        The partner is the data qubit of the stabilizer's final CNOT, so
        the swap completes with exactly one extra two-qubit gate.
        """
        return int(self.support(stype, s)[3])


def build_layout(d: int) -> ToricLayout:
    """Construct the distance-``d`` toric code geometry.

    Requires odd ``d >= 3``.  Odd distances guarantee that the short way
    around the torus is never ambiguous, which the decoder's canonical
    correction paths rely on.
    """
    if not isinstance(d, (int, np.integer)):
        raise ValueError(f"d must be an integer, got {d!r}")
    if d < 3:
        raise ValueError(f"d must be at least 3, got {d}")
    if d % 2 == 0:
        raise ValueError(f"d must be odd, got {d}")

    d2 = d * d
    x_schedule = np.empty((d2, 4), dtype=np.int32)
    z_schedule = np.empty((d2, 4), dtype=np.int32)
    for r in range(d):
        for c in range(d):
            s = r * d + c
            # plaquette (r, c): north, west, east, south
            x_schedule[s] = (
                h_edge(r, c, d),
                v_edge(r, c, d),
                v_edge(r, c + 1, d),
                h_edge(r + 1, c, d),
            )
            # vertex (r, c): north, east, west, south
            z_schedule[s] = (
                v_edge(r - 1, c, d),
                h_edge(r, c, d),
                h_edge(r, c - 1, d),
                v_edge(r, c, d),
            )

    n_data = 2 * d2
    x_logicals = np.zeros((2, n_data), dtype=np.uint8)
    z_logicals = np.zeros((2, n_data), dtype=np.uint8)
    for k in range(d):
        x_logicals[0, h_edge(0, k, d)] = 1  # horizontal loop of X
        x_logicals[1, v_edge(k, 0, d)] = 1  # vertical loop of X
        z_logicals[0, h_edge(k, 0, d)] = 1  # crosses x_logicals[0] once
        z_logicals[1, v_edge(0, k, d)] = 1  # crosses x_logicals[1] once

    for arr in (x_schedule, z_schedule, x_logicals, z_logicals):
        arr.setflags(write=False)

    return ToricLayout(
        d=int(d),
        n_data=n_data,
        n_stab=d2,
        x_schedule=x_schedule,
        z_schedule=z_schedule,
        x_logicals=x_logicals,
        z_logicals=z_logicals,
    )
