"""Surface-code lattices: stabilizer supports, coordinates, logical operators.

Two code families are provided.

Toric code
    ``L x L`` periodic lattice with qubits on edges, ``n = 2 L^2``.  Vertex
    stabilizers are X-type (products of X on the four edges meeting a
    vertex), plaquette stabilizers are Z-type (four edges bounding a face).
    All ``2 L^2`` stabilizers are kept, including the two redundant group
    products, so syndromes have fixed length ``N = 2 L^2`` and stabilizer
    coordinates tile the full vertex and plaquette grids.

Rotated surface code
    ``L x L`` grid of data qubits (``L`` odd), ``L^2 - 1`` stabilizers on
    checkerboard faces, weight 2 on the boundary.  Coordinates use a
    doubled-integer convention: qubit ``(i, j)`` sits at ``(2i, 2j)`` and a
    face centered between four qubits sits at odd coordinates ``(2a+1, 2b+1)``,
    keeping every stored coordinate and Manhattan distance integral.

Lattices are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TORIC = "toric"
ROTATED = "rotated"


@dataclass(frozen=True)
class Stabilizer:
    """One measured check: a pure-X or pure-Z Pauli product."""

    index: int
    pauli_type: str  # "X" or "Z"
    support: tuple[int, ...]
    coord: tuple[int, int]


@dataclass(frozen=True)
class LogicalOperator:
    """Encoded-qubit operator: commutes with every stabilizer, is not one."""

    pauli_type: str
    support: frozenset[int]
    name: str


class CodeLattice:
    """Immutable code geometry plus derived incidence matrices.

    Stabilizer indexing is fixed: X-type stabilizers occupy ``[0, n_x_stabs)``
    and Z-type the rest, each block row-major by coordinate.  This gives
    every stabilizer a stable identity for embedding tables and syndromes.
    """

    def __init__(self, kind, L, n_qubits, stabilizers, logical_ops, center,
                 qubit_coords):
        self.kind = kind
        self.L = L
        self.n_qubits = n_qubits
        self.stabilizers = stabilizers
        self.logical_ops = logical_ops
        self.center = center
        self.qubit_coords = qubit_coords

        self.n_stabs = len(stabilizers)
        self.n_x_stabs = sum(1 for s in stabilizers if s.pauli_type == "X")
        self.stab_types = np.array(
            [0 if s.pauli_type == "X" else 1 for s in stabilizers], dtype=np.uint8)
        self.stab_coords = np.array([s.coord for s in stabilizers], dtype=np.int64)

        # Incidence matrices over GF(2): X-type checks fire on z error bits,
        # Z-type checks on x error bits.
        full = np.zeros((self.n_stabs, n_qubits), dtype=np.uint8)
        for s in stabilizers:
            full[s.index, list(s.support)] = 1
        self.check_full = full
        self.check_x = full[: self.n_x_stabs]
        self.check_z = full[self.n_x_stabs:]

        self._coord_index = {
            (s.pauli_type, s.coord[0], s.coord[1]): s.index for s in stabilizers
        }

    def stabilizer_at(self, pauli_type: str, x: int, y: int) -> int:
        """Index of the stabilizer of the given type at coordinate (x, y)."""
        return self._coord_index[(pauli_type, x, y)]

    def signed_delta(self, a: int, b: int) -> tuple[int, int]:
        """Displacement from stabilizer a to b, wrap-minimal on the torus.

        Toric deltas are reduced into ``(-L/2, L/2]`` per axis (ties keep the
        positive representative); rotated deltas are plain differences.
        """
        ax, ay = self.stab_coords[a]
        bx, by = self.stab_coords[b]
        if self.kind == TORIC:
            return (_wrap(bx - ax, self.L), _wrap(by - ay, self.L))
        return (int(bx - ax), int(by - ay))

    def manhattan(self, a: int, b: int) -> int:
        dx, dy = self.signed_delta(a, b)
        return abs(dx) + abs(dy)

    def __repr__(self):
        return f"CodeLattice({self.kind}, L={self.L}, n={self.n_qubits})"


def _wrap(d: int, L: int) -> int:
    d = int(d) % L
    if 2 * d > L:
        d -= L
    return d


def build_toric(L: int) -> CodeLattice:
    """Construct the toric code of distance ``L`` (``L >= 2``).

    Qubit layout: horizontal edge ``(x, y)`` -> id ``y*L + x`` runs from
    vertex ``(x, y)`` to ``(x+1, y)``; vertical edge ``(x, y)`` ->
    id ``L^2 + y*L + x`` runs from ``(x, y)`` to ``(x, y+1)``; all mod L.
    """
    if L < 2:
        raise ValueError(f"toric code needs L >= 2, got {L}")

    def h(x, y):
        return (y % L) * L + (x % L)

    def v(x, y):
        return L * L + (y % L) * L + (x % L)

    stabilizers = []
    for y in range(L):
        for x in range(L):
            support = (h(x, y), h(x - 1, y), v(x, y), v(x, y - 1))
            stabilizers.append(Stabilizer(y * L + x, "X", tuple(sorted(support)), (x, y)))
    for y in range(L):
        for x in range(L):
            support = (h(x, y), h(x, y + 1), v(x, y), v(x + 1, y))
            stabilizers.append(
                Stabilizer(L * L + y * L + x, "Z", tuple(sorted(support)), (x, y)))

    # Two non-contractible cycles of each type.  X strings live on the dual
    # lattice, Z strings on the direct lattice; partners are chosen so each
    # logical anticommutes with exactly one operator of the opposite type.
    logical_ops = [
        LogicalOperator("X", frozenset(v(x, 0) for x in range(L)), "X1"),
        LogicalOperator("X", frozenset(h(0, y) for y in range(L)), "X2"),
        LogicalOperator("Z", frozenset(h(x, 0) for x in range(L)), "Z1"),
        LogicalOperator("Z", frozenset(v(0, y) for y in range(L)), "Z2"),
    ]

    qubit_coords = np.zeros((2 * L * L, 2), dtype=np.int64)
    for y in range(L):
        for x in range(L):
            qubit_coords[h(x, y)] = (x, y)
            qubit_coords[v(x, y)] = (x, y)

    return CodeLattice(TORIC, L, 2 * L * L, stabilizers, logical_ops,
                       (L / 2.0, L / 2.0), qubit_coords)


def build_rotated(L: int) -> CodeLattice:
    """Construct the rotated surface code of odd distance ``L`` (``L >= 3``).

    Faces are indexed by their lower-left qubit ``(a, b)`` with
    ``a, b in [-1, L-1]``; a face touches the up-to-four grid qubits at its
    corners.  Interior faces alternate X/Z by the parity of ``a + b``;
    exactly half of the weight-2 boundary faces are measured (X on the
    top/bottom rows, Z on the left/right columns), which yields
    ``(L^2 - 1) / 2`` stabilizers of each type.
    """
    if L < 3 or L % 2 == 0:
        raise ValueError(f"rotated surface code needs odd L >= 3, got {L}")

    def qubit(i, j):
        return j * L + i

    def face_support(a, b):
        corners = [(a, b), (a + 1, b), (a, b + 1), (a + 1, b + 1)]
        return tuple(sorted(qubit(i, j) for i, j in corners
                            if 0 <= i < L and 0 <= j < L))

    faces_x, faces_z = [], []
    for b in range(-1, L):
        for a in range(-1, L):
            interior = 0 <= a < L - 1 and 0 <= b < L - 1
            x_type = (a + b) % 2 == 1
            if interior:
                keep = True
            elif b == -1 and 0 <= a < L - 1:
                keep = x_type  # top row keeps X faces only
            elif b == L - 1 and 0 <= a < L - 1:
                keep = x_type
            elif a == -1 and 0 <= b < L - 1:
                keep = not x_type  # left/right columns keep Z faces only
            elif a == L - 1 and 0 <= b < L - 1:
                keep = not x_type
            else:
                keep = False  # corners
            if not keep:
                continue
            entry = (face_support(a, b), (2 * a + 1, 2 * b + 1))
            (faces_x if x_type else faces_z).append(entry)

    stabilizers = []
    for support, coord in faces_x:
        stabilizers.append(Stabilizer(len(stabilizers), "X", support, coord))
    for support, coord in faces_z:
        stabilizers.append(Stabilizer(len(stabilizers), "Z", support, coord))

    logical_ops = [
        LogicalOperator("X", frozenset(qubit(0, j) for j in range(L)), "X1"),
        LogicalOperator("Z", frozenset(qubit(i, 0) for i in range(L)), "Z1"),
    ]

    qubit_coords = np.zeros((L * L, 2), dtype=np.int64)
    for j in range(L):
        for i in range(L):
            qubit_coords[qubit(i, j)] = (2 * i, 2 * j)

    return CodeLattice(ROTATED, L, L * L, stabilizers, logical_ops,
                       (float(L - 1), float(L - 1)), qubit_coords)


def commutes(a, b) -> bool:
    """True iff the two X/Z-type operators commute.

    Same-type Pauli products always commute; opposite types commute exactly
    when their supports overlap on an even number of qubits.
    """
    if a.pauli_type == b.pauli_type:
        return True
    overlap = len(set(a.support) & set(b.support))
    return overlap % 2 == 0
