"""Correction chains: the physical qubit flips realizing a matched pair.

A matched defect pair is repaired by flipping qubits along a path that moves
one defect onto the other.  Toric paths are computed arithmetically
(row-then-column along the wrap-minimal displacement, with optional wrap
toggles to select the other homology class).  Rotated paths run over the
diagonal adjacency of same-type faces via BFS, and may terminate on a
virtual (absent) boundary face, which removes a defect through the
boundary.

Everything is keyed by the *detecting* stabilizer type tau: tau="Z" chains
are X-error chains (Z checks detect bit flips), tau="X" chains are Z-error
chains.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .lattice import TORIC, CodeLattice, _wrap
from .noise import PauliFrame


def apply_chain(frame: PauliFrame, qubits, tau: str) -> None:
    """Flip the chain's qubits in the frame (X flips for tau="Z")."""
    bits = frame.x_bits if tau == "Z" else frame.z_bits
    for q in qubits:
        bits[q] ^= 1


def _toggle(delta: int, L: int) -> int:
    # Send a displacement to the other way around the torus; 0 wraps to +L
    # (a full loop, used to flip the homology class of a closed pair).
    if delta > 0:
        return delta - L
    if delta < 0:
        return delta + L
    return L


def toric_path(lattice: CodeLattice, a, b, tau: str,
               wrap_x: bool = False, wrap_y: bool = False) -> list[int]:
    """Qubits moving a tau-type defect from coord a to coord b.

    Walks the wrap-minimal displacement x-first then y; wrap_x / wrap_y
    select the complementary homology class along that axis.
    """
    L = lattice.L
    dx = _wrap(int(b[0]) - int(a[0]), L)
    dy = _wrap(int(b[1]) - int(a[1]), L)
    if wrap_x:
        dx = _toggle(dx, L)
    if wrap_y:
        dy = _toggle(dy, L)
    x, y = int(a[0]), int(a[1])
    qubits: list[int] = []

    def h(i, j):
        return (j % L) * L + (i % L)

    def v(i, j):
        return L * L + (j % L) * L + (i % L)

    sx = 1 if dx > 0 else -1
    for _ in range(abs(dx)):
        if tau == "Z":
            qubits.append(v(x + 1, y) if sx > 0 else v(x, y))
        else:
            qubits.append(h(x, y) if sx > 0 else h(x - 1, y))
        x = (x + sx) % L
    sy = 1 if dy > 0 else -1
    for _ in range(abs(dy)):
        if tau == "Z":
            qubits.append(h(x, y + 1) if sy > 0 else h(x, y))
        else:
            qubits.append(v(x, y) if sy > 0 else v(x, y - 1))
        y = (y + sy) % L
    return qubits


# --- rotated-code face graph -------------------------------------------------
#
# Same-type faces are diagonal neighbours sharing exactly one qubit.  Faces
# absent from the stabilizer set are virtual: stepping onto one removes the
# defect through the boundary.  Z-type virtual faces sit only on the top and
# bottom face rows (b = -1, L-1), X-type only on the left/right columns, so
# a boundary "side" is well defined per type.


def _face_coord(a: int, b: int) -> tuple[int, int]:
    return (2 * a + 1, 2 * b + 1)


def _face_qubit(a1, b1, a2, b2, L: int) -> int:
    # Shared qubit of two diagonally adjacent faces = the corner they share.
    i = max(a1, a2)
    j = max(b1, b2)
    return j * L + i


@lru_cache(maxsize=None)
def _face_tables(L: int, tau: str):
    """(real faces, virtual faces with side flags) for tau-type faces."""
    want_x = tau == "X"
    real = []
    virt = []
    for a in range(-1, L):
        for b in range(-1, L):
            if ((a + b) % 2 != 0) != want_x:
                continue
            interior = 0 <= a <= L - 2 and 0 <= b <= L - 2
            if interior:
                real.append((a, b))
                continue
            corner = a in (-1, L - 1) and b in (-1, L - 1)
            if not corner:
                if b == -1 and want_x and a % 2 == 0:
                    real.append((a, b))
                    continue
                if b == L - 1 and want_x and a % 2 == 1:
                    real.append((a, b))
                    continue
                if a == -1 and not want_x and b % 2 == 1:
                    real.append((a, b))
                    continue
                if a == L - 1 and not want_x and b % 2 == 0:
                    real.append((a, b))
                    continue
            # Virtual: side 0 = top (Z) / left (X), side 1 = bottom / right.
            if want_x:
                side = 0 if a == -1 else 1
            else:
                side = 0 if b == -1 else 1
            virt.append((a, b, side))
    return tuple(real), tuple(virt)


def rotated_virtual_faces(lattice: CodeLattice, tau: str,
                          side: int | None = None) -> list[tuple[int, int]]:
    """Coords of tau-type virtual boundary faces (optionally one side)."""
    _real, virt = _face_tables(lattice.L, tau)
    return [_face_coord(a, b) for (a, b, s) in virt
            if side is None or s == side]


def rotated_boundary_distance(lattice: CodeLattice, coord, tau: str,
                              side: int | None = None) -> int:
    """Manhattan distance from a defect to its nearest virtual exit face."""
    faces = rotated_virtual_faces(lattice, tau, side)
    x, y = int(coord[0]), int(coord[1])
    return min(abs(x - fx) + abs(y - fy) for (fx, fy) in faces)


def _rotated_bfs(lattice: CodeLattice, start, targets, tau: str) -> list[int]:
    """Qubit chain from face `start` to the nearest face in `targets`.

    Interior moves run over real faces only; target faces may be virtual.
    Deterministic: BFS with sorted neighbour expansion.
    """
    L = lattice.L
    real, virt = _face_tables(L, tau)
    realset = set(real)
    target = set(targets)
    s = (int(start[0]) - 1) // 2, (int(start[1]) - 1) // 2
    if s in target:
        return []
    prev: dict[tuple[int, int], tuple[int, int]] = {s: s}
    frontier = [s]
    hit = None
    while frontier and hit is None:
        nxt = []
        for (a, b) in frontier:
            for da, db in ((-1, -1), (-1, 1), (1, -1), (1, 1)):
                nb = (a + da, b + db)
                if nb in prev:
                    continue
                if nb in target:
                    prev[nb] = (a, b)
                    hit = nb
                    break
                if nb in realset:
                    prev[nb] = (a, b)
                    nxt.append(nb)
            if hit is not None:
                break
        frontier = sorted(nxt)
    if hit is None:
        raise ValueError(f"no path from {start} to targets {sorted(target)}")
    qubits = []
    cur = hit
    while cur != s:
        pa = prev[cur]
        qubits.append(_face_qubit(cur[0], cur[1], pa[0], pa[1], L))
        cur = pa
    qubits.reverse()
    return qubits


def rotated_path(lattice: CodeLattice, a, b, tau: str) -> list[int]:
    """Qubit chain connecting two real tau-type defects (interior route)."""
    tb = (int(b[0]) - 1) // 2, (int(b[1]) - 1) // 2
    return _rotated_bfs(lattice, a, {tb}, tau)


def rotated_boundary_path(lattice: CodeLattice, a, tau: str,
                          side: int | None = None) -> list[int]:
    """Qubit chain taking a tau-type defect out through a boundary side."""
    _real, virt = _face_tables(lattice.L, tau)
    targets = {(va, vb) for (va, vb, s) in virt if side is None or s == side}
    return _rotated_bfs(lattice, a, targets, tau)


def pair_path(lattice: CodeLattice, a, b, tau: str,
              wrap_x: bool = False, wrap_y: bool = False) -> list[int]:
    """Dispatch on lattice kind; wraps are meaningful for Toric only."""
    if lattice.kind == TORIC:
        return toric_path(lattice, a, b, tau, wrap_x, wrap_y)
    return rotated_path(lattice, a, b, tau)
