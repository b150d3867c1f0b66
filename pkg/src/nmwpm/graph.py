"""Decoding graphs: defect nodes, typed edge classes, and raw features.

A syndrome maps to a complete graph per matching class (X-type defects and
Z-type defects are matched separately; no cross-type edges).  Node features
are computed for *all* N stabilizers so the model sees a fixed-width view of
the lattice; inactive stabilizers carry zero geometric features but keep
their positional encoding.

For the rotated code each class additionally gets one virtual boundary node
per real defect.  A virtual node is positionless: every edge touching it
uses the *real* endpoint's distance to the nearest boundary of the right
type, and virtual-virtual edges carry zero features, matching their
weight-0 role in the matcher.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chains import rotated_boundary_distance, rotated_virtual_faces
from .lattice import ROTATED, TORIC, CodeLattice, Stabilizer
from .noise import DEPOLARIZING, INDEPENDENT, Syndrome

D_PE = 16  # 8 sinusoid dimensions per axis

N_NODE_FEATURES = 5 + D_PE  # [x, y, tau_onehot(2), rho] + PE
N_EDGE_FEATURES = 4         # [d, dx, dy, tau_edge]


def rho(stab: Stabilizer, lattice: CodeLattice) -> float:
    """Radial feature: how far a stabilizer sits from the lattice center.

    Toric stabilizers use their own coordinate; rotated stabilizers use the
    mean coordinate of their supported qubits (boundary checks have 2),
    reduced to a scalar distance so the feature slot is kind-agnostic.
    """
    cx, cy = lattice.center
    if lattice.kind == TORIC:
        x, y = stab.coord
        return float(np.hypot(x - cx, y - cy))
    mean = lattice.qubit_coords[list(stab.support)].mean(axis=0)
    return float(np.hypot(mean[0] - cx, mean[1] - cy))


def _pe_axis(value: float, dims: int) -> np.ndarray:
    # Standard sinusoidal encoding: interleaved sin/cos over a geometric
    # frequency ladder, `dims` even.
    k = np.arange(dims // 2, dtype=np.float64)
    freq = 10000.0 ** (-2.0 * k / dims)
    out = np.empty(dims, dtype=np.float64)
    out[0::2] = np.sin(value * freq)
    out[1::2] = np.cos(value * freq)
    return out


def positional_encoding(index: int, lattice: CodeLattice,
                        d_pe: int = D_PE) -> np.ndarray:
    """Deterministic 2D sinusoidal embedding of a stabilizer's position.

    Toric plaquettes are offset to their geometric face center (+0.5 on both
    axes) so vertex and plaquette encodings never collide despite sharing
    integer grid coordinates.
    """
    if d_pe % 4 != 0:
        raise ValueError(f"d_pe must be a multiple of 4, got {d_pe}")
    x, y = lattice.stab_coords[index]
    x, y = float(x), float(y)
    if lattice.kind == TORIC and lattice.stab_types[index] == 1:
        x, y = x + 0.5, y + 0.5
    half = d_pe // 2
    return np.concatenate([_pe_axis(x, half), _pe_axis(y, half)])


# Node features are syndrome-independent per stabilizer, so the full
# all-active matrix is built once per (lattice, d_pe) and per-shot work is a
# copy plus row zeroing.  Values are kept alive in the cache, which pins the
# id() key against reuse.
_NODE_STATICS: dict[tuple[int, int], tuple[CodeLattice, np.ndarray]] = {}


def _node_statics(lattice: CodeLattice, d_pe: int) -> np.ndarray:
    key = (id(lattice), d_pe)
    hit = _NODE_STATICS.get(key)
    if hit is not None and hit[0] is lattice:
        return hit[1]
    n = lattice.n_stabs
    a = np.zeros((n, 5 + d_pe), dtype=np.float64)
    for i in range(n):
        s = lattice.stabilizers[i]
        a[i, 0] = s.coord[0]
        a[i, 1] = s.coord[1]
        a[i, 2 + lattice.stab_types[i]] = 1.0
        a[i, 4] = rho(s, lattice)
        a[i, 5:] = positional_encoding(i, lattice, d_pe)
    _NODE_STATICS[key] = (lattice, a)
    return a


def node_feature_matrix(lattice: CodeLattice, syndrome: Syndrome,
                        d_pe: int = D_PE) -> np.ndarray:
    """Raw feature rows a_i for all N stabilizers (zeroing rule applied)."""
    a = _node_statics(lattice, d_pe).copy()
    # Geometric features stay zero for inactive checks; PE always present.
    a[~syndrome.bits.astype(bool), :5] = 0.0
    return a


@dataclass(frozen=True, eq=False)
class DecodingGraph:
    """Complete defect graph of one shot, split into two matching classes.

    Node ids < N are stabilizer indices; ids >= N are virtual boundary
    nodes (rotated code only, one per real defect, listed after the real
    defects of their class).  ``defect_ids`` concatenates the X class and
    then the Z class.
    """

    lattice: CodeLattice
    noise_kind: str
    defect_ids: tuple[int, ...]
    node_class: np.ndarray        # uint8 per defect_ids entry: 0=X, 1=Z class
    n_virtual: int
    directed_edges: np.ndarray    # (E, 2) int64, node ids, (i,j),(j,i) adjacent
    edge_class: np.ndarray        # (E,) uint8
    raw_node_features: np.ndarray  # (N, 5 + d_pe)
    raw_edge_features: np.ndarray  # (E, 4): [d, dx, dy, tau_edge]
    modulated: np.ndarray          # (N,) float64, entries in {-1, +1}
    d_pe: int = D_PE

    def class_nodes(self, cls: int) -> list[int]:
        return [d for d, c in zip(self.defect_ids, self.node_class) if c == cls]

    def n_real_defects(self) -> int:
        return len(self.defect_ids) - self.n_virtual


def _class_defects(syndrome: Syndrome, lattice: CodeLattice) -> tuple[list[int], list[int]]:
    defects = syndrome.defects()
    x_cls = [d for d in defects if d < lattice.n_x_stabs]
    z_cls = [d for d in defects if d >= lattice.n_x_stabs]
    return x_cls, z_cls


def build_graph(syndrome: Syndrome, lattice: CodeLattice,
                noise_kind: str, d_pe: int = D_PE) -> DecodingGraph:
    """Assemble the complete per-class defect graph for one syndrome."""
    if noise_kind not in (INDEPENDENT, DEPOLARIZING):
        raise ValueError(f"unknown noise kind {noise_kind!r}")
    if len(syndrome.bits) != lattice.n_stabs:
        raise ValueError(
            f"syndrome length {len(syndrome.bits)} != N={lattice.n_stabs}")

    x_cls, z_cls = _class_defects(syndrome, lattice)
    rotated = lattice.kind == ROTATED

    node_ids: list[int] = []
    node_cls: list[int] = []
    # Effective coordinate per node id (virtuals: nearest exit face), plus
    # the boundary distance used for every edge touching that real defect.
    coords: dict[int, tuple[float, float]] = {}
    bdist: dict[int, float] = {}
    is_virtual: dict[int, bool] = {}

    next_virtual = lattice.n_stabs
    n_virtual = 0
    for cls, members in ((0, x_cls), (1, z_cls)):
        tau = "X" if cls == 0 else "Z"
        faces = rotated_virtual_faces(lattice, tau) if rotated else ()
        for d in members:
            node_ids.append(d)
            node_cls.append(cls)
            c = lattice.stab_coords[d]
            coords[d] = (float(c[0]), float(c[1]))
            is_virtual[d] = False
            if rotated:
                bdist[d] = float(rotated_boundary_distance(lattice, c, tau))
        if rotated:
            for d in members:
                vid = next_virtual
                next_virtual += 1
                n_virtual += 1
                node_ids.append(vid)
                node_cls.append(cls)
                # Nearest exit face of the partner defect; used only for
                # the displacement feature of defect-virtual edges.
                c = lattice.stab_coords[d]
                best = min(faces, key=lambda f: abs(f[0] - c[0]) + abs(f[1] - c[1]))
                coords[vid] = (float(best[0]), float(best[1]))
                bdist[vid] = bdist[d]
                is_virtual[vid] = True

    # Vectorized per-class assembly; pair order matches nested ai < bi
    # iteration over the member list, with (i,j),(j,i) interleaved.
    cls_arr = np.array(node_cls, dtype=np.uint8)
    cx = np.array([coords[d][0] for d in node_ids], dtype=np.float64)
    cy = np.array([coords[d][1] for d in node_ids], dtype=np.float64)
    bd = np.array([bdist.get(d, 0.0) for d in node_ids], dtype=np.float64)
    virt = np.array([is_virtual[d] for d in node_ids], dtype=bool)
    ids_arr = np.array(node_ids, dtype=np.int64)

    edge_blocks: list[np.ndarray] = []
    feat_blocks: list[np.ndarray] = []
    class_counts = [0, 0]
    for cls in (0, 1):
        sel = np.nonzero(cls_arr == cls)[0]
        if len(sel) < 2:
            continue
        iu, ju = np.triu_indices(len(sel), k=1)
        gi, gj = sel[iu], sel[ju]
        dx = cx[gj] - cx[gi]
        dy = cy[gj] - cy[gi]
        if lattice.kind == TORIC:
            L = lattice.L
            dx %= L
            dx[2 * dx > L] -= L
            dy %= L
            dy[2 * dy > L] -= L
            d = np.abs(dx) + np.abs(dy)
        else:
            vi, vj = virt[gi], virt[gj]
            vv = vi & vj
            one_virtual = vi ^ vj
            d = np.where(vi | vj, 0.0, np.abs(dx) + np.abs(dy))
            d[one_virtual] = bd[np.where(vi, gj, gi)[one_virtual]]
            dx[vv] = 0.0
            dy[vv] = 0.0
        p = len(gi)
        e = np.empty((2 * p, 2), dtype=np.int64)
        e[0::2, 0] = e[1::2, 1] = ids_arr[gi]
        e[0::2, 1] = e[1::2, 0] = ids_arr[gj]
        f = np.empty((2 * p, 4), dtype=np.float64)
        f[0::2, 0] = f[1::2, 0] = d
        f[0::2, 1] = dx
        f[1::2, 1] = -dx
        f[0::2, 2] = dy
        f[1::2, 2] = -dy
        f[:, 3] = float(cls)
        edge_blocks.append(e)
        feat_blocks.append(f)
        class_counts[cls] = 2 * p

    if edge_blocks:
        directed = np.concatenate(edge_blocks)
        efeat = np.concatenate(feat_blocks)
    else:
        directed = np.empty((0, 2), dtype=np.int64)
        efeat = np.empty((0, 4), dtype=np.float64)
    eclass = np.repeat(np.array([0, 1], dtype=np.uint8), class_counts)

    return DecodingGraph(
        lattice=lattice,
        noise_kind=noise_kind,
        defect_ids=tuple(node_ids),
        node_class=cls_arr,
        n_virtual=n_virtual,
        directed_edges=directed,
        edge_class=eclass,
        raw_node_features=node_feature_matrix(lattice, syndrome, d_pe),
        raw_edge_features=efeat,
        modulated=2.0 * syndrome.bits.astype(np.float64) - 1.0,
        d_pe=d_pe,
    )
