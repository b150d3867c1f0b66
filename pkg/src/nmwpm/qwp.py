"""Quantum Weight Predictor: learned edge weights for syndrome matching.

Two-stage architecture.  Per-stabilizer geometry runs through small
feature MLPs and is fused with a learned embedding row, modulated by the
±1 syndrome; a stack of gated graph-attention layers then mixes
information between defects of the same matching class (non-defect rows
keep a self-path only).  Every directed edge becomes a token
[h_i || h_j || e'_ij] scored by a Transformer encoder with a sigmoid
head.  ``-ln(max(p_ij, p_ji))`` turns the two directed probabilities of
an edge into one matching weight.

Weight matrices are stored input-major, so activations multiply as
``x @ W`` with ``W.shape == (d_in, d_out)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor
from .checkpoint import load_checkpoint, save_checkpoint
from .chains import rotated_boundary_distance
from .graph import D_PE, DecodingGraph, build_graph
from .lattice import TORIC, CodeLattice
from .matching import Matching, MatchGraph, mwpm
from .noise import DEPOLARIZING, Syndrome

# Probabilities are clamped before any logarithm: the entropy term of the
# training loss deliberately drives them toward {0, 1}.
PROB_FLOOR = 1e-7
PROB_CEIL = 1.0 - 1e-7


@dataclass(frozen=True)
class QwpConfig:
    d_hidden: int = 128
    L_layers: int = 4
    K: int = 4
    L_enc: int = 2
    d_pe: int = D_PE

    def __post_init__(self):
        if self.d_hidden % 4:
            raise ValueError("d_hidden must be divisible by 4")
        if min(self.L_layers, self.K, self.L_enc) < 1:
            raise ValueError("layer and head counts must be >= 1")
        if self.d_token % self.K:
            raise ValueError(
                f"edge-token width {self.d_token} not divisible by K={self.K}")

    @property
    def d_sub(self) -> int:
        return self.d_hidden // 4

    @property
    def d_token(self) -> int:
        # [h_i || h_j || e'_ij] = d + d + (3/2)d
        return 2 * self.d_hidden + (3 * self.d_hidden) // 2


def max_graph_distance(lattice: CodeLattice) -> int:
    """Largest integer distance the edge-feature builder can emit.

    Bounds the distance-embedding table; distances index into it directly.
    """
    if lattice.kind == TORIC:
        return lattice.L  # wrapped Manhattan ceiling
    dmax = 0
    for cls, tau in ((0, "X"), (1, "Z")):
        ids = [i for i in range(lattice.n_stabs)
               if (i < lattice.n_x_stabs) == (cls == 0)]
        coords = [tuple(lattice.stab_coords[i]) for i in ids]
        for c in coords:
            dmax = max(dmax, int(rotated_boundary_distance(lattice, c, tau)))
            for c2 in coords:
                dmax = max(dmax, abs(c[0] - c2[0]) + abs(c[1] - c2[1]))
    return dmax


def _manifest(config: QwpConfig, lattice: CodeLattice) -> dict[str, tuple[int, ...]]:
    """Expected (name -> shape) table; the single source of truth for
    initialization, the load-time shape audit, and checkpoint layout."""
    d, ds = config.d_hidden, config.d_sub
    dt = config.d_token
    m: dict[str, tuple[int, ...]] = {}
    for feat, d_f in (("p", 2), ("rho", 1), ("pe", config.d_pe)):
        m[f"node.{feat}.U1"] = (d_f, d)
        m[f"node.{feat}.b1"] = (d,)
        m[f"node.{feat}.U2"] = (d, ds)
        m[f"node.{feat}.b2"] = (ds,)
    m["node.tau.U"] = (2, ds)
    m["node.tau.b"] = (ds,)
    # one row per stabilizer plus a shared row for virtual boundary nodes
    m["embed.R"] = (lattice.n_stabs + 1, d)
    m["inproj.W"] = (2 * d, d)
    m["inproj.b"] = (d,)
    m["inproj.ln.g"] = (d,)
    m["inproj.ln.b"] = (d,)
    m["edge.dist"] = (max_graph_distance(lattice) + 1, d)
    m["edge.geo.W1"] = (3, d)
    m["edge.geo.b1"] = (d,)
    m["edge.geo.W2"] = (d, d // 2)
    m["edge.geo.b2"] = (d // 2,)
    m["edge.geo.ln.g"] = (d // 2,)
    m["edge.geo.ln.b"] = (d // 2,)
    for layer in range(config.L_layers):
        p = f"gnn{layer}."
        m[p + "ln1.g"] = (d,)
        m[p + "ln1.b"] = (d,)
        m[p + "W1"] = (d, d)
        m[p + "b1"] = (d,)
        for k in range(config.K):
            for w in ("2", "3", "4"):
                m[f"{p}h{k}.W{w}"] = (d, d)
                m[f"{p}h{k}.b{w}"] = (d,)
        m[p + "w5"] = (3 * d, 1)
        m[p + "ln2.g"] = (d,)
        m[p + "ln2.b"] = (d,)
        m[p + "W6"] = (d, 4 * d)
        m[p + "b6"] = (4 * d,)
        m[p + "W7"] = (4 * d, d)
        m[p + "b7"] = (d,)
    m["encin.ln.g"] = (dt,)
    m["encin.ln.b"] = (dt,)
    m["encout.ln.g"] = (dt,)
    m["encout.ln.b"] = (dt,)
    for layer in range(config.L_enc):
        p = f"enc{layer}."
        m[p + "ln1.g"] = (dt,)
        m[p + "ln1.b"] = (dt,)
        for w in ("q", "k", "v", "o"):
            m[f"{p}W{w}"] = (dt, dt)
            m[f"{p}b{w}"] = (dt,)
        m[p + "ln2.g"] = (dt,)
        m[p + "ln2.b"] = (dt,)
        m[p + "W1"] = (dt, 4 * dt)
        m[p + "b1"] = (4 * dt,)
        m[p + "W2"] = (4 * dt, dt)
        m[p + "b2"] = (dt,)
    m["head.w"] = (dt, 1)
    m["head.b"] = (1,)
    return m


def _init_array(name: str, shape: tuple[int, ...],
                rng: np.random.Generator) -> np.ndarray:
    leaf = name.rsplit(".", 1)[-1]
    if leaf == "g":
        return np.ones(shape)
    if leaf.startswith("b"):
        return np.zeros(shape)
    if name in ("embed.R", "edge.dist"):
        return rng.normal(0.0, 0.02, size=shape)
    bound = math.sqrt(6.0 / shape[0])  # uniform Kaiming, fan-in scaled
    if name == "head.w":
        bound *= 0.1  # keep initial logits near 0, i.e. predictions near 0.5
    return rng.uniform(-bound, bound, size=shape)


class QwpParams:
    """Named parameter store bound to one (config, lattice) pair."""

    def __init__(self, config: QwpConfig, lattice: CodeLattice,
                 tensors: dict[str, Tensor]):
        expected = _manifest(config, lattice)
        if list(tensors) != list(expected):
            raise ValueError("parameter manifest mismatch")
        for name, shape in expected.items():
            got = tuple(tensors[name].shape)
            if got != shape:
                raise ValueError(f"{name}: shape {got} != expected {shape}")
        self.config = config
        self.lattice = lattice
        self.tensors = tensors

    def __getitem__(self, name: str) -> Tensor:
        return self.tensors[name]

    @classmethod
    def init(cls, config: QwpConfig, lattice: CodeLattice,
             seed: int = 0) -> "QwpParams":
        rng = np.random.default_rng(seed)
        tensors = {name: Tensor(_init_array(name, shape, rng))
                   for name, shape in _manifest(config, lattice).items()}
        return cls(config, lattice, tensors)

    def zero_grads(self) -> None:
        for t in self.tensors.values():
            t.grad = None

    def gnn_layer_params(self, layer: int) -> dict[str, Tensor]:
        prefix = f"gnn{layer}."
        return {k[len(prefix):]: v for k, v in self.tensors.items()
                if k.startswith(prefix)}

    def enc_layer_params(self, layer: int) -> dict[str, Tensor]:
        prefix = f"enc{layer}."
        return {k[len(prefix):]: v for k, v in self.tensors.items()
                if k.startswith(prefix)}

    def save(self, path) -> None:
        save_checkpoint(path, {k: t.values for k, t in self.tensors.items()})

    @classmethod
    def load(cls, path, config: QwpConfig,
             lattice: CodeLattice) -> "QwpParams":
        arrays = load_checkpoint(path)
        return cls(config, lattice,
                   {k: Tensor(v) for k, v in arrays.items()})


def _mlp2(x: Tensor, u1: Tensor, b1: Tensor, u2: Tensor, b2: Tensor) -> Tensor:
    return ad.add(ad.matmul(ad.relu(ad.add(ad.matmul(x, u1), b1)), u2), b2)


def node_embedding(graph: DecodingGraph, params: QwpParams) -> Tensor:
    """Modulated per-node embedding rows, width 2*d_hidden.

    Concatenates [p~ || tau~ || rho~ || PE~ || r_i] and scales each row
    by its ±1 syndrome value.  Virtual boundary rows carry zero raw
    features, share the dedicated last row of R, and count as active.
    """
    lattice = graph.lattice
    if (lattice.kind, lattice.L) != (params.lattice.kind, params.lattice.L):
        raise ValueError(f"graph lattice {lattice!r} does not match "
                         f"params lattice {params.lattice!r}")
    if graph.d_pe != params.config.d_pe:
        raise ValueError("positional-encoding width mismatch")
    n, v = lattice.n_stabs, graph.n_virtual
    raw = graph.raw_node_features
    if v:
        raw = np.vstack([raw, np.zeros((v, raw.shape[1]))])
    t = params.tensors
    p_t = _mlp2(Tensor(raw[:, 0:2]), t["node.p.U1"], t["node.p.b1"],
                t["node.p.U2"], t["node.p.b2"])
    tau_t = ad.add(ad.matmul(Tensor(raw[:, 2:4]), t["node.tau.U"]),
                   t["node.tau.b"])
    rho_t = _mlp2(Tensor(raw[:, 4:5]), t["node.rho.U1"], t["node.rho.b1"],
                  t["node.rho.U2"], t["node.rho.b2"])
    pe_t = _mlp2(Tensor(raw[:, 5:]), t["node.pe.U1"], t["node.pe.b1"],
                 t["node.pe.U2"], t["node.pe.b2"])
    rows = list(range(n)) + [n] * v
    r = ad.gather_rows(t["embed.R"], rows)
    a = ad.concat([p_t, tau_t, rho_t, pe_t, r], axis=1)
    shat = np.concatenate([graph.modulated, np.ones(v)])
    return ad.mul(a, Tensor(shat[:, None]))


def encode_nodes(graph: DecodingGraph, params: QwpParams) -> Tensor:
    """Initial node states h0, one row per stabilizer plus virtual rows."""
    a = node_embedding(graph, params)
    t = params.tensors
    h0 = ad.add(ad.matmul(a, t["inproj.W"]), t["inproj.b"])
    return ad.layer_norm(h0, t["inproj.ln.g"], t["inproj.ln.b"])


def gnn_layer(h: Tensor, graph: DecodingGraph,
              layer_params: dict[str, Tensor]) -> Tensor:
    """One gated graph-attention layer (pre-norm, residual twice).

    Attention runs over the complete defect graph within each matching
    class; rows outside both classes receive a zero message, so the gate
    interpolates them toward the projected self-features.
    """
    lp = layer_params
    d = lp["W1"].shape[0]
    n_heads = sum(1 for k in lp if k.endswith(".W2"))
    n_rows = h.shape[0]

    hhat = ad.layer_norm(h, lp["ln1.g"], lp["ln1.b"])
    htilde = ad.add(ad.matmul(hhat, lp["W1"]), lp["b1"])

    msgs = []
    scale = Tensor(np.float32(1.0 / math.sqrt(d)))
    for cls in (0, 1):
        members = graph.class_nodes(cls)
        n = len(members)
        if n < 2:
            continue  # no neighbors: zero message
        idx = np.asarray(members)
        hc = ad.gather_rows(hhat, idx)
        no_self = Tensor(np.where(np.eye(n, dtype=bool), -1e9, 0.0))
        acc = None
        for k in range(n_heads):
            q = ad.add(ad.matmul(hc, lp[f"h{k}.W3"]), lp[f"h{k}.b3"])
            key = ad.add(ad.matmul(hc, lp[f"h{k}.W4"]), lp[f"h{k}.b4"])
            val = ad.add(ad.matmul(hc, lp[f"h{k}.W2"]), lp[f"h{k}.b2"])
            scores = ad.mul(ad.matmul(q, ad.transpose(key)), scale)
            alpha = ad.softmax(ad.add(scores, no_self), axis=-1)
            msg = ad.matmul(alpha, val)
            acc = msg if acc is None else ad.add(acc, msg)
        m_cls = ad.mul(acc, Tensor(np.float32(1.0 / n_heads)))
        sel = np.zeros((n_rows, n), dtype=np.float32)
        sel[idx, np.arange(n)] = 1.0  # scatter class rows back in place
        msgs.append(ad.matmul(Tensor(sel), m_cls))
    if not msgs:
        m = Tensor(np.zeros((n_rows, d), dtype=np.float32))
    elif len(msgs) == 1:
        m = msgs[0]
    else:
        m = ad.add(msgs[0], msgs[1])

    gate_in = ad.concat([m, htilde, ad.add(m, ad.neg(htilde))], axis=1)
    beta = ad.sigmoid(ad.matmul(gate_in, lp["w5"]))
    z = ad.add(ad.mul(beta, htilde),
               ad.mul(ad.add(Tensor(np.float32(1.0)), ad.neg(beta)), m))
    h_res = ad.add(z, h)

    ffn_in = ad.layer_norm(h_res, lp["ln2.g"], lp["ln2.b"])
    hidden = ad.gelu(ad.add(ad.matmul(ffn_in, lp["W6"]), lp["b6"]))
    ffn = ad.add(ad.matmul(hidden, lp["W7"]), lp["b7"])
    return ad.add(ffn, h_res)


def _edge_embedding(graph: DecodingGraph, params: QwpParams) -> Tensor:
    t = params.tensors
    raw = graph.raw_edge_features
    dist_idx = np.rint(raw[:, 0]).astype(np.int64)
    e_dist = ad.gather_rows(t["edge.dist"], dist_idx)
    g1 = ad.relu(ad.add(ad.matmul(Tensor(raw[:, 1:4]), t["edge.geo.W1"]),
                        t["edge.geo.b1"]))
    g2 = ad.add(ad.matmul(g1, t["edge.geo.W2"]), t["edge.geo.b2"])
    e_geo = ad.layer_norm(g2, t["edge.geo.ln.g"], t["edge.geo.ln.b"])
    return ad.concat([e_dist, e_geo], axis=1)


def _encoder_layer(x: Tensor, lp: dict[str, Tensor], n_heads: int) -> Tensor:
    dt = lp["Wq"].shape[0]
    dh = dt // n_heads
    xn = ad.layer_norm(x, lp["ln1.g"], lp["ln1.b"])
    q = ad.add(ad.matmul(xn, lp["Wq"]), lp["bq"])
    k = ad.add(ad.matmul(xn, lp["Wk"]), lp["bk"])
    v = ad.add(ad.matmul(xn, lp["Wv"]), lp["bv"])
    scale = Tensor(np.float32(1.0 / math.sqrt(dh)))
    heads = []
    for i in range(n_heads):
        qs = ad.slice_axis(q, 1, i * dh, (i + 1) * dh)
        ks = ad.slice_axis(k, 1, i * dh, (i + 1) * dh)
        vs = ad.slice_axis(v, 1, i * dh, (i + 1) * dh)
        att = ad.softmax(ad.mul(ad.matmul(qs, ad.transpose(ks)), scale),
                         axis=-1)
        heads.append(ad.matmul(att, vs))
    mh = heads[0] if n_heads == 1 else ad.concat(heads, axis=1)
    x = ad.add(x, ad.add(ad.matmul(mh, lp["Wo"]), lp["bo"]))
    xn2 = ad.layer_norm(x, lp["ln2.g"], lp["ln2.b"])
    hidden = ad.gelu(ad.add(ad.matmul(xn2, lp["W1"]), lp["b1"]))
    return ad.add(x, ad.add(ad.matmul(hidden, lp["W2"]), lp["b2"]))


def predict_edges(graph: DecodingGraph, params: QwpParams) -> Tensor:
    """Probability per directed edge, shape (E, 1), in graph edge order."""
    if len(graph.directed_edges) == 0:
        return Tensor(np.zeros((0, 1), dtype=np.float32))
    h = encode_nodes(graph, params)
    for layer in range(params.config.L_layers):
        h = gnn_layer(h, graph, params.gnn_layer_params(layer))
    e = _edge_embedding(graph, params)
    hi = ad.gather_rows(h, graph.directed_edges[:, 0])
    hj = ad.gather_rows(h, graph.directed_edges[:, 1])
    u = ad.concat([hi, hj, e], axis=1)
    t = params.tensors
    x = ad.layer_norm(u, t["encin.ln.g"], t["encin.ln.b"])
    for layer in range(params.config.L_enc):
        x = _encoder_layer(x, params.enc_layer_params(layer), params.config.K)
    # closing norm of the pre-norm stack, before the scalar head
    x = ad.layer_norm(x, t["encout.ln.g"], t["encout.ln.b"])
    return ad.sigmoid(ad.add(ad.matmul(x, t["head.w"]), t["head.b"]))


def edge_weights(p) -> np.ndarray:
    """Collapse directed probabilities into undirected -ln weights.

    ``p`` follows the graph's directed-edge order, where the two
    directions of an edge are adjacent: (i,j) immediately before (j,i).
    Returns one weight per undirected edge, in pair order.
    """
    p = np.asarray(p, dtype=np.float64).reshape(-1)
    if p.size % 2:
        raise ValueError("directed probabilities come in (i,j),(j,i) pairs")
    merged = np.maximum(p[0::2], p[1::2])
    return -np.log(np.clip(merged, PROB_FLOOR, PROB_CEIL))


def match_with_probs(graph: DecodingGraph, probs) -> Matching:
    """Blossom per matching class over -ln weights.

    Split out of ``decode`` so tests and tooling can inject probabilities
    without running the network.
    """
    return match_with_weights(graph, edge_weights(probs))


def match_with_weights(graph: DecodingGraph, w: np.ndarray) -> Matching:
    """Exact matching from one weight per undirected edge.

    ``w`` aligns with ``graph.directed_edges[0::2]``.  This is the shared
    back half of every decoder; only the weight source differs.
    """
    w = np.asarray(w, dtype=np.float64)
    und_edges = graph.directed_edges[0::2]
    und_class = graph.edge_class[0::2]
    pairs: list[tuple[int, int]] = []
    for cls in (0, 1):
        members = np.asarray(graph.class_nodes(cls), dtype=np.int64)
        if members.size == 0:
            continue
        # class_nodes is ascending (real defects then virtuals), so edge
        # endpoints map to member rows by binary search.
        in_cls = und_class == cls
        e = und_edges[in_cls]
        a = np.searchsorted(members, e[:, 0])
        b = np.searchsorted(members, e[:, 1])
        wm = np.zeros((members.size, members.size))
        wm[a, b] = wm[b, a] = w[in_cls]
        matched = mwpm(MatchGraph(members.size, wm))
        pairs.extend((int(min(members[i], members[j])),
                      int(max(members[i], members[j])))
                     for i, j in matched.pairs)
    return Matching(tuple(sorted(pairs)))


def decode(syndrome: Syndrome, lattice: CodeLattice, params: QwpParams,
           noise_kind: str = DEPOLARIZING) -> Matching:
    """Predict edge weights and run exact matching over them.

    The matching pairs graph node ids: stabilizer indices, plus virtual
    boundary ids >= n_stabs on the rotated code.
    """
    if not syndrome.any():
        return Matching(())
    graph = build_graph(syndrome, lattice, noise_kind,
                        d_pe=params.config.d_pe)
    probs = predict_edges(graph, params).values
    return match_with_probs(graph, probs)
