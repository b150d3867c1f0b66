"""Ground-truth matchings: from a known error to training labels.

The generator reduces a sampled Pauli frame to a matching over its syndrome
defects whose induced correction provably repairs the error without a
logical fault.  Errored qubits connected through shared checks form
clusters; each cluster's odd-parity endpoints are matched locally (isolated
pairs directly, larger clusters by the exact matcher).  If the induced
correction flips a logical operator, alternative matchings are enumerated
cheapest-first within the offending clusters; correction paths may also be
rerouted the long way around the torus (or out the other boundary side),
which changes the homology class without changing the matching.  A timed
exhaustive search is the last resort; shots that exhaust it raise
GroundTruthTimeout and are discarded (and counted) by callers.

Validity is tracked as parity vectors: per matching class, the correction
must cross every logical operator with the same parity as the true error.
This makes the search compositional — each cluster candidate carries a
(cost, parity) signature and a cheapest valid combination is found by
dynamic programming over the parity group.
"""

from __future__ import annotations

import struct
import time
from dataclasses import dataclass
from heapq import heappop, heappush

import numpy as np

from .chains import (apply_chain, rotated_boundary_distance,
                     rotated_boundary_path, rotated_path, toric_path)
from .graph import DecodingGraph, build_graph
from .lattice import ROTATED, TORIC, CodeLattice
from .matching import MatchGraph, Matching, mwpm
from .noise import (NoiseModel, PauliFrame, Syndrome, extract_syndrome,
                    is_logical_error, sample_error)

PERMUTATION_CAP = 50       # alternative matchings per cluster before brute force
DEFAULT_BUDGET_S = 0.1     # wall-clock budget of the brute-force stage


class GroundTruthTimeout(Exception):
    """No valid matching found within the shot's search budget."""


@dataclass(frozen=True)
class ErrorCluster:
    """Connected errored qubits of one error type and their odd checks."""

    tau: str                    # detecting stabilizer type ("X" or "Z")
    qubits: frozenset[int]
    endpoints: tuple[int, ...]  # stabilizer indices with odd overlap


@dataclass(frozen=True)
class PairPath:
    """One correction decision: a defect pair or a boundary exit.

    ``wrap_x``/``wrap_y`` reroute a toric path the long way around that
    axis; ``side`` picks the boundary a rotated defect exits through.
    """

    kind: str   # "pair" | "boundary"
    a: int
    b: int      # partner stabilizer index; -1 for boundary exits
    tau: str
    wrap_x: bool = False
    wrap_y: bool = False
    side: int = -1


@dataclass(frozen=True)
class GroundTruth:
    """A validated labeling: matching, realized paths, and the correction."""

    matching: Matching
    paths: tuple[PairPath, ...]
    correction: PauliFrame
    cost: float


@dataclass(frozen=True)
class LabeledShot:
    """One training example: syndrome, its graph, per-directed-edge labels."""

    syndrome: Syndrome
    graph: DecodingGraph
    labels: np.ndarray  # uint8, one bit per directed edge


# --- clustering ---------------------------------------------------------------


def _class_bits(frame: PauliFrame, tau: str) -> np.ndarray:
    # tau = detecting type: Z checks see X errors, X checks see Z errors.
    return frame.x_bits if tau == "Z" else frame.z_bits


def _check_block(lattice: CodeLattice, tau: str) -> tuple[np.ndarray, int]:
    if tau == "X":
        return lattice.check_x, 0
    return lattice.check_z, lattice.n_x_stabs


def _clusters_of_type(frame: PauliFrame, lattice: CodeLattice,
                      tau: str) -> list[ErrorCluster]:
    bits = _class_bits(frame, tau)
    errored = np.flatnonzero(bits)
    if errored.size == 0:
        return []
    block, offset = _check_block(lattice, tau)

    parent = {int(q): int(q) for q in errored}

    def find(q):
        while parent[q] != q:
            parent[q] = parent[parent[q]]
            q = parent[q]
        return q

    sub = block[:, errored]
    for row in sub:
        members = errored[np.flatnonzero(row)]
        for q in members[1:]:
            ra, rb = find(int(members[0])), find(int(q))
            if ra != rb:
                parent[rb] = ra

    groups: dict[int, list[int]] = {}
    for q in errored:
        groups.setdefault(find(int(q)), []).append(int(q))

    clusters = []
    for qubits in sorted(groups.values()):
        counts = block[:, qubits].sum(axis=1) % 2
        endpoints = tuple(int(s) + offset for s in np.flatnonzero(counts))
        clusters.append(ErrorCluster(tau, frozenset(qubits), endpoints))
    return clusters


def cluster_errors(frame: PauliFrame, lattice: CodeLattice) -> list[ErrorCluster]:
    """Partition errored qubits per error type via shared-check adjacency."""
    out = []
    for tau in ("X", "Z"):
        out.extend(_clusters_of_type(frame, lattice, tau))
    return out


# --- decisions: realized paths, costs, parities -------------------------------


def _boundary_sides(lattice: CodeLattice, d: int, tau: str) -> tuple[int, int, int]:
    c = lattice.stab_coords[d]
    d0 = rotated_boundary_distance(lattice, c, tau, 0)
    d1 = rotated_boundary_distance(lattice, c, tau, 1)
    return (0 if d0 <= d1 else 1), d0, d1


def _boundary_decision(lattice: CodeLattice, d: int, tau: str) -> PairPath:
    side, _, _ = _boundary_sides(lattice, d, tau)
    return PairPath("boundary", d, -1, tau, side=side)


def decision_path(lattice: CodeLattice, pp: PairPath) -> list[int]:
    """The qubit flips realizing one decision."""
    ca = lattice.stab_coords[pp.a]
    if pp.kind == "boundary":
        side = None if pp.side < 0 else pp.side
        return rotated_boundary_path(lattice, ca, pp.tau, side)
    cb = lattice.stab_coords[pp.b]
    if lattice.kind == TORIC:
        return toric_path(lattice, ca, cb, pp.tau, pp.wrap_x, pp.wrap_y)
    return rotated_path(lattice, ca, cb, pp.tau)


def _decision_cost(lattice: CodeLattice, pp: PairPath) -> float:
    if pp.kind == "boundary":
        side = None if pp.side < 0 else pp.side
        return float(rotated_boundary_distance(
            lattice, lattice.stab_coords[pp.a], pp.tau, side))
    if lattice.kind == TORIC:
        dx, dy = lattice.signed_delta(pp.a, pp.b)
        L = lattice.L
        cx = L - abs(dx) if pp.wrap_x else abs(dx)
        cy = L - abs(dy) if pp.wrap_y else abs(dy)
        return float(cx + cy)
    return float(lattice.manhattan(pp.a, pp.b))


def _decision_parity(lattice, pp: PairPath, lops) -> tuple[int, ...]:
    path = set(decision_path(lattice, pp))
    return tuple(len(path & op.support) % 2 for op in lops)


def correction_from_paths(lattice: CodeLattice, paths) -> PauliFrame:
    """Accumulate every decision's qubit flips into one Pauli frame."""
    frame = PauliFrame.zeros(lattice.n_qubits)
    for pp in paths:
        apply_chain(frame, decision_path(lattice, pp), pp.tau)
    return frame


def default_paths(lattice: CodeLattice,
                  matching: Matching) -> tuple[PairPath, ...]:
    """Decoder-side decisions for a matching over graph node ids.

    Pairs of real defects take the canonical wrap-minimal path; a pair with
    one virtual node exits through the real defect's nearest boundary;
    virtual-virtual padding pairs realize nothing.
    """
    n = lattice.n_stabs
    out = []
    for a, b in matching.pairs:
        ra, rb = a < n, b < n
        if not ra and not rb:
            continue
        if ra and rb:
            tau = "X" if a < lattice.n_x_stabs else "Z"
            out.append(PairPath("pair", a, b, tau))
        else:
            d = a if ra else b
            tau = "X" if d < lattice.n_x_stabs else "Z"
            out.append(_boundary_decision(lattice, d, tau))
    return tuple(out)


# --- per-cluster candidate enumeration ----------------------------------------


@dataclass(frozen=True)
class _Cand:
    cost: float
    decisions: tuple[PairPath, ...]
    par: tuple[int, ...]


def _kbest_matchings(w: np.ndarray, cap: int):
    """Perfect matchings of a complete even graph, cheapest first.

    Murty-style partitioning over the exact solver: each popped solution
    spawns subproblems that force a prefix of its pairs and ban the next
    one, which enumerates every matching exactly once in cost order.
    """
    n = w.shape[0]
    if n == 0:
        yield 0.0, ()
        return
    big = float(w.sum()) + 1.0

    def solve(forced, banned):
        used = set()
        for a, b in forced:
            used.update((a, b))
        rest = [v for v in range(n) if v not in used]
        pairs = list(forced)
        if rest:
            pos = {v: k for k, v in enumerate(rest)}
            sub = w[np.ix_(rest, rest)].copy()
            for a, b in banned:
                if a in pos and b in pos:
                    sub[pos[a], pos[b]] = sub[pos[b], pos[a]] = big
            m = mwpm(MatchGraph(len(rest), sub))
            for i, j in m.pairs:
                a, b = rest[i], rest[j]
                if (a, b) in banned:
                    return None  # banned edge forced: subproblem infeasible
                pairs.append((a, b))
        pairs = tuple(sorted(tuple(sorted(p)) for p in pairs))
        cost = float(sum(w[a, b] for a, b in pairs))
        return cost, pairs

    first = solve((), frozenset())
    if first is None:
        return
    count = 0
    heap = [(first[0], 0, (), frozenset(), first[1])]
    serial = 1
    seen = {first[1]}
    while heap and count < cap:
        cost, _, forced, banned, pairs = heappop(heap)
        yield cost, pairs
        count += 1
        free = [p for p in pairs if p not in forced]
        prefix = list(forced)
        for p in free:
            child = solve(tuple(prefix), banned | {p})
            if child is not None and child[1] not in seen:
                seen.add(child[1])
                heappush(heap, (child[0], serial, tuple(prefix),
                                banned | {p}, child[1]))
                serial += 1
            prefix.append(p)


def _local_weights(lattice: CodeLattice, endpoints, tau: str) -> np.ndarray:
    m = len(endpoints)
    if lattice.kind == TORIC:
        w = np.zeros((m, m))
        for i in range(m):
            for j in range(i + 1, m):
                w[i, j] = w[j, i] = lattice.manhattan(endpoints[i], endpoints[j])
        return w
    # Rotated: one virtual slot per endpoint; exits cost the defect's
    # boundary distance, unused slots pair together for free.
    n = 2 * m
    w = np.zeros((n, n))
    for i in range(m):
        bd = rotated_boundary_distance(lattice, lattice.stab_coords[endpoints[i]], tau)
        for j in range(i + 1, m):
            w[i, j] = w[j, i] = lattice.manhattan(endpoints[i], endpoints[j])
        for j in range(m, n):
            w[i, j] = w[j, i] = bd
    return w


def _pairs_to_decisions(lattice, endpoints, tau, pairs) -> tuple[PairPath, ...]:
    m = len(endpoints)
    out = []
    for a, b in pairs:
        if a >= m and b >= m:
            continue
        if a < m and b < m:
            u, v = sorted((endpoints[a], endpoints[b]))
            out.append(PairPath("pair", u, v, tau))
        else:
            out.append(_boundary_decision(lattice, endpoints[min(a, b)], tau))
    return tuple(out)


def _with_variants(lattice, base: tuple[PairPath, ...], lops):
    """The base decision set plus single-decision homology reroutes."""
    variants = [base]
    for t, pp in enumerate(base):
        if pp.kind == "pair" and lattice.kind == TORIC:
            for wx, wy in ((True, False), (False, True), (True, True)):
                alt = PairPath("pair", pp.a, pp.b, pp.tau, wx, wy)
                variants.append(base[:t] + (alt,) + base[t + 1:])
        elif pp.kind == "boundary":
            alt = PairPath("boundary", pp.a, -1, pp.tau, side=1 - pp.side)
            variants.append(base[:t] + (alt,) + base[t + 1:])
    return variants


def _cluster_candidates(lattice, endpoints, tau, lops,
                        cap: int = PERMUTATION_CAP) -> list[_Cand]:
    """Candidate decision sets for one cluster, cheapest first."""
    if not endpoints:
        return [_Cand(0.0, (), tuple(0 for _ in lops))]
    w = _local_weights(lattice, endpoints, tau)
    bases = []
    seen: set[tuple[PairPath, ...]] = set()
    for _cost, pairs in _kbest_matchings(w, cap):
        dec = _pairs_to_decisions(lattice, endpoints, tau, pairs)
        if dec not in seen:
            seen.add(dec)
            bases.append(dec)
    if lattice.kind == ROTATED:
        # Insurance for parity fixes: the cheapest matching that routes each
        # endpoint out through the boundary, if not already enumerated.
        m = len(endpoints)
        for e in range(m):
            forced = ((e, m + e),)
            rest = [v for v in range(2 * m) if v not in (e, m + e)]
            sub = w[np.ix_(rest, rest)]
            mm = mwpm(MatchGraph(len(rest), sub))
            pairs = tuple(sorted(
                [tuple(sorted((rest[i], rest[j]))) for i, j in mm.pairs]
                + [forced[0]]))
            dec = _pairs_to_decisions(lattice, endpoints, tau, pairs)
            if dec not in seen:
                seen.add(dec)
                bases.append(dec)
    cands = []
    emitted: set[tuple[PairPath, ...]] = set()
    for base in bases:
        for dec in _with_variants(lattice, base, lops):
            if dec in emitted:
                continue
            emitted.add(dec)
            cost = float(sum(_decision_cost(lattice, pp) for pp in dec))
            par = tuple(0 for _ in lops)
            for pp in dec:
                par = tuple(p ^ q for p, q in
                            zip(par, _decision_parity(lattice, pp, lops)))
            cands.append(_Cand(cost, dec, par))
    cands.sort(key=lambda c: c.cost)
    return cands


# --- the staged search ---------------------------------------------------------


def _dp_select(pools, target):
    """Cheapest one-candidate-per-pool selection with XOR parity == target."""
    states = {tuple(0 for _ in target): (0.0, [])}
    for pool in pools:
        nxt: dict[tuple[int, ...], tuple[float, list]] = {}
        for par, (cost, sel) in states.items():
            for cand in pool:
                npar = tuple(p ^ q for p, q in zip(par, cand.par))
                ncost = cost + cand.cost
                cur = nxt.get(npar)
                if cur is None or ncost < cur[0]:
                    nxt[npar] = (ncost, sel + [cand])
        states = nxt
    hit = states.get(tuple(target))
    return None if hit is None else hit[1]


def _target_parity(lattice, frame, tau, lops) -> tuple[int, ...]:
    bits = _class_bits(frame, tau)
    return tuple(int(bits[list(op.support)].sum() % 2) for op in lops)


def _brute_force_class(lattice, tau, defects, target, lops,
                       deadline: float) -> list[PairPath]:
    """Timed exhaustive search over pairings (with homology fixes).

    Enumerates every way to pair the class's defects (rotated defects may
    exit through a boundary instead), repairing the parity of each leaf by
    the cheapest single-path reroute available.  Raises GroundTruthTimeout
    at the deadline or if no configuration is valid.
    """
    rotated = lattice.kind == ROTATED
    best: tuple[float, list[PairPath]] | None = None

    def leaf_fix(decisions, cost):
        nonlocal best
        par = tuple(0 for _ in lops)
        for pp in decisions:
            par = tuple(p ^ q for p, q in
                        zip(par, _decision_parity(lattice, pp, lops)))
        delta = tuple(p ^ t for p, t in zip(par, target))
        if not any(delta):
            if best is None or cost < best[0]:
                best = (cost, list(decisions))
            return
        fixes = []
        for t, pp in enumerate(decisions):
            for alt in _with_variants(lattice, (pp,), lops)[1:]:
                dpar = tuple(
                    p ^ q for p, q in zip(_decision_parity(lattice, pp, lops),
                                          _decision_parity(lattice, alt[0], lops)))
                dcost = _decision_cost(lattice, alt[0]) - _decision_cost(lattice, pp)
                fixes.append((dpar, dcost, t, alt[0]))
        # Try single and double reroutes; parity groups here have <= 2 bits.
        for dpar, dcost, t, alt in fixes:
            if dpar == delta:
                total = cost + dcost
                if best is None or total < best[0]:
                    best = (total, [alt if k == t else d
                                    for k, d in enumerate(decisions)])
        for i in range(len(fixes)):
            for j in range(i + 1, len(fixes)):
                p1, c1, t1, a1 = fixes[i]
                p2, c2, t2, a2 = fixes[j]
                if t1 == t2:
                    continue
                if tuple(x ^ y for x, y in zip(p1, p2)) == delta:
                    total = cost + c1 + c2
                    if best is None or total < best[0]:
                        fixed = list(decisions)
                        fixed[t1], fixed[t2] = a1, a2
                        best = (total, fixed)

    def recurse(free, decisions, cost):
        if time.perf_counter() > deadline:
            raise GroundTruthTimeout(
                f"brute-force budget exhausted ({tau} class)")
        if best is not None and cost >= best[0]:
            return
        if not free:
            leaf_fix(decisions, cost)
            return
        d = free[0]
        rest = free[1:]
        for k, e in enumerate(rest):
            u, v = sorted((d, e))
            pp = PairPath("pair", u, v, tau)
            recurse(rest[:k] + rest[k + 1:], decisions + [pp],
                    cost + _decision_cost(lattice, pp))
        if rotated:
            pp = _boundary_decision(lattice, d, tau)
            recurse(rest, decisions + [pp], cost + _decision_cost(lattice, pp))

    recurse(list(defects), [], 0.0)
    if best is None:
        raise GroundTruthTimeout(f"no valid configuration exists ({tau} class)")
    return best[1]


def _solve_class(lattice, frame, tau, deadline) -> list[PairPath]:
    lops = [op for op in lattice.logical_ops if op.pauli_type == tau]
    target = _target_parity(lattice, frame, tau, lops)
    clusters = _clusters_of_type(frame, lattice, tau)
    if not clusters:
        if any(target):
            raise GroundTruthTimeout(
                f"invisible logical error ({tau} class)")
        return []

    firsts = [_cluster_candidates(lattice, c.endpoints, tau, lops, cap=1)[0]
              for c in clusters]
    par = tuple(0 for _ in lops)
    for cand in firsts:
        par = tuple(p ^ q for p, q in zip(par, cand.par))
    if par == target:
        return [pp for cand in firsts for pp in cand.decisions]

    # Offending clusters get their full candidate pool; the rest stay pinned
    # to their minimal matching on the first pass.
    supports = set().union(*(op.support for op in lops))
    offenders = []
    for c, cand in zip(clusters, firsts):
        touched = any(set(decision_path(lattice, pp)) & supports
                      for pp in cand.decisions)
        offenders.append(touched)

    for widen in (False, True):
        pools = []
        for c, cand, off in zip(clusters, firsts, offenders):
            if off or widen:
                pools.append(_cluster_candidates(lattice, c.endpoints, tau, lops))
            else:
                pools.append([cand])
        sel = _dp_select(pools, target)
        if sel is not None:
            return [pp for cand in sel for pp in cand.decisions]

    defects = [e for c in clusters for e in c.endpoints]
    return _brute_force_class(lattice, tau, sorted(defects), target, lops,
                              deadline)


def _virtual_ids(lattice, defects) -> dict[int, int]:
    """Graph-convention virtual node id owned by each real defect."""
    xs = [d for d in defects if d < lattice.n_x_stabs]
    zs = [d for d in defects if d >= lattice.n_x_stabs]
    ids = {}
    nxt = lattice.n_stabs
    for d in xs + zs:
        ids[d] = nxt
        nxt += 1
    return ids


def _matching_from_paths(lattice, paths, defects) -> Matching:
    vids = _virtual_ids(lattice, defects)
    pairs = []
    for pp in paths:
        if pp.kind == "pair":
            pairs.append((min(pp.a, pp.b), max(pp.a, pp.b)))
        else:
            pairs.append((pp.a, vids[pp.a]))
    return Matching(tuple(sorted(pairs)))


def ground_truth_full(frame: PauliFrame, lattice: CodeLattice,
                      budget_s: float = DEFAULT_BUDGET_S) -> GroundTruth:
    """Matching, realized paths, and correction for one known error."""
    deadline = time.perf_counter() + budget_s
    paths: list[PairPath] = []
    for tau in ("X", "Z"):
        paths.extend(_solve_class(lattice, frame, tau, deadline))
    correction = correction_from_paths(lattice, paths)
    syndrome = extract_syndrome(frame, lattice)
    residual_syndrome = extract_syndrome(frame ^ correction, lattice)
    if residual_syndrome.any():
        raise AssertionError("ground-truth correction left a syndrome")
    if is_logical_error(frame, correction, lattice):
        raise AssertionError("ground-truth correction flipped a logical")
    matching = _matching_from_paths(lattice, paths, syndrome.defects())
    cost = float(sum(_decision_cost(lattice, pp) for pp in paths))
    return GroundTruth(matching, tuple(paths), correction, cost)


def ground_truth_matching(frame: PauliFrame, lattice: CodeLattice,
                          budget_s: float = DEFAULT_BUDGET_S) -> Matching:
    """The validated matching alone (see ground_truth_full)."""
    return ground_truth_full(frame, lattice, budget_s).matching


def rotated_virtual_matching(syndrome: Syndrome, lattice: CodeLattice,
                             frame: PauliFrame | None = None) -> Matching:
    """Boundary matching for the rotated code, fewest virtual nodes first.

    For each class, tries v = parity(defects), parity+2, ... virtual slots;
    every slot must be consumed (no virtual-virtual pairing at a given v),
    and with a frame to validate against, the first v whose correction is
    logically valid wins (flipping an exit side when that is all it takes).
    Without a frame there is nothing to validate, so the weight-minimal
    structure is returned: the matcher sees one ignorable virtual slot per
    defect and uses exactly as many exits as the weights justify.
    """
    if lattice.kind != ROTATED:
        raise ValueError("virtual boundary matching applies to the rotated code")
    all_defects = [int(d) for d in syndrome.defects()]
    vids = _virtual_ids(lattice, all_defects)
    pairs: list[tuple[int, int]] = []
    for tau in ("X", "Z"):
        lops = [op for op in lattice.logical_ops if op.pauli_type == tau]
        defects = [d for d in all_defects
                   if (d < lattice.n_x_stabs) == (tau == "X")]
        m = len(defects)
        if m == 0:
            continue
        if frame is None:
            w = _local_weights(lattice, defects, tau)
            matched = mwpm(MatchGraph(2 * m, w))
            for pp in _pairs_to_decisions(lattice, defects, tau, matched.pairs):
                if pp.kind == "pair":
                    pairs.append((min(pp.a, pp.b), max(pp.a, pp.b)))
                else:
                    pairs.append((pp.a, vids[pp.a]))
            continue
        target = _target_parity(lattice, frame, tau, lops)
        solved = None
        for v in range(m % 2, m + 1, 2):
            n = m + v
            w = np.zeros((n, n))
            big = 0.0
            for i in range(m):
                bd = rotated_boundary_distance(
                    lattice, lattice.stab_coords[defects[i]], tau)
                for j in range(i + 1, m):
                    w[i, j] = w[j, i] = lattice.manhattan(defects[i], defects[j])
                for j in range(m, n):
                    w[i, j] = w[j, i] = bd
                big += bd + float(w[i, i + 1:m].sum())
            big += 1.0
            for i in range(m, n):
                for j in range(i + 1, n):
                    w[i, j] = w[j, i] = big  # force every virtual slot in use
            matched = mwpm(MatchGraph(n, w))
            if any(a >= m and b >= m for a, b in matched.pairs):
                continue  # fewer defects than slots want pairing; try next v
            decisions = _pairs_to_decisions(lattice, defects, tau, matched.pairs)
            if target is None:
                solved = decisions
                break
            par = tuple(0 for _ in lops)
            for pp in decisions:
                par = tuple(p ^ q for p, q in
                            zip(par, _decision_parity(lattice, pp, lops)))
            if par == target:
                solved = decisions
                break
            exits = [k for k, pp in enumerate(decisions) if pp.kind == "boundary"]
            if exits:
                flips = []
                for k in exits:
                    pp = decisions[k]
                    alt = PairPath("boundary", pp.a, -1, tau, side=1 - pp.side)
                    dpar = tuple(
                        p ^ q for p, q in
                        zip(_decision_parity(lattice, pp, lops),
                            _decision_parity(lattice, alt, lops)))
                    dcost = (_decision_cost(lattice, alt)
                             - _decision_cost(lattice, pp))
                    if tuple(p ^ d for p, d in zip(par, dpar)) == target:
                        flips.append((dcost, k, alt))
                if flips:
                    flips.sort()
                    _, k, alt = flips[0]
                    solved = decisions[:k] + (alt,) + decisions[k + 1:]
                    break
        if solved is None:
            raise GroundTruthTimeout(f"no valid virtual matching ({tau} class)")
        for pp in solved:
            if pp.kind == "pair":
                pairs.append((min(pp.a, pp.b), max(pp.a, pp.b)))
            else:
                pairs.append((pp.a, vids[pp.a]))
    return Matching(tuple(sorted(pairs)))


# --- labels and shot generation ------------------------------------------------


def edge_labels(matching: Matching, graph: DecodingGraph) -> np.ndarray:
    """y bit per directed edge: 1 iff the unordered pair is matched."""
    matched = {frozenset(p) for p in matching.pairs}
    y = np.zeros(len(graph.directed_edges), dtype=np.uint8)
    for k, (i, j) in enumerate(graph.directed_edges):
        if frozenset((int(i), int(j))) in matched:
            y[k] = 1
    return y


def generate_shot(lattice: CodeLattice, model: NoiseModel, seed,
                  budget_s: float = DEFAULT_BUDGET_S
                  ) -> tuple[LabeledShot, GroundTruth]:
    """Sample an error, label it, and build its decoding graph.

    Raises GroundTruthTimeout for shots whose search exhausts the budget;
    callers discard and count those.
    """
    frame = sample_error(model, lattice, seed)
    syndrome = extract_syndrome(frame, lattice)
    gt = ground_truth_full(frame, lattice, budget_s)
    g = build_graph(syndrome, lattice, model.kind)
    return LabeledShot(syndrome, g, edge_labels(gt.matching, g)), gt


# --- dataset persistence --------------------------------------------------------
#
# Binary layout (all little-endian), documented here and in the README:
#   header: 8-byte magic "NMWPMDS1", u8 kind (0 toric / 1 rotated), u16 L,
#           u8 noise (0 independent / 1 depolarizing), f64 p, u32 N
#   record: u64 seed, ceil(N/8) bytes of packed syndrome bits,
#           u32 defect count, u32 defect ids...,
#           u32 pair count, (u32 a, u32 b, u32 flags) per pair
# Pair flags: bit0 wrap_x, bit1 wrap_y, bit2 boundary exit, bit3 exit side.

DATASET_MAGIC = b"NMWPMDS1"

FLAG_WRAP_X = 1
FLAG_WRAP_Y = 2
FLAG_BOUNDARY = 4
FLAG_SIDE = 8


@dataclass(frozen=True)
class ShotRecord:
    """One persisted labeled shot; pairs live in graph node-id space."""

    seed: int
    syndrome_bits: np.ndarray
    defect_ids: tuple[int, ...]
    pairs: tuple[tuple[int, int, int], ...]  # (a, b, flags)


def record_from_ground_truth(seed: int, syndrome: Syndrome,
                             gt: GroundTruth, lattice: CodeLattice) -> ShotRecord:
    vids = _virtual_ids(lattice, syndrome.defects())
    pairs = []
    for pp in gt.paths:
        if pp.kind == "pair":
            flags = (FLAG_WRAP_X if pp.wrap_x else 0) | \
                    (FLAG_WRAP_Y if pp.wrap_y else 0)
            pairs.append((pp.a, pp.b, flags))
        else:
            flags = FLAG_BOUNDARY | (FLAG_SIDE if pp.side == 1 else 0)
            pairs.append((pp.a, vids[pp.a], flags))
    return ShotRecord(int(seed), syndrome.bits.copy(),
                      tuple(int(d) for d in syndrome.defects()),
                      tuple(sorted(pairs)))


def paths_from_record(record: ShotRecord, lattice: CodeLattice) -> tuple[PairPath, ...]:
    """Reconstruct the realized correction decisions of a stored shot."""
    out = []
    for a, b, flags in record.pairs:
        tau = "X" if a < lattice.n_x_stabs else "Z"
        if flags & FLAG_BOUNDARY:
            out.append(PairPath("boundary", a, -1, tau,
                                side=1 if flags & FLAG_SIDE else 0))
        else:
            out.append(PairPath("pair", a, b, tau,
                                bool(flags & FLAG_WRAP_X),
                                bool(flags & FLAG_WRAP_Y)))
    return tuple(out)


_KIND_CODE = {TORIC: 0, ROTATED: 1}
_NOISE_CODE = {"independent": 0, "depolarizing": 1}


def write_dataset(path, lattice: CodeLattice, model: NoiseModel, records) -> int:
    """Stream ShotRecords to disk; returns the number written."""
    n = 0
    with open(path, "wb") as fh:
        fh.write(DATASET_MAGIC)
        fh.write(struct.pack("<BHBdI", _KIND_CODE[lattice.kind], lattice.L,
                             _NOISE_CODE[model.kind], model.p, lattice.n_stabs))
        for rec in records:
            fh.write(struct.pack("<Q", rec.seed))
            fh.write(np.packbits(rec.syndrome_bits).tobytes())
            fh.write(struct.pack("<I", len(rec.defect_ids)))
            if rec.defect_ids:
                fh.write(np.asarray(rec.defect_ids, dtype="<u4").tobytes())
            fh.write(struct.pack("<I", len(rec.pairs)))
            for a, b, flags in rec.pairs:
                fh.write(struct.pack("<III", a, b, flags))
            n += 1
    return n


def read_dataset(path) -> tuple[dict, list[ShotRecord]]:
    """Load a dataset file; returns (metadata, records)."""
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != DATASET_MAGIC:
            raise ValueError(f"bad dataset magic {magic!r}")
        kind_c, L, noise_c, p, n_stabs = struct.unpack("<BHBdI", fh.read(16))
        kinds = {v: k for k, v in _KIND_CODE.items()}
        noises = {v: k for k, v in _NOISE_CODE.items()}
        meta = {"kind": kinds[kind_c], "L": int(L), "noise": noises[noise_c],
                "p": float(p), "n_stabs": int(n_stabs)}
        n_bytes = (n_stabs + 7) // 8
        records = []
        while True:
            head = fh.read(8)
            if not head:
                break
            (seed,) = struct.unpack("<Q", head)
            packed = np.frombuffer(fh.read(n_bytes), dtype=np.uint8)
            bits = np.unpackbits(packed)[:n_stabs]
            (nd,) = struct.unpack("<I", fh.read(4))
            defects = tuple(
                int(x) for x in np.frombuffer(fh.read(4 * nd), dtype="<u4"))
            (npair,) = struct.unpack("<I", fh.read(4))
            pairs = []
            for _ in range(npair):
                a, b, flags = struct.unpack("<III", fh.read(12))
                pairs.append((a, b, flags))
            records.append(ShotRecord(int(seed), bits.astype(np.uint8),
                                      defects, tuple(pairs)))
    return meta, records
