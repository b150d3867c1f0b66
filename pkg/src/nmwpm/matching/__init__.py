"""Minimum-weight perfect matching on dense weighted graphs.

The solver is the O(n^3) blossom algorithm in ``_pure``; if the compiled
extension ``_core`` was built it is used instead (same algorithm, typed).
Set ``NMWPM_PURE_PYTHON=1`` to force the pure-Python path, e.g. to compare
the two backends. ``BACKEND`` names the one in use.

Minimization is reduced to maximization by flipping weights against
(max_w + 1): on a complete even graph the flipped weights are strictly
positive, so the maximum-cardinality maximum-weight matching is exactly the
minimum-weight perfect matching of the original.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import _pure

if os.environ.get("NMWPM_PURE_PYTHON"):
    _impl = _pure
    BACKEND = "pure"
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
        BACKEND = "cython"
    except ImportError:
        _impl = _pure
        BACKEND = "pure"

BRUTE_FORCE_MAX = 14


@dataclass(frozen=True)
class MatchGraph:
    """Complete graph on an even number of vertices with symmetric
    nonnegative weights; the diagonal is ignored."""

    n_vertices: int
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        object.__setattr__(self, "weights", w)
        n = self.n_vertices
        if w.shape != (n, n):
            raise ValueError(f"weight matrix must be {n}x{n}, got {w.shape}")
        if np.isnan(w).any():
            raise ValueError("NaN edge weight")
        off = ~np.eye(n, dtype=bool)
        if n and not np.isfinite(w[off]).all():
            raise ValueError("edge weights must be finite")
        if n and (w[off] < 0).any():
            raise ValueError("edge weights must be nonnegative")
        if not np.array_equal(w, w.T):
            raise ValueError("weight matrix must be symmetric")


@dataclass(frozen=True)
class Matching:
    """A perfect matching: vertex-disjoint pairs covering every vertex."""

    pairs: tuple[tuple[int, int], ...]

    @classmethod
    def from_mate(cls, mate: list[int]) -> "Matching":
        pairs = sorted((v, m) for v, m in enumerate(mate) if 0 <= v < m)
        return cls(tuple(pairs))

    def partner(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for a, b in self.pairs:
            out[a] = b
            out[b] = a
        return out

    def total_weight(self, graph: MatchGraph) -> float:
        # Summed in sorted pair order so equal pair sets give identical
        # floating point totals.
        return math.fsum(graph.weights[a, b] for a, b in self.pairs)


def _check_perfect(matching: Matching, n: int) -> bool:
    seen: set[int] = set()
    for a, b in matching.pairs:
        if a == b or a in seen or b in seen:
            return False
        seen.update((a, b))
    return len(seen) == n


def mwpm(graph: MatchGraph) -> Matching:
    """Exact minimum-weight perfect matching of a complete even graph."""
    n = graph.n_vertices
    if n % 2:
        raise ValueError(f"perfect matching needs an even vertex count, got {n}")
    if n == 0:
        return Matching(())
    w = graph.weights
    flip = float(w.max()) + 1.0
    iu, ju = np.triu_indices(n, k=1)
    wts = flip - w[iu, ju]
    mate = _impl.solve(n, iu.tolist(), ju.tolist(), wts.tolist(),
                       maxcardinality=True)
    matching = Matching.from_mate(mate)
    assert _check_perfect(matching, n)
    return matching


def brute_force_mwpm(graph: MatchGraph) -> Matching:
    """Exhaustive minimum over all (n-1)!! perfect matchings.

    Independent of the blossom code on purpose — this is its test oracle.
    Ties break toward the lexicographically smallest pair list, which is the
    first one reached by always pairing the lowest free vertex with the
    lowest available partner.
    """
    n = graph.n_vertices
    if n % 2:
        raise ValueError(f"perfect matching needs an even vertex count, got {n}")
    if n > BRUTE_FORCE_MAX:
        raise ValueError(f"brute force capped at {BRUTE_FORCE_MAX} vertices, got {n}")
    if n == 0:
        return Matching(())
    w = graph.weights
    free = list(range(n))
    best_pairs: list[tuple[int, int]] | None = None
    best_total = math.inf
    stack: list[tuple[int, int]] = []

    def rec(total: float) -> None:
        nonlocal best_pairs, best_total
        if not free:
            if total < best_total:
                best_total = total
                best_pairs = list(stack)
            return
        a = free[0]
        for idx in range(1, len(free)):
            b = free[idx]
            t = total + w[a, b]
            if t >= best_total:
                continue
            free.pop(idx)
            free.pop(0)
            stack.append((a, b))
            rec(t)
            stack.pop()
            free.insert(0, a)
            free.insert(idx, b)

    rec(0.0)
    assert best_pairs is not None
    return Matching(tuple(best_pairs))
