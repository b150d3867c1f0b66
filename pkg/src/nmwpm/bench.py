"""Monte-Carlo benchmark harness: LER curves, threshold crossings, histograms.

The two decoders differ only in their weight source.  Error sampling,
syndrome extraction, the blossom matcher, correction reconstruction, and the
logical-error test are literally the same code paths, so LER gaps between
``mwpm_manhattan`` and ``nmwpm`` isolate the learned weights.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .graph import build_graph
from .ground_truth import correction_from_paths, default_paths
from .lattice import CodeLattice
from .matching import Matching
from .noise import (NoiseModel, Syndrome, extract_syndrome, is_logical_error,
                    sample_error)
from .qwp import (QwpParams, match_with_probs, match_with_weights,
                  predict_edges)

BASELINE_TAG = "mwpm_manhattan"
NEURAL_TAG = "nmwpm"

# Substream tags for the single experiment seed.  Tag 0 would alias the bare
# seed (see noise.shot_rng), so these start at 1.
STREAM_DATA = 1
STREAM_INIT = 2
STREAM_SHOTS = 3

RESULTS_HEADER = ("decoder", "code", "L", "noise", "p", "shots",
                  "failures", "ler", "ci_lo", "ci_hi")
HIST_HEADER = ("bin_lo", "bin_hi", "density")

# 97.5% normal quantile; fixed so intervals are platform-independent.
_Z95 = 1.959963984540054


def wilson_ci(failures: int, shots: int, z: float = _Z95) -> tuple[float, float]:
    """95% Wilson score interval for a binomial rate.

    Always contains the point estimate failures/shots, and behaves sanely at
    the 0 and n extremes where the normal approximation collapses.
    """
    if shots < 1:
        raise ValueError("wilson_ci needs at least one shot")
    if not 0 <= failures <= shots:
        raise ValueError(f"failures {failures} outside [0, {shots}]")
    phat = failures / shots
    z2n = z * z / shots
    center = (phat + z2n / 2) / (1 + z2n)
    half = z * math.sqrt(phat * (1 - phat) / shots + z2n / (4 * shots)) / (1 + z2n)
    # The score interval contains phat exactly; keep that under rounding.
    return min(center - half, phat), max(center + half, phat)


@dataclass(frozen=True)
class BenchResult:
    """One Monte-Carlo point: a decoder on one (code, noise, p) cell."""

    decoder: str
    code: str
    L: int
    noise: str
    p: float
    shots: int
    logical_failures: int

    def __post_init__(self):
        if not 0 <= self.logical_failures <= self.shots:
            raise ValueError("failure count outside [0, shots]")

    @property
    def ler(self) -> float:
        return self.logical_failures / self.shots

    @property
    def wilson_ci(self) -> tuple[float, float]:
        return wilson_ci(self.logical_failures, self.shots)

    def csv_row(self) -> tuple:
        lo, hi = self.wilson_ci
        return (self.decoder, self.code, self.L, self.noise, repr(self.p),
                self.shots, self.logical_failures, repr(self.ler),
                repr(lo), repr(hi))


class BaselineDecoder:
    """Wrapped-Manhattan edge weights + exact blossom.

    The distance column of the decoding graph's raw edge features *is* the
    wrapped Manhattan metric (boundary distance on rotated codes), so the
    baseline consumes the identical graph the neural decoder sees.
    """

    tag = BASELINE_TAG

    def match(self, syndrome: Syndrome, lattice: CodeLattice,
              noise_kind: str) -> Matching:
        if not syndrome.any():
            return Matching(())
        g = build_graph(syndrome, lattice, noise_kind)
        return match_with_weights(g, g.raw_edge_features[0::2, 0])


class NeuralDecoder:
    """QWP-predicted probabilities turned into -ln weights."""

    tag = NEURAL_TAG

    def __init__(self, params: QwpParams):
        self.params = params

    def match(self, syndrome: Syndrome, lattice: CodeLattice,
              noise_kind: str) -> Matching:
        if not syndrome.any():
            return Matching(())
        g = build_graph(syndrome, lattice, noise_kind,
                        d_pe=self.params.config.d_pe)
        return match_with_probs(g, predict_edges(g, self.params).values)


def run_ler(decoder, lattice: CodeLattice, noise: str, p: float, shots: int,
            seed: int, threads: int = 1) -> BenchResult:
    """Monte-Carlo logical error rate of one decoder at one physical rate.

    Shot k draws its error from substream (seed, STREAM_SHOTS, k), so the
    failure count is independent of thread scheduling and of how shots are
    batched across calls.
    """
    if shots < 1:
        raise ValueError("run_ler needs shots >= 1")
    model = NoiseModel(noise, p)

    def one(k: int) -> bool:
        frame = sample_error(model, lattice, (seed, STREAM_SHOTS, k))
        syndrome = extract_syndrome(frame, lattice)
        matching = decoder.match(syndrome, lattice, noise)
        correction = correction_from_paths(
            lattice, default_paths(lattice, matching))
        # is_logical_error raises if the correction leaves any defect.
        return is_logical_error(frame, correction, lattice)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            failures = sum(pool.map(one, range(shots), chunksize=256))
    else:
        failures = sum(one(k) for k in range(shots))
    return BenchResult(decoder.tag, lattice.kind, lattice.L, noise, p,
                       shots, int(failures))


class NoCrossing(Exception):
    """LER curves of different distances never intersect on the grid."""


@dataclass(frozen=True)
class ThresholdEstimate:
    """Crossing report over one decoder's (L, p) grid."""

    p_th: float
    spread: float                   # half-range across distance pairs
    crossings: tuple[float, ...]    # one per adjacent-distance pair
    degenerate_pairs: int           # pairs whose curves coincide exactly


def _pair_crossing(ps: np.ndarray, lo: np.ndarray,
                   hi: np.ndarray) -> float | None:
    """First sign change of log ler_hi - log ler_lo, log-linearly interpolated.

    Returns None when the difference never changes sign.  Inputs must be
    strictly positive (callers floor zero-failure points at half an event).
    """
    diff = np.log(hi) - np.log(lo)
    for k in range(len(ps) - 1):
        d0, d1 = diff[k], diff[k + 1]
        if d0 == 0.0:
            return float(ps[k])
        if d0 * d1 < 0:
            t = d0 / (d0 - d1)
            return float(ps[k] + t * (ps[k + 1] - ps[k]))
    if diff[-1] == 0.0:
        return float(ps[-1])
    return None


def estimate_threshold(results) -> ThresholdEstimate:
    """Crossing estimate from a grid of BenchResults.

    Needs one decoder/code/noise, >= 2 distances, and >= 4 shared p-points.
    Adjacent distances are compared pairwise; curves that coincide exactly
    are counted in ``degenerate_pairs`` rather than contributing a fake
    crossing, and the mean is taken over the genuine crossings only.
    """
    results = list(results)
    tags = {(r.decoder, r.code, r.noise) for r in results}
    if len(tags) != 1:
        raise ValueError(f"threshold grid must be homogeneous, got {sorted(tags)}")

    by_L: dict[int, dict[float, BenchResult]] = {}
    for r in results:
        cell = by_L.setdefault(r.L, {})
        if r.p in cell:
            raise ValueError(f"duplicate grid cell L={r.L} p={r.p}")
        cell[r.p] = r
    if len(by_L) < 2:
        raise ValueError(f"need >= 2 code distances, got {sorted(by_L)}")
    shared = sorted(set.intersection(*(set(c) for c in by_L.values())))
    if len(shared) < 4:
        raise ValueError(f"need >= 4 shared p-points, got {len(shared)}")
    ps = np.array(shared)

    def curve(L: int) -> np.ndarray:
        # Zero-failure points floored at half an event to keep logs finite.
        return np.array([max(by_L[L][p].ler, 0.5 / by_L[L][p].shots)
                         for p in shared])

    crossings: list[float] = []
    degenerate = 0
    dists = sorted(by_L)
    for l1, l2 in zip(dists, dists[1:]):
        a = np.array([by_L[l1][p].ler for p in shared])
        b = np.array([by_L[l2][p].ler for p in shared])
        if np.array_equal(a, b):
            degenerate += 1
            continue
        c = _pair_crossing(ps, curve(l1), curve(l2))
        if c is not None:
            crossings.append(c)
    if not crossings:
        if degenerate:
            raise NoCrossing(
                "distance curves coincide; crossing is ill-defined")
        raise NoCrossing(
            f"no LER crossing for p in [{shared[0]}, {shared[-1]}]")
    mean = float(np.mean(crossings))
    spread = float((max(crossings) - min(crossings)) / 2)
    return ThresholdEstimate(mean, spread, tuple(crossings), degenerate)


def export_histogram(probabilities, bins: int) -> list[tuple[float, float, float]]:
    """Normalized density rows over [0, 1] for the probability histogram.

    Density integrates to 1 (so ``all p=0.5, 10 bins`` puts density 10 in
    one bin); an empty input yields zero rows.
    """
    if bins < 2:
        raise ValueError(f"need >= 2 bins, got {bins}")
    p = np.asarray(probabilities, dtype=np.float64).reshape(-1)
    if p.size == 0:
        return []
    if p.min() < 0.0 or p.max() > 1.0:
        raise ValueError("probabilities outside [0, 1]")
    counts, edges = np.histogram(p, bins=bins, range=(0.0, 1.0))
    density = counts / (p.size * (1.0 / bins))
    return [(float(edges[k]), float(edges[k + 1]), float(density[k]))
            for k in range(bins)]


def histogram_rows_from_counts(counts: np.ndarray
                               ) -> list[tuple[float, float, float]]:
    """Same rows as export_histogram, from pre-binned equal-width counts."""
    counts = np.asarray(counts, dtype=np.float64)
    bins = counts.size
    if bins < 2:
        raise ValueError(f"need >= 2 bins, got {bins}")
    total = counts.sum()
    edges = np.linspace(0.0, 1.0, bins + 1)
    if total == 0:
        return []
    density = counts / (total / bins)
    return [(float(edges[k]), float(edges[k + 1]), float(density[k]))
            for k in range(bins)]


def write_results_csv(path, results) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RESULTS_HEADER)
        for r in results:
            writer.writerow(r.csv_row())


def read_results_csv(path) -> list[BenchResult]:
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != RESULTS_HEADER:
            raise ValueError(f"unexpected results header {reader.fieldnames}")
        for row in reader:
            out.append(BenchResult(row["decoder"], row["code"], int(row["L"]),
                                   row["noise"], float(row["p"]),
                                   int(row["shots"]), int(row["failures"])))
    return out


def write_histogram_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(HIST_HEADER)
        for lo, hi, density in rows:
            writer.writerow((repr(float(lo)), repr(float(hi)),
                             repr(float(density))))
