"""Supervised QWP training: composite BCE + entropy loss, Adam, cosine decay.

Labeled shots are generated on the fly: each batch samples a physical error
rate from ``p_range``, draws errors, labels them with the exact ground-truth
matcher, and fits the predicted directed-edge probabilities against the
matched pairs.  Ground-truth timeouts are counted in the metrics log and the
affected shots are dropped; training never aborts on them.

Batching note: shots are forwarded separately and their probability vectors
concatenated before the pooled-mean loss.  Attention already never crosses
shots this way, which is exactly the block-diagonal batching a single fused
forward would use.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor
from .bench import STREAM_DATA, STREAM_INIT, histogram_rows_from_counts
from .bench import write_histogram_csv
from .graph import build_graph
from .ground_truth import GroundTruthTimeout, generate_shot
from .lattice import CodeLattice
from .noise import DEPOLARIZING, INDEPENDENT, NoiseModel, shot_rng
from .qwp import (PROB_CEIL, PROB_FLOOR, QwpConfig, QwpParams, predict_edges)

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8

# Error-rate sampling intervals matching the tested ranges per noise model.
DEFAULT_P_RANGE = {
    DEPOLARIZING: (0.05, 0.17),
    INDEPENDENT: (0.03, 0.12),
}

METRICS_HEADER = ("epoch", "loss", "bce", "entropy", "edge_acc",
                  "gt_timeouts", "lr")
HIST_BINS = 20


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 32
    lr_init: float = 9e-5
    lr_min: float = 1e-5
    batches_per_epoch: int = 500
    epochs: int = 200
    entropy_weight: float = 0.01
    p_range: tuple[float, float] | None = None  # per-noise default when None
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1 or self.batches_per_epoch < 1 or self.epochs < 1:
            raise ValueError("batch/epoch counts must be >= 1")
        if self.entropy_weight < 0:
            raise ValueError(f"entropy weight must be >= 0, "
                             f"got {self.entropy_weight}")
        if self.lr_min > self.lr_init:
            raise ValueError(f"lr_min {self.lr_min} > lr_init {self.lr_init}")
        if self.p_range is not None:
            object.__setattr__(self, "p_range", tuple(self.p_range))
            lo, hi = self.p_range
            if not 0.0 <= lo <= hi <= 1.0:
                raise ValueError(f"p_range must satisfy 0 <= lo <= hi <= 1, "
                                 f"got {self.p_range}")

    @classmethod
    def from_mapping(cls, mapping) -> "TrainConfig":
        """Build from parsed key=value pairs; unknown keys are errors."""
        names = {f.name for f in fields(cls)}
        unknown = sorted(set(mapping) - names)
        if unknown:
            raise ValueError(f"unknown train config keys: {unknown}")
        kwargs = {}
        for f in fields(cls):
            if f.name not in mapping:
                continue
            raw = str(mapping[f.name])
            if f.name == "p_range":
                kwargs[f.name] = tuple(float(v) for v in raw.split(","))
                if len(kwargs[f.name]) != 2:
                    raise ValueError(f"p_range wants 'lo,hi', got {raw!r}")
            elif f.name in ("batch_size", "batches_per_epoch", "epochs",
                            "seed"):
                kwargs[f.name] = int(raw)
            else:
                kwargs[f.name] = float(raw)
        return cls(**kwargs)

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            if f.name == "p_range":
                value = f"{value[0]},{value[1]}"
            lines.append(f"{f.name}={value}")
        return "\n".join(lines) + "\n"


def resolved_p_range(config: TrainConfig, noise_kind: str) -> tuple[float, float]:
    if config.p_range is not None:
        return config.p_range
    return DEFAULT_P_RANGE[noise_kind]


def _clamp(p: Tensor) -> Tensor:
    """Differentiable clamp into [PROB_FLOOR, PROB_CEIL]."""
    floor = Tensor(np.full_like(p.values, PROB_FLOOR))
    ceil = Tensor(np.full_like(p.values, -PROB_CEIL))
    lo = ad.max_elementwise(p, floor)
    return ad.neg(ad.max_elementwise(ad.neg(lo), ceil))


def _bce_mean(pc: Tensor, q) -> Tensor:
    # mean of -[q ln p + (1-q) ln(1-p)]; pc must already be clamped.
    q = q if isinstance(q, Tensor) else Tensor(np.asarray(q, dtype=np.float32))
    one = Tensor(np.float32(1.0))
    term = ad.add(ad.mul(q, ad.log(pc)),
                  ad.mul(ad.add(one, ad.neg(q)), ad.log(ad.add(one, ad.neg(pc)))))
    return ad.neg(ad.mean(term))


def loss(p, y, lam: float = 0.0) -> Tensor:
    """mean BCE(p, y) + lam * H(p), H the mean binary self-entropy.

    ``p`` is clamped into [1e-7, 1-1e-7] inside the log terms only, so the
    composite decomposes exactly: loss(p,y,lam) = loss(p,y,0) +
    lam*loss(p,p,0).  Gradients flow through both sides of the entropy
    term (the label side of the plain BCE is constant).
    """
    p = p if isinstance(p, Tensor) else Tensor(np.asarray(p, dtype=np.float32))
    y_values = y.values if isinstance(y, Tensor) else np.asarray(y)
    if p.values.size != y_values.size:
        raise ValueError(f"probability/label length mismatch: "
                         f"{p.values.size} vs {y_values.size}")
    pc = _clamp(p)
    q = y if isinstance(y, Tensor) else y_values.astype(np.float32).reshape(
        p.values.shape)
    total = _bce_mean(pc, q)
    if lam != 0.0:
        total = ad.add(total, ad.mul(Tensor(np.float32(lam)),
                                     _bce_mean(pc, p)))
    return total


class AdamState:
    """First/second moment buffers plus the shared step counter."""

    def __init__(self, params):
        tensors = getattr(params, "tensors", params)
        self.step = 0
        self.m = {k: np.zeros_like(t.values) for k, t in tensors.items()}
        self.v = {k: np.zeros_like(t.values) for k, t in tensors.items()}


def adam_step(params, grads, state: AdamState, lr: float) -> None:
    """One bias-corrected Adam update, in place on the parameter tensors.

    ``grads`` maps parameter names to arrays; None (the mapping or an
    entry) falls back to each tensor's accumulated ``.grad``, and a missing
    gradient counts as zero.
    """
    tensors = getattr(params, "tensors", params)
    state.step += 1
    c1 = 1.0 - ADAM_BETA1 ** state.step
    c2 = 1.0 - ADAM_BETA2 ** state.step
    for name, tensor in tensors.items():
        g = grads.get(name) if grads is not None else tensor.grad
        if g is None:
            g = np.zeros_like(tensor.values)
        g = np.asarray(g, dtype=np.float32)
        m, v = state.m[name], state.v[name]
        m *= ADAM_BETA1
        m += (1.0 - ADAM_BETA1) * g
        v *= ADAM_BETA2
        v += (1.0 - ADAM_BETA2) * (g * g)
        update = lr * (m / c1) / (np.sqrt(v / c2) + ADAM_EPS)
        tensor.values -= update.astype(np.float32)


def cosine_lr(step: int, total_steps: int, lr_init: float,
              lr_min: float) -> float:
    """Half-cosine decay from lr_init (step 0) to lr_min (step total)."""
    if not 0 <= step <= total_steps:
        raise ValueError(f"step {step} outside [0, {total_steps}]")
    return lr_min + 0.5 * (lr_init - lr_min) * (
        1.0 + math.cos(math.pi * step / total_steps))


@dataclass
class _Batch:
    probs: Tensor            # concatenated directed-edge probabilities
    labels: np.ndarray       # float32, same length
    timeouts: int            # shots dropped for ground-truth timeouts


def _sample_batch(lattice: CodeLattice, noise_kind: str, p: float,
                  seed_path: tuple[int, ...], batch_size: int,
                  params: QwpParams, budget_s: float) -> _Batch | None:
    model = NoiseModel(noise_kind, p)
    probs: list[Tensor] = []
    labels: list[np.ndarray] = []
    timeouts = 0
    for k in range(batch_size):
        # k+1: the batch's p-draw owns the (..., 0) substream.
        try:
            shot, _ = generate_shot(lattice, model, seed_path + (k + 1,),
                                    budget_s=budget_s)
        except GroundTruthTimeout:
            timeouts += 1
            continue
        graph = shot.graph
        if len(graph.directed_edges) == 0:
            continue
        if graph.d_pe != params.config.d_pe:
            graph = build_graph(shot.syndrome, lattice, noise_kind,
                                d_pe=params.config.d_pe)
        probs.append(predict_edges(graph, params))
        labels.append(shot.labels.astype(np.float32))
    if not probs:
        return None
    return _Batch(ad.concat(probs, axis=0),
                  np.concatenate(labels).reshape(-1, 1), timeouts)


def train(config: TrainConfig, lattice: CodeLattice, noise_kind: str,
          model: QwpConfig | None = None, out_dir=None,
          gt_budget_s: float = 0.1) -> tuple[QwpParams, list[dict]]:
    """Run the full schedule; returns trained params and per-epoch metrics.

    When ``out_dir`` is given, each epoch writes a checkpoint
    (``epoch_NNNN.ckpt``), a probability histogram (``hist_NNNN.csv``), and
    appends to ``metrics.csv``.  The logged lr is the rate of the epoch's
    final step.  Everything is a pure function of (config, lattice,
    noise_kind, model): reruns reproduce the metrics bitwise.
    """
    if noise_kind not in DEFAULT_P_RANGE:
        raise ValueError(f"unknown noise kind {noise_kind!r}")
    model = model if model is not None else QwpConfig()
    p_lo, p_hi = resolved_p_range(config, noise_kind)

    init_seed = int(np.random.SeedSequence(
        [config.seed, STREAM_INIT]).generate_state(1)[0])
    params = QwpParams.init(model, lattice, seed=init_seed)
    state = AdamState(params)
    total_steps = config.epochs * config.batches_per_epoch
    lam = config.entropy_weight

    out_dir = Path(out_dir) if out_dir is not None else None
    metrics_fh = writer = None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        metrics_fh = open(out_dir / "metrics.csv", "w", newline="")
        writer = csv.writer(metrics_fh)
        writer.writerow(METRICS_HEADER)

    metrics: list[dict] = []
    try:
        for epoch in range(1, config.epochs + 1):
            sums = dict(loss=0.0, bce=0.0, entropy=0.0)
            batches_used = 0
            correct = edges = 0
            timeouts = 0
            hist_counts = np.zeros(HIST_BINS, dtype=np.int64)
            lr = config.lr_init
            for b in range(config.batches_per_epoch):
                step = (epoch - 1) * config.batches_per_epoch + b
                lr = cosine_lr(step, total_steps, config.lr_init,
                               config.lr_min)
                p_rng = shot_rng(config.seed, STREAM_DATA, step, 0)
                p = p_lo + (p_hi - p_lo) * p_rng.random()
                batch = _sample_batch(lattice, noise_kind, p,
                                      (config.seed, STREAM_DATA, step),
                                      config.batch_size, params, gt_budget_s)
                if batch is None:
                    continue
                timeouts += batch.timeouts
                bce_t = loss(batch.probs, batch.labels, 0.0)
                ent_t = _bce_mean(_clamp(batch.probs), batch.probs)
                total = (bce_t if lam == 0.0 else
                         ad.add(bce_t, ad.mul(Tensor(np.float32(lam)), ent_t)))
                params.zero_grads()
                ad.backward(total)
                adam_step(params, None, state, lr)

                pv = batch.probs.values.reshape(-1)
                sums["loss"] += float(total.values)
                sums["bce"] += float(bce_t.values)
                sums["entropy"] += float(ent_t.values)
                correct += int(((pv > 0.5) == (batch.labels.reshape(-1) > 0.5)).sum())
                edges += pv.size
                hist_counts += np.histogram(pv, bins=HIST_BINS,
                                            range=(0.0, 1.0))[0]
                batches_used += 1

            denom = max(batches_used, 1)
            row = {
                "epoch": epoch,
                "loss": sums["loss"] / denom,
                "bce": sums["bce"] / denom,
                "entropy": sums["entropy"] / denom,
                "edge_acc": correct / edges if edges else 0.0,
                "gt_timeouts": timeouts,
                "lr": lr,
            }
            metrics.append(row)
            if out_dir is not None:
                writer.writerow([row[k] if k in ("epoch", "gt_timeouts")
                                 else repr(row[k]) for k in METRICS_HEADER])
                metrics_fh.flush()
                params.save(out_dir / f"epoch_{epoch:04d}.ckpt")
                write_histogram_csv(out_dir / f"hist_{epoch:04d}.csv",
                                    histogram_rows_from_counts(hist_counts))
    finally:
        if metrics_fh is not None:
            metrics_fh.close()
    return params, metrics
