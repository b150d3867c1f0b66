"""Pauli error channels, syndrome extraction, and the logical-failure test.

Errors are tracked as Pauli frames: per-qubit X and Z bits (a Y error sets
both, since Y = iXZ).  This classical bookkeeping is exact for Pauli
channels, so no state amplitudes are simulated.

Randomness comes from the counter-based Philox4x64 generator.  Every shot is
drawn from its own generator keyed by ``(root_seed, stream, shot_index)``
through ``numpy.random.SeedSequence``, which makes any experiment replayable
shot-by-shot regardless of batching or worker layout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import CodeLattice

INDEPENDENT = "independent"
DEPOLARIZING = "depolarizing"


@dataclass
class NoiseModel:
    """Single-qubit Pauli channel applied i.i.d. to every data qubit.

    ``independent`` applies X with probability p and Z with an independent
    probability p.  ``depolarizing`` applies each of X, Y, Z with
    probability p/3.
    """

    kind: str
    p: float

    def __post_init__(self):
        if self.kind not in (INDEPENDENT, DEPOLARIZING):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"error rate must be in [0, 1], got {self.p}")


@dataclass
class PauliFrame:
    """Per-qubit error record: x_bits for bit flips, z_bits for phase flips."""

    x_bits: np.ndarray
    z_bits: np.ndarray

    @classmethod
    def zeros(cls, n_qubits: int) -> "PauliFrame":
        return cls(np.zeros(n_qubits, dtype=np.uint8),
                   np.zeros(n_qubits, dtype=np.uint8))

    def __xor__(self, other: "PauliFrame") -> "PauliFrame":
        return PauliFrame(self.x_bits ^ other.x_bits, self.z_bits ^ other.z_bits)

    def is_zero(self) -> bool:
        return not self.x_bits.any() and not self.z_bits.any()


@dataclass
class Syndrome:
    """Binary stabilizer outcomes; a 1 bit (defect) marks a violated check."""

    bits: np.ndarray

    def defects(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    def any(self) -> bool:
        return bool(self.bits.any())


def shot_rng(seed: int, *path: int) -> np.random.Generator:
    """Philox generator for one named substream of the root seed.

    SeedSequence zero-pads its entropy words, so ``(s,)`` and ``(s, 0)``
    alias.  Stream tags must therefore be nonzero; with that plus one fixed
    path length per stream, distinct paths give independent generators.
    """
    if path and path[0] == 0:
        raise ValueError("stream tag 0 aliases the bare seed; "
                         "tag substreams with nonzero ids")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *path])))


def sample_error(model: NoiseModel, lattice: CodeLattice,
                 rng_seed) -> PauliFrame:
    """Draw one i.i.d. error frame; deterministic given the seed.

    ``rng_seed`` is an int or a tuple naming a substream, e.g.
    ``(root_seed, stream, shot_index)``.
    """
    path = rng_seed if isinstance(rng_seed, tuple) else (rng_seed,)
    rng = shot_rng(*path)
    n = lattice.n_qubits
    p = model.p
    if model.kind == INDEPENDENT:
        x = rng.random(n) < p
        z = rng.random(n) < p
    else:
        u = rng.random(n)
        # [0, p/3) -> X, [p/3, 2p/3) -> Y, [2p/3, p) -> Z
        x = u < 2 * p / 3
        z = (u >= p / 3) & (u < p)
    return PauliFrame(x.astype(np.uint8), z.astype(np.uint8))


def extract_syndrome(frame: PauliFrame, lattice: CodeLattice) -> Syndrome:
    """Measure every stabilizer against the frame.

    X-type checks anticommute with Z error bits, Z-type checks with X error
    bits; each syndrome bit is the parity of the overlaps.
    """
    if frame.x_bits.shape[0] != lattice.n_qubits:
        raise ValueError("frame size does not match lattice")
    sx = (lattice.check_x @ frame.z_bits) & 1
    sz = (lattice.check_z @ frame.x_bits) & 1
    return Syndrome(np.concatenate([sx, sz]).astype(np.uint8))


def is_logical_error(frame: PauliFrame, correction: PauliFrame,
                     lattice: CodeLattice) -> bool:
    """True iff frame XOR correction acts nontrivially on the logical state.

    The residual must have zero syndrome (i.e. the correction must actually
    repair every defect); a residual that anticommutes with any logical
    operator has changed the encoded information.
    """
    residual = frame ^ correction
    if extract_syndrome(residual, lattice).any():
        raise ValueError("correction leaves a nonzero syndrome")
    for op in lattice.logical_ops:
        support = np.fromiter(op.support, dtype=np.int64)
        bits = residual.z_bits if op.pauli_type == "X" else residual.x_bits
        if int(bits[support].sum()) % 2 == 1:
            return True
    return False
