"""Flat binary checkpoints for named float32 arrays.

Byte layout (little-endian throughout):

    magic   8 bytes  "NMWPMCK1"
    version u16      currently 1
    count   u32      number of arrays
    entry[count]:
        name_len u16, name UTF-8 bytes,
        ndim     u8,  dims u32 * ndim
    payload[count]: row-major float32, in manifest order

The manifest-then-payload split means another implementation can map the
file with two passes and no framing ambiguity.
"""

from __future__ import annotations

import struct

import numpy as np

MAGIC = b"NMWPMCK1"
VERSION = 1


def save_checkpoint(path, arrays: dict[str, np.ndarray]) -> None:
    """Write named arrays; iteration order of the dict is preserved."""
    items = [(name, np.ascontiguousarray(a, dtype="<f4"))
             for name, a in arrays.items()]
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<HI", VERSION, len(items)))
        for name, a in items:
            raw = name.encode("utf-8")
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
            fh.write(struct.pack("<B", a.ndim))
            fh.write(struct.pack(f"<{a.ndim}I", *a.shape))
        for _, a in items:
            fh.write(a.tobytes())


def load_checkpoint(path) -> dict[str, np.ndarray]:
    """Read a checkpoint back into {name: float32 array}."""
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != MAGIC:
            raise ValueError(f"bad checkpoint magic {magic!r}")
        version, count = struct.unpack("<HI", fh.read(6))
        if version != VERSION:
            raise ValueError(f"unsupported checkpoint version {version}")
        manifest = []
        for _ in range(count):
            (name_len,) = struct.unpack("<H", fh.read(2))
            name = fh.read(name_len).decode("utf-8")
            (ndim,) = struct.unpack("<B", fh.read(1))
            shape = struct.unpack(f"<{ndim}I", fh.read(4 * ndim))
            manifest.append((name, shape))
        out = {}
        for name, shape in manifest:
            n = int(np.prod(shape, dtype=np.int64)) if shape else 1
            buf = fh.read(4 * n)
            if len(buf) != 4 * n:
                raise ValueError(f"truncated payload for {name!r}")
            out[name] = np.frombuffer(buf, dtype="<f4").reshape(shape).copy()
        if fh.read(1):
            raise ValueError("trailing bytes after last payload")
    return out
