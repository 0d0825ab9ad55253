"""Binary model file: magic "LKN1", little-endian layer records, raw float64 params.

Layout:
    magic   4 bytes  b"LKN1"
    version u32      1
    nlayers u32
    per layer: kind u8, then kind-specific fields (all u32 unless noted)
        conv(0):     out_c, in_c, kh, kw, sh, sw
        dense(1):    out_units, in_units
        elu(2), flatten(4), identity(5): no fields
        dropout(3):  keep_prob f64
    parameters: for each conv/dense layer in order, w then b, raw '<f8' C-order
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from ..errors import ModelFormatError
from .layers import ELU, Conv2D, Dense, Dropout, Flatten, Identity
from .network import Network

MAGIC = b"LKN1"
VERSION = 1

_KIND_CODES = {"conv": 0, "dense": 1, "elu": 2, "dropout": 3, "flatten": 4, "identity": 5}


def save_network(net: Network, path) -> None:
    out = [MAGIC, struct.pack("<II", VERSION, len(net.layers))]
    for layer in net.layers:
        spec = layer.spec
        code = _KIND_CODES[spec.kind]
        if spec.kind == "conv":
            out.append(
                struct.pack(
                    "<B6I",
                    code,
                    spec.out_channels,
                    spec.in_channels,
                    spec.kernel[0],
                    spec.kernel[1],
                    spec.stride[0],
                    spec.stride[1],
                )
            )
        elif spec.kind == "dense":
            out.append(struct.pack("<B2I", code, spec.out_units, spec.in_units))
        elif spec.kind == "dropout":
            out.append(struct.pack("<Bd", code, spec.keep_prob))
        else:
            out.append(struct.pack("<B", code))
    for p in net.parameters():
        out.append(np.ascontiguousarray(p, dtype="<f8").tobytes())
    Path(path).write_bytes(b"".join(out))


def _read(f, n: int) -> bytes:
    buf = f.read(n)
    if len(buf) != n:
        raise ModelFormatError("truncated model file")
    return buf


def load_network(path) -> Network:
    with open(path, "rb") as f:
        if _read(f, 4) != MAGIC:
            raise ModelFormatError(f"{path}: bad magic (want {MAGIC!r})")
        version, nlayers = struct.unpack("<II", _read(f, 8))
        if version != VERSION:
            raise ModelFormatError(f"{path}: unsupported version {version}")
        layers = []
        for _ in range(nlayers):
            (code,) = struct.unpack("<B", _read(f, 1))
            if code == 0:
                out_c, in_c, kh, kw, sh, sw = struct.unpack("<6I", _read(f, 24))
                layers.append(Conv2D(in_c, out_c, (kh, kw), (sh, sw)))
            elif code == 1:
                out_u, in_u = struct.unpack("<2I", _read(f, 8))
                layers.append(Dense(in_u, out_u))
            elif code == 2:
                layers.append(ELU())
            elif code == 3:
                (keep,) = struct.unpack("<d", _read(f, 8))
                layers.append(Dropout(keep))
            elif code == 4:
                layers.append(Flatten())
            elif code == 5:
                layers.append(Identity())
            else:
                raise ModelFormatError(f"{path}: unknown layer kind {code}")
        net = Network(layers)
        for p in net.parameters():
            raw = _read(f, p.size * 8)
            p[...] = np.frombuffer(raw, dtype="<f8").reshape(p.shape)
        if f.read(1):
            raise ModelFormatError(f"{path}: trailing bytes after parameters")
    return net
