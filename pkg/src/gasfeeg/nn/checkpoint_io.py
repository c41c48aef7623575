"""Checkpoint file format.

Layout: magic "GASFEEGC" (8 bytes), version byte (1), uint32 little-endian
JSON header length, UTF-8 JSON header, then every weight array in layer
order as little-endian 32-bit floats. The header records layer specs, the
input shape, weight shapes, best epoch, validation accuracy, and seed.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .layers import NnError
from .network import Network, network_from_specs
from .train import Checkpoint

MAGIC = b"GASFEEGC"
VERSION = 1


def save_checkpoint(path, net: Network, ckpt: Checkpoint):
    header = {
        "layers": net.specs(),
        "input_shape": list(net.input_shape),
        "weight_shapes": [list(w.shape) for w in ckpt.weights],
        "epoch": ckpt.epoch,
        "val_accuracy": ckpt.val_accuracy,
        "seed": net.rng_seed,
        "history": ckpt.history,
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(bytes([VERSION]))
        f.write(struct.pack("<I", len(blob)))
        f.write(blob)
        for w in ckpt.weights:
            f.write(np.ascontiguousarray(w, dtype="<f4").tobytes())


def load_checkpoint(path):
    """Returns (network with restored weights, Checkpoint)."""
    with open(path, "rb") as f:
        if f.read(8) != MAGIC:
            raise NnError(f"not a checkpoint file: {path}")
        version = f.read(1)[0]
        if version != VERSION:
            raise NnError(f"unsupported checkpoint version {version}")
        (hlen,) = struct.unpack("<I", f.read(4))
        header = json.loads(f.read(hlen).decode("utf-8"))
        weights = []
        for shape in header["weight_shapes"]:
            count = int(np.prod(shape))
            data = np.frombuffer(f.read(count * 4), dtype="<f4")
            if data.size != count:
                raise NnError("truncated checkpoint weight blob")
            weights.append(data.reshape(shape).astype(np.float64))
    net = network_from_specs(header["layers"], tuple(header["input_shape"]),
                             header["seed"])
    from .layers import get_dtype
    net.set_weights([w.astype(get_dtype()) for w in weights])
    ckpt = Checkpoint([w.copy() for w in weights], header["epoch"],
                      header["val_accuracy"], header.get("history", {}))
    return net, ckpt
