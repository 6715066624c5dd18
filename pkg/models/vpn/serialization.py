"""Byte format of a trained VPN.

    magic   b"NLINV1\\0"
    header  D, N blocks, K                        (u32 LE each)
    params  f64 LE, model.parameters() order:     per block: rotation v, rotation b,
            coupling W1 b1 W2 b2 W3 b3 W4 b4 (weights row-major, torch (out, in) layout);
            then the final rotation v, b
    digest  SHA-256 of everything above

The coupling hidden width is not stored; it is the unique width that matches
the parameter count.
"""
import hashlib
import math
import struct
from typing import Tuple

import numpy as np
import torch

from constants.constants_value import MODEL_MAGIC
from entities.entity_exception import DataFormatError
from models.vpn.modeling_vpn import VpnModel

_HEADER = struct.Struct("<III")
_DIGEST_SIZE = hashlib.sha256().digest_size


def serialize(model: VpnModel, k: int) -> bytes:
    params = [p.detach().cpu().numpy().astype("<f8").ravel() for p in model.parameters()]
    payload = MODEL_MAGIC + _HEADER.pack(model.dim, model.n_blocks, k)
    payload += np.concatenate(params).tobytes() if params else b""
    return payload + hashlib.sha256(payload).digest()


def _parameter_count(dim: int, n_blocks: int, hidden: int) -> int:
    split_a = math.ceil(dim / 2)
    width_b = dim - split_a
    rotation = dim * (dim - 1) // 2 + dim
    coupling = (width_b * hidden + hidden) + 2 * (hidden * hidden + hidden) + (hidden * split_a + split_a)
    return (n_blocks + 1) * rotation + n_blocks * coupling


def _infer_hidden_width(dim: int, n_blocks: int, n_params: int) -> int:
    width_b = dim - math.ceil(dim / 2)
    if n_blocks == 0:
        return width_b
    # coupling count is 2h^2 + (width_b + split_a + 3)h + split_a per block
    split_a = math.ceil(dim / 2)
    per_block = (n_params - (n_blocks + 1) * (dim * (dim - 1) // 2 + dim)) / n_blocks - split_a
    b = width_b + split_a + 3
    root = (-b + math.sqrt(b * b + 8 * max(per_block, 0.0))) / 4
    hidden = int(round(root))
    if hidden < 1 or _parameter_count(dim, n_blocks, hidden) != n_params:
        raise DataFormatError(
            f"{n_params} parameters do not match any coupling width for D={dim}, N={n_blocks}")
    return hidden


def deserialize(data: bytes) -> Tuple[VpnModel, int]:
    minimum = len(MODEL_MAGIC) + _HEADER.size + _DIGEST_SIZE
    if len(data) < len(MODEL_MAGIC) or data[:len(MODEL_MAGIC)] != MODEL_MAGIC:
        raise DataFormatError(f"Bad model magic: expected {MODEL_MAGIC!r}, got {bytes(data[:len(MODEL_MAGIC)])!r}")
    if len(data) < minimum:
        raise DataFormatError(f"Truncated model file: {len(data)} bytes, need at least {minimum}")

    payload, digest = data[:-_DIGEST_SIZE], data[-_DIGEST_SIZE:]
    if hashlib.sha256(payload).digest() != digest:
        raise DataFormatError("Model checksum mismatch (truncated or corrupted file)")

    dim, n_blocks, k = _HEADER.unpack_from(payload, len(MODEL_MAGIC))
    body = payload[len(MODEL_MAGIC) + _HEADER.size:]
    if len(body) % 8 != 0:
        raise DataFormatError(f"Parameter block of {len(body)} bytes is not a whole number of f64")
    if dim < 2:
        raise DataFormatError(f"Model dimension {dim} is below the minimum of 2")
    values = np.frombuffer(body, dtype="<f8")
    hidden = _infer_hidden_width(dim, n_blocks, values.size)

    model = VpnModel(dim, n_blocks, hidden_width=hidden)
    offset = 0
    with torch.no_grad():
        for param in model.parameters():
            count = param.numel()
            param.copy_(torch.from_numpy(values[offset:offset + count].astype(np.float64)).view_as(param))
            offset += count
    return model, k


def model_hash(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()
