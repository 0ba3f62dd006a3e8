"""Self-describing binary checkpoint container.

Layout (all integers little-endian):

    bytes 0-3   magic b"HFCK"
    u32         format version (currently 1)
    u32         header length in bytes
    header      UTF-8 JSON: {"config": {...}, "iteration": int, "extra": {...}}
    u32         record count
    record * n  u16 name length, UTF-8 name,
                u8 ndim, ndim x u32 dims,
                prod(dims) x f32 data

Model parameters use their canonical names ('conv1.weight',
'flow.upconv3.bias', ...); optimizer state rides along under an 'opt.'
prefix so a checkpoint can restore training bit-exactly.
"""

from __future__ import annotations

import json
import struct
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import CheckpointIOError, FormatVersionMismatchError
from .config import NetworkConfig
from .model import ENCODER, FLOW_DECODER, FRAME_DECODER, ParameterSet

CHECKPOINT_MAGIC = b"HFCK"
CHECKPOINT_VERSION = 1

_OPT_PREFIX = "opt."


@dataclass(frozen=True)
class CheckpointData:
    """Everything a checkpoint holds."""

    params: ParameterSet
    config: NetworkConfig
    iteration: int
    optimizer: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)


def _group_for(name: str) -> str:
    if name.startswith("flow."):
        return FLOW_DECODER
    if name.startswith("frame."):
        return FRAME_DECODER
    return ENCODER


def _pack_record(name: str, array: np.ndarray) -> bytes:
    data = np.ascontiguousarray(array, dtype="<f4")
    encoded = name.encode("utf-8")
    parts = [struct.pack("<H", len(encoded)), encoded,
             struct.pack("<B", data.ndim)]
    parts.extend(struct.pack("<I", d) for d in data.shape)
    parts.append(data.tobytes())
    return b"".join(parts)


class _Reader:
    def __init__(self, blob: bytes):
        self._blob = blob
        self._pos = 0

    def take(self, n: int) -> bytes:
        if self._pos + n > len(self._blob):
            raise CheckpointIOError("checkpoint file is truncated")
        out = self._blob[self._pos:self._pos + n]
        self._pos += n
        return out

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    @property
    def exhausted(self) -> bool:
        return self._pos == len(self._blob)


def save_checkpoint(params: ParameterSet, config: NetworkConfig,
                    iteration: int, path, optimizer: dict = None,
                    extra: dict = None) -> None:
    """Write a checkpoint atomically (temp file + rename)."""
    header = json.dumps({
        "config": config.to_dict(),
        "iteration": int(iteration),
        "extra": extra or {},
    }, sort_keys=True).encode("utf-8")
    records = list(params.arrays.items())
    records.extend((f"{_OPT_PREFIX}{k}", v)
                   for k, v in sorted((optimizer or {}).items()))
    parts = [CHECKPOINT_MAGIC,
             struct.pack("<I", CHECKPOINT_VERSION),
             struct.pack("<I", len(header)), header,
             struct.pack("<I", len(records))]
    parts.extend(_pack_record(name, arr) for name, arr in records)
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_bytes(b"".join(parts))
        tmp.replace(path)
    except OSError as exc:
        raise CheckpointIOError(f"cannot write checkpoint {path}: {exc}") from exc


def load_checkpoint_full(path) -> CheckpointData:
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as exc:
        raise CheckpointIOError(f"cannot read checkpoint {path}: {exc}") from exc
    reader = _Reader(blob)
    if reader.take(4) != CHECKPOINT_MAGIC:
        raise CheckpointIOError(f"{path} is not a checkpoint file")
    (version,) = reader.unpack("<I")
    if version != CHECKPOINT_VERSION:
        raise FormatVersionMismatchError(
            f"checkpoint version {version} unsupported "
            f"(expected {CHECKPOINT_VERSION})")
    (header_len,) = reader.unpack("<I")
    try:
        header = json.loads(reader.take(header_len).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointIOError(f"checkpoint header is corrupt: {exc}") from exc
    (count,) = reader.unpack("<I")
    arrays = OrderedDict()
    optimizer = {}
    for _ in range(count):
        (name_len,) = reader.unpack("<H")
        name = reader.take(name_len).decode("utf-8")
        (ndim,) = reader.unpack("<B")
        shape = tuple(reader.unpack(f"<{ndim}I")) if ndim else ()
        size = int(np.prod(shape, dtype=np.int64)) if shape else 1
        data = np.frombuffer(reader.take(size * 4), dtype="<f4").reshape(shape)
        if name.startswith(_OPT_PREFIX):
            optimizer[name[len(_OPT_PREFIX):]] = data.copy()
        else:
            arrays[name] = data.copy()
    if not reader.exhausted:
        raise CheckpointIOError("checkpoint has trailing bytes")
    groups = {name.rsplit(".", 1)[0]: _group_for(name) for name in arrays}
    return CheckpointData(
        params=ParameterSet(arrays=arrays, groups=groups),
        config=NetworkConfig.from_dict(header["config"]),
        iteration=int(header["iteration"]),
        optimizer=optimizer,
        extra=header.get("extra", {}),
    )


def load_checkpoint(path) -> tuple[ParameterSet, NetworkConfig, int]:
    data = load_checkpoint_full(path)
    return data.params, data.config, data.iteration
