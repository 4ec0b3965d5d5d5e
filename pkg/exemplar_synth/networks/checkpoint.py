"""Binary checkpoint layout.

All integers are little-endian::

    magic        4 bytes   b"EXSY"
    version      u32       FORMAT_VERSION
    hash_len     u32
    config_hash  hash_len bytes, UTF-8
    iteration    u64
    seed         i64
    n_records    u32
    n_records times:
        name_len  u32
        name      name_len bytes, UTF-8
        ndim      u32
        dims      ndim × u32
        data      prod(dims) × float32, row major

Network parameters are stored as `<net>.<param>` (`G.encoder.0.weight`), Adam
moments as `opt.<net>.<param>.exp_avg` / `.exp_avg_sq` and step counts as
`opt.<net>.<param>.step` (0-d).
"""

from __future__ import annotations

import dataclasses
import io
import logging
import struct
from collections import OrderedDict
from pathlib import Path
from typing import TYPE_CHECKING, BinaryIO, Dict, Mapping, Tuple

import numpy as np
import torch

from exemplar_synth.exceptions import CheckpointError, ConfigHashMismatchError

if TYPE_CHECKING:
    from exemplar_synth.utils.typing import PathLike

    from .state import NetworkState

logger = logging.getLogger(__name__)

MAGIC = b"EXSY"
FORMAT_VERSION = 1

_ADAM_SLOTS = ("exp_avg", "exp_avg_sq", "step")


@dataclasses.dataclass(frozen=True)
class CheckpointHeader:
    config_hash: str
    iteration: int
    seed: int
    version: int = FORMAT_VERSION


def _read_exact(f: BinaryIO, n: int) -> bytes:
    data = f.read(n)
    if len(data) != n:
        raise CheckpointError("Truncated checkpoint file")
    return data


def _unpack(f: BinaryIO, fmt: str):
    return struct.unpack(fmt, _read_exact(f, struct.calcsize(fmt)))


def write_records(
    path: PathLike,
    records: Mapping[str, torch.Tensor],
    header: CheckpointHeader,
):
    """Write named float32 tensors and a header in the checkpoint layout."""
    buf = io.BytesIO()
    hash_bytes = header.config_hash.encode("utf-8")
    buf.write(MAGIC)
    buf.write(struct.pack("<II", header.version, len(hash_bytes)))
    buf.write(hash_bytes)
    buf.write(struct.pack("<QqI", header.iteration, header.seed, len(records)))

    for name, tensor in records.items():
        array = tensor.detach().cpu().to(torch.float32).contiguous().numpy()
        name_bytes = name.encode("utf-8")
        buf.write(struct.pack("<I", len(name_bytes)))
        buf.write(name_bytes)
        buf.write(struct.pack(f"<I{array.ndim}I", array.ndim, *array.shape))
        buf.write(array.astype("<f4", copy=False).tobytes(order="C"))

    path = Path(path)
    tmp = path.with_name(f"{path.name}.tmp")
    tmp.write_bytes(buf.getvalue())
    tmp.replace(path)


def read_records(path: PathLike) -> Tuple[CheckpointHeader, Dict[str, torch.Tensor]]:
    """Read back what `write_records` wrote."""
    path = Path(path)
    if not path.is_file():
        raise CheckpointError(f"Checkpoint {path} does not exist")

    with path.open("rb") as f:
        if _read_exact(f, 4) != MAGIC:
            raise CheckpointError(f"{path} is not a checkpoint file (bad magic)")
        version, hash_len = _unpack(f, "<II")
        if version != FORMAT_VERSION:
            raise CheckpointError(f"{path}: unsupported checkpoint version {version}")
        config_hash = _read_exact(f, hash_len).decode("utf-8")
        iteration, seed, n_records = _unpack(f, "<QqI")

        records: Dict[str, torch.Tensor] = OrderedDict()
        for _ in range(n_records):
            (name_len,) = _unpack(f, "<I")
            name = _read_exact(f, name_len).decode("utf-8")
            (ndim,) = _unpack(f, "<I")
            dims = _unpack(f, f"<{ndim}I")
            count = int(np.prod(dims, dtype=np.int64))
            array = np.frombuffer(_read_exact(f, 4 * count), dtype="<f4")
            records[name] = torch.from_numpy(array.astype(np.float32).reshape(dims))

        if f.read(1):
            raise CheckpointError(f"{path}: trailing bytes after {n_records} records")

    return CheckpointHeader(config_hash, iteration, seed, version), records


def _state_records(state: NetworkState) -> Dict[str, torch.Tensor]:
    records: Dict[str, torch.Tensor] = {}
    for net_name, net in state.networks().items():
        for name, tensor in net.state_dict().items():
            records[f"{net_name}.{name}"] = tensor

    for net_name, optimizer in state.optimizers().items():
        net = state.networks()[net_name]
        for name, param in net.named_parameters():
            slots = optimizer.state.get(param)
            if not slots:
                continue
            for slot in _ADAM_SLOTS:
                value = slots[slot]
                if not isinstance(value, torch.Tensor):
                    value = torch.tensor(float(value))
                records[f"opt.{net_name}.{name}.{slot}"] = value

    return records


def save_checkpoint(state: NetworkState, path: PathLike) -> Path:
    path = Path(path)
    write_records(
        path,
        _state_records(state),
        CheckpointHeader(state.config_hash, state.iteration, state.seed),
    )
    logger.info("Saved checkpoint at iteration %d to %s", state.iteration, path)
    return path


def load_checkpoint(state: NetworkState, path: PathLike) -> NetworkState:
    """Restore parameters, Adam moments, iteration and seed into `state`.

    `state` must have been built from a config hashing to the checkpoint's hash.
    """
    header, records = read_records(path)
    if header.config_hash != state.config_hash:
        raise ConfigHashMismatchError(header.config_hash, state.config_hash)

    device = state.device
    with torch.no_grad():
        for net_name, net in state.networks().items():
            prefix = f"{net_name}."
            expected = net.state_dict()
            tensors = {k[len(prefix) :]: v for k, v in records.items() if k.startswith(prefix)}
            if set(tensors) != set(expected):
                missing = sorted(set(expected) - set(tensors))
                raise CheckpointError(
                    f"{path}: records for {net_name} do not match the network "
                    f"(missing: {', '.join(missing[:5]) or 'none'})",
                )
            for name, tensor in tensors.items():
                if tensor.shape != expected[name].shape:
                    raise CheckpointError(
                        f"{path}: {prefix}{name} has shape {tuple(tensor.shape)}, "
                        f"expected {tuple(expected[name].shape)}",
                    )
            net.load_state_dict(tensors)

    for net_name, optimizer in state.optimizers().items():
        optimizer.state.clear()
        for name, param in state.networks()[net_name].named_parameters():
            key = f"opt.{net_name}.{name}"
            if f"{key}.exp_avg" not in records:
                continue
            optimizer.state[param] = {
                "step": records[f"{key}.step"].clone(),
                "exp_avg": records[f"{key}.exp_avg"].to(device),
                "exp_avg_sq": records[f"{key}.exp_avg_sq"].to(device),
            }

    state.iteration = header.iteration
    state.seed = header.seed
    logger.info("Loaded checkpoint at iteration %d from %s", state.iteration, path)
    return state
