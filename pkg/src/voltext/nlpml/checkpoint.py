"""Versioned binary checkpoints for the CNN forecaster."""

from __future__ import annotations

import json
import struct
from dataclasses import asdict
from pathlib import Path

import numpy as np

from voltext.errors import FormatError, IoError
from voltext.nlpml.model import AdamHyper, CnnConfig, NlpModelParams

MAGIC = b"VTCK"
VERSION = 1


def save_checkpoint(params: NlpModelParams, cfg: CnnConfig, path: str | Path) -> None:
    """Config block (JSON) followed by named little-endian float32 tensors."""
    cfg_json = json.dumps(asdict(cfg)).encode("utf-8")
    try:
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<II", VERSION, len(cfg_json)))
            fh.write(cfg_json)
            fh.write(struct.pack("<II", params.dim, len(params.arrays)))
            for name, arr in params.arrays.items():
                raw = name.encode("utf-8")
                fh.write(struct.pack("<H", len(raw)))
                fh.write(raw)
                fh.write(struct.pack("<B", arr.ndim))
                fh.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
                fh.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())
    except OSError as exc:
        raise IoError(str(exc)) from None


def load_checkpoint(path: str | Path) -> tuple[NlpModelParams, CnnConfig]:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise IoError(str(exc)) from None
    try:
        if data[:4] != MAGIC:
            raise FormatError("bad checkpoint magic")
        version, cfg_len = struct.unpack_from("<II", data, 4)
        if version != VERSION:
            raise FormatError(f"unsupported checkpoint version {version}")
        off = 12
        cfg_dict = json.loads(data[off : off + cfg_len].decode("utf-8"))
        off += cfg_len
        cfg_dict["filter_widths"] = tuple(cfg_dict["filter_widths"])
        cfg_dict["adam"] = AdamHyper(**cfg_dict["adam"])
        cfg = CnnConfig(**cfg_dict)
        dim, n_tensors = struct.unpack_from("<II", data, off)
        off += 8
        arrays: dict[str, np.ndarray] = {}
        for _ in range(n_tensors):
            (nlen,) = struct.unpack_from("<H", data, off)
            off += 2
            name = data[off : off + nlen].decode("utf-8")
            off += nlen
            (ndim,) = struct.unpack_from("<B", data, off)
            off += 1
            shape = struct.unpack_from(f"<{ndim}I", data, off)
            off += 4 * ndim
            count = int(np.prod(shape)) if ndim else 1
            arr = np.frombuffer(data, dtype="<f4", count=count, offset=off).reshape(shape).astype(float)
            off += count * 4
            arrays[name] = arr if ndim else arr.reshape(())
    except (struct.error, json.JSONDecodeError, UnicodeDecodeError, IndexError, ValueError) as exc:
        raise FormatError(str(exc)) from None
    return NlpModelParams(arrays, cfg.filter_widths, dim), cfg
