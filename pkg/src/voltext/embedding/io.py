"""Embedding serialization: text interchange format and a binary container."""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from voltext.errors import FormatError, IoError
from voltext.embedding.model import EmbeddingMatrix
from voltext.embedding.subword import SubwordIndex
from voltext.embedding.train import TrainedEmbedding
from voltext.embedding.vocab import Algo, Mode, TrainConfig, Vocabulary

MAGIC = b"VTXE"
VERSION = 1


def save_text(emb: TrainedEmbedding, path: str | Path) -> None:
    """Conventional text format: header "N M", then "token v1 ... vM"."""
    mat = emb.token_matrix()
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"{len(emb.vocab)} {emb.dim}\n")
            for tok, row in zip(emb.vocab.tokens, mat):
                fh.write(tok + " " + " ".join(repr(float(x)) for x in row) + "\n")
    except OSError as exc:
        raise IoError(str(exc)) from None


def load_text(path: str | Path) -> TrainedEmbedding:
    try:
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().split()
            if len(header) != 2:
                raise FormatError("bad text embedding header")
            n, dim = int(header[0]), int(header[1])
            tokens: list[str] = []
            mat = np.empty((n, dim))
            for i in range(n):
                parts = fh.readline().split()
                if len(parts) != dim + 1:
                    raise FormatError(f"row {i}: expected {dim + 1} fields, got {len(parts)}")
                tokens.append(parts[0])
                mat[i] = [float(x) for x in parts[1:]]
    except OSError as exc:
        raise IoError(str(exc)) from None
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    vocab = Vocabulary(tokens=tokens, counts=np.ones(n, dtype=np.int64))
    mats = EmbeddingMatrix(input_vectors=mat, output_vectors=np.zeros_like(mat))
    return TrainedEmbedding(vocab=vocab, mats=mats, cfg=TrainConfig(dim=dim))


def save_binary(emb: TrainedEmbedding, path: str | Path) -> None:
    """Binary container: magic, version, layout block, vocab block, then
    row-major little-endian float32 matrices."""
    cfg = emb.cfg
    is_fasttext = emb.subwords is not None
    try:
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<I", VERSION))
            fh.write(
                struct.pack(
                    "<IIIIIII",
                    len(emb.vocab),
                    emb.dim,
                    emb.mats.input_vectors.shape[0],
                    1 if is_fasttext else 0,
                    cfg.ngram_min,
                    cfg.ngram_max,
                    cfg.subword_buckets if is_fasttext else 0,
                )
            )
            fh.write(struct.pack("<B", 1 if cfg.mode is Mode.CBOW else 0))
            for tok, cnt in zip(emb.vocab.tokens, emb.vocab.counts):
                raw = tok.encode("utf-8")
                fh.write(struct.pack("<Hq", len(raw), int(cnt)))
                fh.write(raw)
            fh.write(np.ascontiguousarray(emb.mats.input_vectors, dtype="<f4").tobytes())
            fh.write(np.ascontiguousarray(emb.mats.output_vectors, dtype="<f4").tobytes())
    except OSError as exc:
        raise IoError(str(exc)) from None


def load_binary(path: str | Path) -> TrainedEmbedding:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise IoError(str(exc)) from None
    try:
        if data[:4] != MAGIC:
            raise FormatError("bad magic bytes")
        (version,) = struct.unpack_from("<I", data, 4)
        if version != VERSION:
            raise FormatError(f"unsupported version {version}")
        n, dim, n_input_rows, is_fasttext, ngram_min, ngram_max, buckets = struct.unpack_from("<IIIIIII", data, 8)
        (cbow_flag,) = struct.unpack_from("<B", data, 36)
        off = 37
        tokens: list[str] = []
        counts = np.empty(n, dtype=np.int64)
        for i in range(n):
            tlen, cnt = struct.unpack_from("<Hq", data, off)
            off += 10
            tokens.append(data[off : off + tlen].decode("utf-8"))
            counts[i] = cnt
            off += tlen
        need = (n_input_rows + n) * dim * 4
        if len(data) - off < need:
            raise FormatError("truncated matrix block")
        inp = np.frombuffer(data, dtype="<f4", count=n_input_rows * dim, offset=off).reshape(n_input_rows, dim).copy()
        off += n_input_rows * dim * 4
        out = np.frombuffer(data, dtype="<f4", count=n * dim, offset=off).reshape(n, dim).copy()
    except (struct.error, UnicodeDecodeError, IndexError) as exc:
        raise FormatError(str(exc)) from None

    cfg = TrainConfig(
        mode=Mode.CBOW if cbow_flag else Mode.SKIP_GRAM,
        algo=Algo.FASTTEXT if is_fasttext else Algo.WORD2VEC,
        dim=dim,
        ngram_min=ngram_min,
        ngram_max=ngram_max,
        subword_buckets=buckets if is_fasttext else 2**21,
    )
    vocab = Vocabulary(tokens=tokens, counts=counts)
    subwords = SubwordIndex.build(vocab, ngram_min, ngram_max, buckets) if is_fasttext else None
    mats = EmbeddingMatrix(input_vectors=inp, output_vectors=out)
    return TrainedEmbedding(vocab=vocab, mats=mats, cfg=cfg, subwords=subwords)


def save_embedding(emb: TrainedEmbedding, path: str | Path, format: str = "binary") -> None:
    if format == "binary":
        save_binary(emb, path)
    elif format == "text":
        save_text(emb, path)
    else:
        raise FormatError(f"unknown embedding format {format!r}")


def load_embedding(path: str | Path, format: str | None = None) -> TrainedEmbedding:
    if format is None:
        with open(path, "rb") as fh:
            format = "binary" if fh.read(4) == MAGIC else "text"
    if format == "binary":
        return load_binary(path)
    if format == "text":
        return load_text(path)
    raise FormatError(f"unknown embedding format {format!r}")
