"""Embedding quality tools: analogies, similarity benchmarks, neighbors, PCA."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import stats

from voltext.errors import MalformedBenchmark, TooFewPairs
from voltext.embedding.train import TrainedEmbedding


def _unit(v: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(v, axis=-1, keepdims=True)
    return np.divide(v, norm, out=np.zeros_like(v, dtype=float), where=norm > 0)


def _unit_matrix(emb: TrainedEmbedding) -> np.ndarray:
    return _unit(emb.token_matrix().astype(float))


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return 0.0
    return float(a @ b / (na * nb))


def analogy(
    a: str,
    b: str,
    c: str,
    emb: TrainedEmbedding,
    exclude_inputs: bool = True,
    top_n: int = 10,
) -> list[tuple[str, float]]:
    """Rank vocabulary tokens by cosine to unit(b) - unit(a) + unit(c).

    The classic "a is to b as c is to ?" query; inputs are excluded from the
    ranking when ``exclude_inputs`` is set.
    """
    va, vb, vc = (_unit(emb.vector(t).astype(float)) for t in (a, b, c))
    query = vb - va + vc
    sims = _unit_matrix(emb) @ _unit(query)
    order = np.argsort(-sims, kind="stable")
    exclude = {emb.vocab.index[t] for t in (a, b, c) if t in emb.vocab} if exclude_inputs else set()
    out = []
    for i in order:
        if int(i) in exclude:
            continue
        out.append((emb.vocab.tokens[int(i)], float(sims[i])))
        if len(out) >= top_n:
            break
    return out


@dataclass
class AnalogyReport:
    section_accuracy: dict[str, float | None]  # None = every question skipped
    section_counts: dict[str, tuple[int, int, int]]  # (correct, answered, skipped)
    overall_accuracy: float | None
    total_skipped: int


def parse_analogy_file(path: str | Path) -> dict[str, list[tuple[str, str, str, str]]]:
    """Parse the standard analogy benchmark (`: section` headers, 4 tokens/line)."""
    sections: dict[str, list[tuple[str, str, str, str]]] = {}
    current = "default"
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith(":"):
                current = line[1:].strip()
                sections.setdefault(current, [])
                continue
            parts = line.lower().split()
            if len(parts) != 4:
                raise MalformedBenchmark(f"line {lineno}: expected 4 tokens, got {len(parts)}")
            sections.setdefault(current, []).append(tuple(parts))  # type: ignore[arg-type]
    return sections


def evaluate_analogy_suite(path: str | Path, emb: TrainedEmbedding) -> AnalogyReport:
    """Top-1 accuracy per section; questions with any OOV token are skipped."""
    sections = parse_analogy_file(path)
    sec_acc: dict[str, float | None] = {}
    sec_counts: dict[str, tuple[int, int, int]] = {}
    total_correct = total_answered = total_skipped = 0
    for name, questions in sections.items():
        correct = answered = skipped = 0
        for qa, qb, qc, expected in questions:
            if not all(t in emb.vocab for t in (qa, qb, qc, expected)):
                skipped += 1
                continue
            top = analogy(qa, qb, qc, emb, exclude_inputs=True, top_n=1)
            answered += 1
            if top and top[0][0] == expected:
                correct += 1
        sec_counts[name] = (correct, answered, skipped)
        sec_acc[name] = correct / answered if answered else None
        total_correct += correct
        total_answered += answered
        total_skipped += skipped
    overall = total_correct / total_answered if total_answered else None
    return AnalogyReport(sec_acc, sec_counts, overall, total_skipped)


def evaluate_similarity(path: str | Path, emb: TrainedEmbedding) -> float:
    """Spearman rank correlation between cosine similarities and human scores.

    Accepts comma- or tab-separated `token1, token2, score` files; header
    lines that do not parse as a score are ignored.
    """
    pairs: list[tuple[str, str, float]] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in (line.split("\t") if "\t" in line else line.split(","))]
            if len(parts) < 3:
                continue
            try:
                score = float(parts[2])
            except ValueError:
                continue
            pairs.append((parts[0].lower(), parts[1].lower(), score))

    sims, human = [], []
    for t1, t2, score in pairs:
        if emb.resolvable(t1) and emb.resolvable(t2):
            sims.append(cosine(emb.vector(t1).astype(float), emb.vector(t2).astype(float)))
            human.append(score)
    if len(sims) < 2:
        raise TooFewPairs(f"only {len(sims)} resolvable pairs")
    rho, _ = stats.spearmanr(sims, human)
    return float(rho)


def most_similar(token: str, emb: TrainedEmbedding, top_n: int = 10) -> list[tuple[str, float]]:
    """Nearest vocabulary tokens by cosine, the token itself excluded."""
    query = _unit(emb.vector(token).astype(float))
    sims = _unit_matrix(emb) @ query
    order = np.argsort(-sims, kind="stable")
    self_idx = emb.vocab.index.get(token)
    out = []
    for i in order:
        if int(i) == self_idx:
            continue
        out.append((emb.vocab.tokens[int(i)], float(sims[i])))
        if len(out) >= top_n:
            break
    return out


def odd_one_out(tokens: list[str], emb: TrainedEmbedding) -> str:
    """The token with the lowest cosine to the mean of the other tokens."""
    if len(tokens) < 2:
        raise ValueError("need at least 2 tokens")
    vecs = np.stack([emb.vector(t).astype(float) for t in tokens])
    worst_token, worst_sim = tokens[0], np.inf
    for i, tok in enumerate(tokens):
        others = np.delete(vecs, i, axis=0).mean(axis=0)
        sim = cosine(vecs[i], others)
        if sim < worst_sim:
            worst_token, worst_sim = tok, sim
    return worst_token


def pca_project(tokens: list[str], emb: TrainedEmbedding, dims: int = 2) -> np.ndarray:
    """Project token vectors onto the top principal components.

    Deterministic sign convention: each component's largest-magnitude
    coordinate is made positive.
    """
    if len(tokens) < 2:
        raise ValueError("need at least 2 tokens")
    vecs = np.stack([emb.vector(t).astype(float) for t in tokens])
    centered = vecs - vecs.mean(axis=0)
    cov = centered.T @ centered / (len(tokens) - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(-eigvals)[:dims]
    components = eigvecs[:, order]
    for j in range(components.shape[1]):
        k = int(np.argmax(np.abs(components[:, j])))
        if components[k, j] < 0:
            components[:, j] = -components[:, j]
    return centered @ components
