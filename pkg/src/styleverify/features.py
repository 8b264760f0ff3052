"""Character n-gram TF-IDF features, embedding ingestion, and fusion.

The vocabulary keeps the ``max_grams`` character 3-5 grams of highest
document frequency (ties broken lexicographically).  A document's TF-IDF
weight for gram g is ``(f(g,d) / |d|) * ln(N / df(g))`` with overlapping
occurrence counts and |d| the segment's total character count.  Dense
384-dim embeddings arrive via a JSONL interchange file; ``fuse`` normalizes
each block to unit L2 and scales the embedding block by alpha, yielding the
concatenated style vector consumed by the distance metrics.
"""

from __future__ import annotations

import hashlib
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .corpus import Segment
from .errors import (
    DuplicateIdError,
    EmptyCorpusError,
    MalformedRecordError,
    NonFiniteInputError,
)

EMBEDDING_DIM = 384
DEFAULT_MAX_GRAMS = 10_000


def iter_ngrams(text: str, n_min: int = 3, n_max: int = 5) -> Iterable[str]:
    """All overlapping character n-grams, n_min..n_max, in order."""
    length = len(text)
    for n in range(n_min, n_max + 1):
        for i in range(length - n + 1):
            yield text[i:i + n]


@dataclass
class NGramVocabulary:
    grams: list[str]
    doc_freq: dict[str, int]
    corpus_size_n: int
    n_min: int = 3
    n_max: int = 5
    lowercase: bool = True
    _index: dict[str, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self._index:
            self._index = {g: i for i, g in enumerate(self.grams)}

    def __len__(self) -> int:
        return len(self.grams)

    def index_of(self, gram: str) -> int | None:
        return self._index.get(gram)

    @property
    def vocab_hash(self) -> str:
        payload = json.dumps(
            {"grams": self.grams, "doc_freq": [self.doc_freq[g] for g in self.grams],
             "N": self.corpus_size_n},
            separators=(",", ":"),
        ).encode()
        return hashlib.sha256(payload).hexdigest()

    def save(self, path: str | Path) -> None:
        payload = {
            "n_min": self.n_min,
            "n_max": self.n_max,
            "N": self.corpus_size_n,
            "grams": self.grams,
            "doc_freq": [self.doc_freq[g] for g in self.grams],
            "lowercase": self.lowercase,
        }
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f, ensure_ascii=False)

    @classmethod
    def load(cls, path: str | Path) -> "NGramVocabulary":
        with open(path, encoding="utf-8") as f:
            payload = json.load(f)
        try:
            grams = payload["grams"]
            freqs = payload["doc_freq"]
            if len(grams) != len(freqs):
                raise MalformedRecordError(f"{path}: grams/doc_freq length mismatch")
            return cls(
                grams=grams,
                doc_freq=dict(zip(grams, freqs)),
                corpus_size_n=payload["N"],
                n_min=payload["n_min"],
                n_max=payload["n_max"],
                lowercase=payload.get("lowercase", True),
            )
        except KeyError as exc:
            raise MalformedRecordError(f"{path}: missing vocabulary field {exc}")


def fit_vocabulary(segments: Iterable[Segment | str],
                   max_grams: int = DEFAULT_MAX_GRAMS,
                   n_min: int = 3, n_max: int = 5,
                   lowercase: bool = True) -> NGramVocabulary:
    """Rank grams by document frequency, ties lexicographic; keep the top."""
    df: Counter[str] = Counter()
    n_docs = 0
    for seg in segments:
        text = seg.text if isinstance(seg, Segment) else seg
        if lowercase:
            text = text.lower()
        n_docs += 1
        df.update(set(iter_ngrams(text, n_min, n_max)))
    if n_docs == 0:
        raise EmptyCorpusError("cannot fit a vocabulary on an empty corpus")
    ranked = sorted(df.items(), key=lambda kv: (-kv[1], kv[0]))[:max_grams]
    grams = [g for g, _ in ranked]
    return NGramVocabulary(
        grams=grams,
        doc_freq={g: c for g, c in ranked},
        corpus_size_n=n_docs,
        n_min=n_min,
        n_max=n_max,
        lowercase=lowercase,
    )


@dataclass
class TfIdfVector:
    """Sparse map vocabulary-index -> weight, plus the |d| it was built from."""

    entries: dict[int, float]
    doc_char_count: int


def vectorize_tfidf(segment: Segment | str, vocab: NGramVocabulary) -> TfIdfVector:
    """TF-IDF weights for every vocabulary gram present in the text.

    Out-of-vocabulary grams are ignored; grams occurring in every fitted
    document get weight 0 through the log term and are dropped from the
    sparse map.
    """
    text = segment.text if isinstance(segment, Segment) else segment
    if vocab.lowercase:
        text = text.lower()
    char_count = len(text)
    counts: Counter[int] = Counter()
    lookup = vocab._index.get  # bound once; this loop dominates batch runs
    length = len(text)
    for n in range(vocab.n_min, vocab.n_max + 1):
        for i in range(length - n + 1):
            idx = lookup(text[i:i + n])
            if idx is not None:
                counts[idx] += 1
    n_corpus = vocab.corpus_size_n
    entries: dict[int, float] = {}
    for idx, freq in counts.items():
        idf = math.log(n_corpus / vocab.doc_freq[vocab.grams[idx]])
        if idf != 0.0:
            entries[idx] = (freq / char_count) * idf
    return TfIdfVector(entries=entries, doc_char_count=char_count)


def load_embeddings(path: str | Path, dim: int = EMBEDDING_DIM) -> dict[str, np.ndarray]:
    """Read the JSONL interchange file: {"id", "dim", "vec"} per record."""
    out: dict[str, np.ndarray] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                rec_id = rec["id"]
                vec = np.asarray(rec["vec"], dtype=np.float64)
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise MalformedRecordError(f"{path}:{lineno}: bad embedding record: {exc}")
            if rec.get("dim") != dim or vec.shape != (dim,):
                raise MalformedRecordError(
                    f"{path}:{lineno}: embedding for {rec_id!r} is not {dim}-dimensional"
                )
            if not np.all(np.isfinite(vec)):
                raise MalformedRecordError(
                    f"{path}:{lineno}: embedding for {rec_id!r} has non-finite values"
                )
            if rec_id in out:
                raise DuplicateIdError(f"{path}:{lineno}: duplicate embedding id {rec_id!r}")
            out[rec_id] = vec
    return out


def write_embeddings(embeddings: Mapping[str, np.ndarray], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for rec_id, vec in embeddings.items():
            rec = {"id": rec_id, "dim": len(vec), "vec": [float(v) for v in vec]}
            f.write(json.dumps(rec) + "\n")


@dataclass
class StyleVector:
    """Fused representation: unit-normalized sparse TF-IDF block plus the
    unit-normalized embedding block scaled by alpha.  Distances treat the
    two blocks as one concatenated vector."""

    tfidf_indices: np.ndarray  # int64, strictly ascending
    tfidf_values: np.ndarray   # float64, aligned with tfidf_indices
    embedding: np.ndarray      # float64, already alpha-scaled
    alpha: float = 1.0

    @property
    def sq_norm(self) -> float:
        return float(np.dot(self.tfidf_values, self.tfidf_values)
                     + np.dot(self.embedding, self.embedding))


def _unit(vec: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(vec))
    return vec / norm if norm > 0.0 else vec


def fuse(tfidf: TfIdfVector, embedding: np.ndarray | None = None,
         alpha: float = 1.0) -> StyleVector:
    """Normalize each block to unit L2 (zero blocks stay zero), scale the
    embedding block by alpha, and pack both into a StyleVector."""
    if alpha < 0 or not math.isfinite(alpha):
        raise NonFiniteInputError(f"alpha must be a finite non-negative real, got {alpha}")
    if embedding is None:
        emb = np.zeros(EMBEDDING_DIM)
    else:
        emb = np.asarray(embedding, dtype=np.float64)
    indices = np.fromiter(sorted(tfidf.entries), dtype=np.int64, count=len(tfidf.entries))
    values = np.array([tfidf.entries[i] for i in indices], dtype=np.float64)
    if not np.all(np.isfinite(values)) or not np.all(np.isfinite(emb)):
        raise NonFiniteInputError("style vector blocks must be finite")
    return StyleVector(
        tfidf_indices=indices,
        tfidf_values=_unit(values),
        embedding=_unit(emb) * alpha,
        alpha=alpha,
    )
