"""Training-free verifier over empirical distance distributions.

Building the verifier just sorts the observed same-author and
different-author distances; nothing is fitted.  A query distance d* is
scored by two binary searches: S = fraction of same-author distances
strictly above d*, D = fraction of different-author distances strictly
below it.  S > D classifies as same-author; ties fall to different-author.
"""

from __future__ import annotations

import hashlib
import json
import math
import warnings
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable

import numpy as np

from .corpus import LABEL_DIFF, LABEL_SAME
from .distance import COSINE, METRICS, distance
from .errors import (
    ConfigError,
    CorruptStoreError,
    MissingLabelClassError,
    NonFiniteInputError,
    VersionMismatchError,
)
from .features import StyleVector

STORE_VERSION = 1


@dataclass
class StoreMeta:
    vocab_hash: str = ""
    alpha: float = 1.0
    build_timestamp: str = ""
    n_same: int = 0
    n_diff: int = 0


@dataclass
class DistanceDistribution:
    same_sorted: np.ndarray
    diff_sorted: np.ndarray
    metric: str = COSINE
    meta: StoreMeta = field(default_factory=StoreMeta)

    def __post_init__(self):
        self.same_sorted = np.asarray(self.same_sorted, dtype=np.float64)
        self.diff_sorted = np.asarray(self.diff_sorted, dtype=np.float64)
        for name, arr in (("same", self.same_sorted), ("diff", self.diff_sorted)):
            if arr.size == 0:
                raise MissingLabelClassError(f"no {name}-label distances provided")
            if not np.all(np.isfinite(arr)) or np.any(arr < 0):
                raise NonFiniteInputError(f"{name} distances must be finite and >= 0")
            if np.any(np.diff(arr) < 0):
                raise CorruptStoreError(f"{name} distances are not sorted ascending")
        self.meta.n_same = int(self.same_sorted.size)
        self.meta.n_diff = int(self.diff_sorted.size)


@dataclass
class Verdict:
    predicted: str  # LABEL_SAME or LABEL_DIFF
    s_prob: float
    d_prob: float
    confidence: float
    distance: float

    def to_dict(self) -> dict:
        return {
            "predicted": self.predicted,
            "s_prob": self.s_prob,
            "d_prob": self.d_prob,
            "confidence": self.confidence,
            "distance": self.distance,
        }


def build_from_distances(same: Iterable[float], diff: Iterable[float],
                         metric: str = COSINE, *, vocab_hash: str = "",
                         alpha: float = 1.0) -> DistanceDistribution:
    """Sort precomputed distances into a queryable store."""
    if metric not in METRICS:
        raise ConfigError(f"unknown metric {metric!r}")
    meta = StoreMeta(vocab_hash=vocab_hash, alpha=alpha,
                     build_timestamp=datetime.now(timezone.utc).isoformat())
    return DistanceDistribution(
        same_sorted=np.sort(np.asarray(list(same), dtype=np.float64)),
        diff_sorted=np.sort(np.asarray(list(diff), dtype=np.float64)),
        metric=metric,
        meta=meta,
    )


def build(pairs: Iterable[tuple[StyleVector, StyleVector, str]],
          metric: str = COSINE, *, vocab_hash: str = "",
          alpha: float = 1.0) -> DistanceDistribution:
    """Compute pair distances and populate the two empirical distributions."""
    same: list[float] = []
    diff: list[float] = []
    for a, b, label in pairs:
        d = distance(a, b, metric)
        if label == LABEL_SAME:
            same.append(d)
        elif label == LABEL_DIFF:
            diff.append(d)
        else:
            raise ConfigError(f"unknown pair label {label!r}")
    return build_from_distances(same, diff, metric, vocab_hash=vocab_hash, alpha=alpha)


def score(dist: DistanceDistribution, d_star: float) -> tuple[float, float]:
    """(S, D) for a query distance, via binary search on the sorted arrays.

    Strict inequalities: a stored distance equal to d* counts toward
    neither probability.
    """
    if not math.isfinite(d_star):
        raise NonFiniteInputError(f"query distance must be finite, got {d_star}")
    n_same = dist.same_sorted.size
    n_diff = dist.diff_sorted.size
    above = n_same - int(np.searchsorted(dist.same_sorted, d_star, side="right"))
    below = int(np.searchsorted(dist.diff_sorted, d_star, side="left"))
    return above / n_same, below / n_diff


def verdict_from_scores(s_prob: float, d_prob: float, d_star: float) -> Verdict:
    top = max(s_prob, d_prob)
    confidence = abs(s_prob - d_prob) / top if top > 0.0 else 0.0
    predicted = LABEL_SAME if s_prob > d_prob else LABEL_DIFF
    return Verdict(predicted=predicted, s_prob=s_prob, d_prob=d_prob,
                   confidence=confidence, distance=d_star)


def classify_distance(dist: DistanceDistribution, d_star: float) -> Verdict:
    s_prob, d_prob = score(dist, d_star)
    return verdict_from_scores(s_prob, d_prob, d_star)


def classify(dist: DistanceDistribution, a: StyleVector, b: StyleVector) -> Verdict:
    return classify_distance(dist, distance(a, b, dist.metric))


def _arrays_checksum(same: np.ndarray, diff: np.ndarray) -> str:
    canonical = json.dumps({"same": list(map(float, same)),
                            "diff": list(map(float, diff))},
                           separators=(",", ":")).encode()
    return hashlib.sha256(canonical).hexdigest()


def save(dist: DistanceDistribution, path: str | Path) -> None:
    envelope = {
        "version": STORE_VERSION,
        "metric": dist.metric,
        "alpha": dist.meta.alpha,
        "vocab_hash": dist.meta.vocab_hash,
        "same": list(map(float, dist.same_sorted)),
        "diff": list(map(float, dist.diff_sorted)),
        "checksum": _arrays_checksum(dist.same_sorted, dist.diff_sorted),
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(envelope, f, separators=(",", ":"))


def load(path: str | Path, expected_vocab_hash: str | None = None) -> DistanceDistribution:
    try:
        with open(path, encoding="utf-8") as f:
            envelope = json.load(f)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise CorruptStoreError(f"{path}: unparseable store: {exc}")
    if not isinstance(envelope, dict) or "version" not in envelope:
        raise CorruptStoreError(f"{path}: not a distance store")
    if envelope["version"] != STORE_VERSION:
        raise VersionMismatchError(
            f"{path}: store version {envelope['version']} != supported {STORE_VERSION}"
        )
    try:
        same = np.asarray(envelope["same"], dtype=np.float64)
        diff = np.asarray(envelope["diff"], dtype=np.float64)
        metric = envelope["metric"]
        alpha = float(envelope["alpha"])
        vocab_hash = envelope["vocab_hash"]
        checksum = envelope["checksum"]
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptStoreError(f"{path}: malformed store field: {exc}")
    if checksum != _arrays_checksum(same, diff):
        raise CorruptStoreError(f"{path}: checksum mismatch; store is corrupt or truncated")
    if expected_vocab_hash is not None and vocab_hash and vocab_hash != expected_vocab_hash:
        warnings.warn(
            f"{path}: store was built with vocabulary {vocab_hash[:12]}..., "
            f"but the active vocabulary hashes to {expected_vocab_hash[:12]}...",
            stacklevel=2,
        )
    return DistanceDistribution(
        same_sorted=same,
        diff_sorted=diff,
        metric=metric,
        meta=StoreMeta(vocab_hash=vocab_hash, alpha=alpha),
    )
