"""Cosine and Euclidean distances over fused style vectors.

Both metrics accept StyleVector instances or plain array-likes (handy in
tests).  Sparse and dense blocks combine without ever materializing the
concatenated vector, and accumulation runs in ascending index order so
results are bit-reproducible and symmetric.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ConfigError, ZeroVectorError
from .features import StyleVector

COSINE = "cosine"
EUCLIDEAN = "euclidean"
METRICS = (COSINE, EUCLIDEAN)


def _sparse_dot(ix: np.ndarray, vx: np.ndarray, iy: np.ndarray, vy: np.ndarray) -> float:
    common, ax, ay = np.intersect1d(ix, iy, assume_unique=True, return_indices=True)
    if common.size == 0:
        return 0.0
    return float(np.dot(vx[ax], vy[ay]))


def _sparse_sq_dist(ix: np.ndarray, vx: np.ndarray, iy: np.ndarray, vy: np.ndarray) -> float:
    union = np.union1d(ix, iy)
    ax = np.zeros(union.size)
    ay = np.zeros(union.size)
    ax[np.searchsorted(union, ix)] = vx
    ay[np.searchsorted(union, iy)] = vy
    diff = ax - ay
    return float(np.dot(diff, diff))


def _dot(x, y) -> float:
    if isinstance(x, StyleVector) and isinstance(y, StyleVector):
        return (_sparse_dot(x.tfidf_indices, x.tfidf_values, y.tfidf_indices, y.tfidf_values)
                + float(np.dot(x.embedding, y.embedding)))
    return float(np.dot(np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64)))


def _sq_norm(x) -> float:
    if isinstance(x, StyleVector):
        return x.sq_norm
    arr = np.asarray(x, dtype=np.float64)
    return float(np.dot(arr, arr))


def cosine_distance(x, y) -> float:
    """1 - x.y / (||x|| ||y||); raises zero-vector on a zero-norm argument."""
    nx = _sq_norm(x)
    ny = _sq_norm(y)
    if nx == 0.0 or ny == 0.0:
        raise ZeroVectorError("cosine distance is undefined for zero vectors")
    return 1.0 - _dot(x, y) / math.sqrt(nx * ny)


def euclidean_distance(x, y) -> float:
    """||x - y||_2; zero vectors permitted."""
    if isinstance(x, StyleVector) and isinstance(y, StyleVector):
        sq = _sparse_sq_dist(x.tfidf_indices, x.tfidf_values, y.tfidf_indices, y.tfidf_values)
        diff = x.embedding - y.embedding
        return math.sqrt(sq + float(np.dot(diff, diff)))
    diff = np.asarray(x, dtype=np.float64) - np.asarray(y, dtype=np.float64)
    return math.sqrt(float(np.dot(diff, diff)))


def distance(x, y, metric: str = COSINE) -> float:
    if metric == COSINE:
        return cosine_distance(x, y)
    if metric == EUCLIDEAN:
        return euclidean_distance(x, y)
    raise ConfigError(f"unknown metric {metric!r}; expected one of {METRICS}")
