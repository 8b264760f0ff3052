"""384-dimensional sentence encoders with mean pooling over token vectors.

Two encoders share one contract: deterministic 384-dim vectors, mean-pooled
over per-token representations, inputs truncated at a token limit with the
truncation logged per record.

``hashed-384`` derives each token vector from a keyed blake2b digest, so it
runs anywhere, bit-reproducibly, with no model weights.  ``all-MiniLM-L6-v2``
(or any sentence-transformers name) loads the real 6-layer MiniLM encoder
when the package and weights are available.
"""

from __future__ import annotations

import hashlib
import logging

import numpy as np

log = logging.getLogger("styleembed")

DIM = 384
DEFAULT_MODEL = "all-MiniLM-L6-v2"
HASHED_MODEL = "hashed-384"

_BYTES_PER_BLOCK = 64
_FLOATS_PER_BLOCK = _BYTES_PER_BLOCK // 4
_BLOCKS = DIM // _FLOATS_PER_BLOCK  # 24 blocks of 16 floats


class ModelLoadError(RuntimeError):
    """Requested encoder cannot be constructed (missing package or weights)."""


class HashedEncoder:
    """Deterministic stand-in encoder: token vectors from keyed digests.

    Each whitespace token maps to 384 floats in [-1, 1) expanded from
    blake2b(token, block_index); the sentence vector is the mean over token
    vectors in order.  Useful for offline runs and reproducibility tests;
    not a semantic model.
    """

    name = HASHED_MODEL

    def __init__(self, max_tokens: int = 256):
        self.max_tokens = max_tokens
        self._cache: dict[str, np.ndarray] = {}

    def _token_vector(self, token: str) -> np.ndarray:
        cached = self._cache.get(token)
        if cached is not None:
            return cached
        raw = bytearray()
        data = token.encode("utf-8")
        for block in range(_BLOCKS):
            digest = hashlib.blake2b(
                data + block.to_bytes(2, "big"),
                digest_size=_BYTES_PER_BLOCK,
                key=b"styleembed.hashed-384",
            ).digest()
            raw.extend(digest)
        u32 = np.frombuffer(bytes(raw), dtype=">u4").astype(np.float64)
        vec = u32 / 2 ** 31 - 1.0
        self._cache[token] = vec
        return vec

    def encode(self, rec_id: str, text: str) -> np.ndarray:
        tokens = text.lower().split()
        if not tokens:
            return np.zeros(DIM)
        if len(tokens) > self.max_tokens:
            log.warning("truncating %s: %d tokens -> %d", rec_id, len(tokens),
                        self.max_tokens)
            tokens = tokens[: self.max_tokens]
        total = np.zeros(DIM)
        for tok in tokens:
            total += self._token_vector(tok)
        return total / len(tokens)


class SentenceTransformerEncoder:
    """Real transformer encoder via sentence-transformers (mean pooling)."""

    def __init__(self, model_name: str = DEFAULT_MODEL):
        self.name = model_name
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as exc:
            raise ModelLoadError(f"sentence-transformers is not installed: {exc}")
        try:
            self._model = SentenceTransformer(model_name)
        except Exception as exc:  # weights missing, bad name, no network
            raise ModelLoadError(f"cannot load encoder {model_name!r}: {exc}")
        probe = self._model.encode(["dimension probe"], convert_to_numpy=True)
        if probe.shape[1] != DIM:
            raise ModelLoadError(
                f"encoder {model_name!r} yields {probe.shape[1]}-dim vectors, "
                f"need {DIM}"
            )
        self.max_tokens = int(getattr(self._model, "max_seq_length", 256))

    def encode(self, rec_id: str, text: str) -> np.ndarray:
        tokenizer = getattr(self._model, "tokenizer", None)
        if tokenizer is not None:
            n_tokens = len(tokenizer(text, truncation=False)["input_ids"])
            if n_tokens > self.max_tokens:
                log.warning("truncating %s: %d tokens -> %d", rec_id, n_tokens,
                            self.max_tokens)
        vec = self._model.encode([text], convert_to_numpy=True,
                                 normalize_embeddings=False)[0]
        return np.asarray(vec, dtype=np.float64)


def make_encoder(model_name: str = DEFAULT_MODEL, max_tokens: int = 256):
    if model_name == HASHED_MODEL:
        return HashedEncoder(max_tokens=max_tokens)
    return SentenceTransformerEncoder(model_name)
