"""Embedding sidecar for the styleverify pipeline."""

from .batch import embed_batch, read_manifest
from .encoder import DIM, HashedEncoder, ModelLoadError, SentenceTransformerEncoder

__version__ = "0.1.0"
