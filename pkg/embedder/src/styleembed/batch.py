"""Manifest-to-interchange batch embedding.

Reads the embed manifest (JSONL of {"id", "text"}), encodes every request,
and writes the interchange file consumed by the verification toolkit:
one {"id", "dim", "vec"} record per request, ids verbatim, order preserved,
floats at full round-trip precision.
"""

from __future__ import annotations

import json
from pathlib import Path

from .encoder import DIM, make_encoder


class ManifestError(ValueError):
    """Malformed or inconsistent manifest input."""


def read_manifest(path: str | Path) -> list[tuple[str, str]]:
    requests: list[tuple[str, str]] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                rec_id, text = rec["id"], rec["text"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ManifestError(f"{path}:{lineno}: bad manifest record: {exc}")
            if not isinstance(rec_id, str) or not rec_id:
                raise ManifestError(f"{path}:{lineno}: id must be a nonempty string")
            if rec_id in seen:
                raise ManifestError(f"{path}:{lineno}: duplicate id {rec_id!r}")
            seen.add(rec_id)
            requests.append((rec_id, text))
    return requests


def embed_batch(manifest_path: str | Path, out_path: str | Path,
                model_name: str, max_tokens: int = 256) -> int:
    """Encode every manifest request; returns the number of records written."""
    requests = read_manifest(manifest_path)
    encoder = make_encoder(model_name, max_tokens=max_tokens)
    with open(out_path, "w", encoding="utf-8") as out:
        for rec_id, text in requests:
            vec = encoder.encode(rec_id, text)
            record = {"id": rec_id, "dim": DIM, "vec": [float(v) for v in vec]}
            out.write(json.dumps(record) + "\n")
    return len(requests)
