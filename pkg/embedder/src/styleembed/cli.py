"""Sidecar CLI: read an embed manifest, write the embedding interchange file.

Exit codes mirror the verification toolkit: 0 success, 2 config error,
3 data error, 4 model-load failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .batch import ManifestError, embed_batch
from .encoder import DEFAULT_MODEL, ModelLoadError


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="styleembed",
        description="Batch 384-dim mean-pooled sentence embeddings.",
    )
    parser.add_argument("--manifest", required=True, help="JSONL of {id, text}")
    parser.add_argument("--out", required=True, help="interchange JSONL to write")
    parser.add_argument("--model", default=DEFAULT_MODEL,
                        help="encoder name; 'hashed-384' runs without weights")
    parser.add_argument("--max-tokens", type=int, default=256,
                        help="token limit before truncation (logged per record)")
    parser.add_argument("--json", action="store_true", help="machine-readable stdout")
    args = parser.parse_args(argv)

    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(name)s: %(message)s")
    if args.max_tokens < 1:
        print(json.dumps({"error": {"code": "invalid-config",
                                    "message": "--max-tokens must be >= 1"}}),
              file=sys.stderr)
        return 2
    try:
        written = embed_batch(args.manifest, args.out, args.model, args.max_tokens)
    except ModelLoadError as exc:
        print(json.dumps({"error": {"code": "model-load-failure",
                                    "message": str(exc)}}), file=sys.stderr)
        return 4
    except (ManifestError, FileNotFoundError) as exc:
        print(json.dumps({"error": {"code": "malformed-record",
                                    "message": str(exc)}}), file=sys.stderr)
        return 3

    if args.json:
        print(json.dumps({"records": written, "model": args.model,
                          "out": args.out}))
    else:
        print(f"embedded {written} requests with {args.model} -> {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
