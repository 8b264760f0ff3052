"""Command-line pipeline: clean -> pairs -> embed-manifest -> build ->
verify/evaluate -> imitate -> detect -> report.

Every subcommand is idempotent for identical inputs, honors ``--json`` for
machine-readable stdout, and reads defaults from a declarative JSON config
file (flags win).  Exit codes: 0 success, 2 config error, 3 data error,
4 endpoint error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import corpus as corpus_mod
from . import detection, evaluation, features, imitation, verifier
from .corpus import CleaningConfig, RawDocument, Segment
from .errors import ConfigError, DataError, EndpointError, StyleVerifyError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_ENDPOINT = 4


def _emit(payload: dict, args, human: str | None = None) -> None:
    if getattr(args, "json", False) or human is None:
        print(json.dumps(payload))
    else:
        print(human)


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as f:
            cfg = json.load(f)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}")
    if not isinstance(cfg, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return cfg


def _opt(args, cfg: dict, key: str, default=None):
    """Flag value if given, else config-file value, else default."""
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in cfg:
        return cfg[key]
    return default


def _require(args, cfg: dict, key: str):
    value = _opt(args, cfg, key)
    if value is None:
        raise ConfigError(f"missing required option --{key.replace('_', '-')}")
    return value


def _cleaning_config(args, cfg: dict) -> CleaningConfig:
    return CleaningConfig(
        min_words=int(_opt(args, cfg, "min_words", 500)),
        max_numeric_ratio=float(_opt(args, cfg, "max_numeric_ratio", 0.10)),
        max_misspell_ratio=float(_opt(args, cfg, "max_misspell_ratio", 0.05)),
        max_token_type_ratio=float(_opt(args, cfg, "max_token_type_ratio", 0.10)),
        max_symbol_ratio=float(_opt(args, cfg, "max_symbol_ratio", 0.05)),
        wordlist_path=_opt(args, cfg, "wordlist"),
        strip_paratext=not _opt(args, cfg, "no_strip_paratext", False),
    )


def _segments_by_ref(segments: list[Segment]) -> dict[tuple[str, str], Segment]:
    return {(s.doc_id, s.position): s for s in segments}


def _vector_index(pairs, segments, vocab, embeddings, alpha):
    """StyleVector per segment referenced by at least one pair."""
    by_ref = _segments_by_ref(segments)
    vectors = {}
    for pair in pairs:
        for ref in (pair.a, pair.b):
            key = (ref.doc_id, ref.position)
            if key in vectors:
                continue
            if key not in by_ref:
                raise DataError(f"pair references unknown segment {ref.id!r}")
            seg = by_ref[key]
            emb = None
            if alpha > 0.0:
                if embeddings is None or seg.id not in embeddings:
                    raise DataError(
                        f"alpha={alpha} requires an embedding for segment {seg.id!r}"
                    )
                emb = embeddings[seg.id]
            vectors[key] = features.fuse(
                features.vectorize_tfidf(seg, vocab), emb, alpha)
    return vectors


# --- subcommands -------------------------------------------------------------

def cmd_clean(args, cfg: dict) -> int:
    corpus_path = _require(args, cfg, "corpus")
    out_reports = _require(args, cfg, "out_reports")
    out_segments = _require(args, cfg, "out_segments")
    config = _cleaning_config(args, cfg)
    block_words = int(_opt(args, cfg, "block_words", 500))
    docs = corpus_mod.load_corpus(corpus_path)
    reports, cleaned = corpus_mod.clean_corpus(docs, config)

    segments: list[Segment] = []
    skipped_short = 0
    by_id = {d.id: d for d in docs}
    for doc_id, text in cleaned.items():
        src = by_id[doc_id]
        doc = RawDocument(doc_id, text, src.source_domain, src.author_id)
        try:
            head, tail = corpus_mod.segment_document(doc, block_words)
            segments.extend((head, tail))
        except StyleVerifyError:
            skipped_short += 1  # accepted but below 2 * block_words

    corpus_mod.write_reports(reports, out_reports)
    corpus_mod.write_segments(segments, out_segments)
    accepted = sum(r.accepted for r in reports)
    payload = {"documents": len(docs), "accepted": accepted,
               "segmented": accepted - skipped_short, "segments": len(segments)}
    _emit(payload, args,
          f"cleaned {len(docs)} documents: {accepted} accepted, "
          f"{len(segments)} segments written")
    return EXIT_OK


def cmd_pairs(args, cfg: dict) -> int:
    segments_path = _require(args, cfg, "segments")
    seed = int(_require(args, cfg, "seed"))
    n_pos = int(_require(args, cfg, "n_positive"))
    n_neg = int(_require(args, cfg, "n_negative"))
    out_path = _require(args, cfg, "out")
    segments = corpus_mod.read_segments(segments_path)
    authors = None
    corpus_path = _opt(args, cfg, "corpus")
    if corpus_path:
        authors = {d.id: d.author_id for d in corpus_mod.load_corpus(corpus_path)
                   if d.author_id}
    pairs = corpus_mod.build_pairs(segments, n_pos, n_neg, seed, authors)
    corpus_mod.write_pairs(pairs, out_path)
    payload = {"pairs": len(pairs), "positive": n_pos, "negative": n_neg, "seed": seed}
    _emit(payload, args, f"wrote {len(pairs)} pairs ({n_pos} positive, {n_neg} negative)")
    return EXIT_OK


def cmd_embed_manifest(args, cfg: dict) -> int:
    segments = corpus_mod.read_segments(_require(args, cfg, "segments"))
    out = _require(args, cfg, "out")
    corpus_mod.write_jsonl(({"id": s.id, "text": s.text} for s in segments), out)
    _emit({"requests": len(segments)}, args,
          f"wrote embed manifest with {len(segments)} requests")
    return EXIT_OK


def cmd_build(args, cfg: dict) -> int:
    segments_path = _require(args, cfg, "segments")
    pairs_path = _require(args, cfg, "pairs")
    out_store = _require(args, cfg, "out_store")
    alpha = float(_opt(args, cfg, "alpha", 1.0))
    metric = _opt(args, cfg, "metric", "cosine")
    max_grams = int(_opt(args, cfg, "max_grams", features.DEFAULT_MAX_GRAMS))
    emb_path = _opt(args, cfg, "embeddings")
    if not emb_path and alpha > 0.0:
        raise ConfigError("--embeddings is required when alpha > 0")

    segments = corpus_mod.read_segments(segments_path)
    pairs = corpus_mod.read_pairs(pairs_path)
    embeddings = features.load_embeddings(emb_path) if emb_path else None
    vocab = features.fit_vocabulary(segments, max_grams=max_grams)
    vectors = _vector_index(pairs, segments, vocab, embeddings, alpha)
    labeled = ((vectors[(p.a.doc_id, p.a.position)],
                vectors[(p.b.doc_id, p.b.position)], p.label) for p in pairs)
    store = verifier.build(labeled, metric, vocab_hash=vocab.vocab_hash, alpha=alpha)

    verifier.save(store, out_store)
    vocab_out = _opt(args, cfg, "out_vocab")
    if vocab_out:
        vocab.save(vocab_out)
    payload = {"n_same": store.meta.n_same, "n_diff": store.meta.n_diff,
               "metric": metric, "alpha": alpha, "vocab_size": len(vocab)}
    _emit(payload, args,
          f"store built: {store.meta.n_same} same / {store.meta.n_diff} diff "
          f"distances ({metric}, alpha={alpha})")
    return EXIT_OK


def _load_store_and_vocab(args, cfg):
    vocab = features.NGramVocabulary.load(_require(args, cfg, "vocab"))
    store = verifier.load(_require(args, cfg, "store"),
                          expected_vocab_hash=vocab.vocab_hash)
    return store, vocab


def cmd_verify(args, cfg: dict) -> int:
    store, vocab = _load_store_and_vocab(args, cfg)
    emb_path = _opt(args, cfg, "embeddings")
    embeddings = features.load_embeddings(emb_path) if emb_path else None

    a_path = _opt(args, cfg, "a")
    b_path = _opt(args, cfg, "b")
    if a_path and b_path:
        alpha = store.meta.alpha
        if alpha > 0.0 and embeddings is None:
            print("warning: store alpha > 0 but no --embeddings given; "
                  "embedding blocks are zeroed", file=sys.stderr)

        def vec(path: str):
            text = Path(path).read_text(encoding="utf-8")
            emb = None
            if embeddings is not None:
                emb = embeddings.get(Path(path).stem)
            return features.fuse(features.vectorize_tfidf(text, vocab), emb, alpha)

        result = verifier.classify(store, vec(a_path), vec(b_path))
        print(json.dumps(result.to_dict()))
        return EXIT_OK

    pairs_path = _opt(args, cfg, "pairs")
    if not pairs_path:
        raise ConfigError("verify needs either --a/--b or --pairs")
    pairs = corpus_mod.read_pairs(pairs_path)
    segments = corpus_mod.read_segments(_require(args, cfg, "segments"))
    vectors = _vector_index(pairs, segments, vocab, embeddings, store.meta.alpha)
    out_path = _opt(args, cfg, "out")
    lines = []
    for p in pairs:
        v = verifier.classify(store, vectors[(p.a.doc_id, p.a.position)],
                              vectors[(p.b.doc_id, p.b.position)])
        rec = {"a": p.a.id, "b": p.b.id, **v.to_dict()}
        lines.append(rec)
        if not out_path:
            print(json.dumps(rec))
    if out_path:
        corpus_mod.write_jsonl(lines, out_path)
        _emit({"verdicts": len(lines)}, args, f"wrote {len(lines)} verdicts")
    return EXIT_OK


def cmd_evaluate(args, cfg: dict) -> int:
    store, vocab = _load_store_and_vocab(args, cfg)
    pairs = corpus_mod.read_pairs(_require(args, cfg, "pairs"))
    segments = corpus_mod.read_segments(_require(args, cfg, "segments"))
    emb_path = _opt(args, cfg, "embeddings")
    embeddings = features.load_embeddings(emb_path) if emb_path else None
    vectors = _vector_index(pairs, segments, vocab, embeddings, store.meta.alpha)

    verdicts = []
    for p in pairs:
        v = verifier.classify(store, vectors[(p.a.doc_id, p.a.position)],
                              vectors[(p.b.doc_id, p.b.position)])
        verdicts.append((v, p.label))
    report = evaluation.evaluate(verdicts)

    mcnemar_result = None
    compare_path = _opt(args, cfg, "compare")
    if compare_path:
        with open(compare_path, encoding="utf-8") as f:
            other = [json.loads(line)["predicted"] for line in f if line.strip()]
        mine = [v.predicted for v, _ in verdicts]
        truth = [label for _, label in verdicts]
        mcnemar_result = evaluation.mcnemar(mine, other, truth)

    out_json = _opt(args, cfg, "out_json")
    if out_json:
        Path(out_json).write_text(evaluation.report_json(report, mcnemar_result))

    # distance-distribution series, derived from the raw store at report time
    dist_groups = {"same_author": store.same_sorted.tolist(),
                   "diff_author": store.diff_sorted.tolist()}
    hist_path = _opt(args, cfg, "out_dist_hist")
    if hist_path:
        detection.write_csv(detection.histogram_series(dist_groups), hist_path)
    cdf_path = _opt(args, cfg, "out_dist_cdf")
    if cdf_path:
        detection.write_csv(detection.cdf_series(dist_groups, value_key="distance"),
                            cdf_path)

    if getattr(args, "json", False):
        payload = report.to_dict()
        if mcnemar_result is not None:
            payload["mcnemar"] = vars(mcnemar_result)
        print(json.dumps(payload))
    else:
        print(evaluation.render_table(report, mcnemar_result))
    return EXIT_OK


def cmd_imitate(args, cfg: dict) -> int:
    store, vocab = _load_store_and_vocab(args, cfg)
    segments = corpus_mod.read_segments(_require(args, cfg, "segments"))
    emb_path = _opt(args, cfg, "embeddings")
    embeddings = features.load_embeddings(emb_path) if emb_path else None

    strategies = _opt(args, cfg, "strategies", ",".join(imitation.STRATEGIES))
    strategy_list = [s.strip() for s in strategies.split(",") if s.strip()]
    for s in strategy_list:
        if s not in imitation.STRATEGIES:
            raise ConfigError(f"unknown strategy {s!r}")

    offline_path = _opt(args, cfg, "offline")
    endpoint_url = _opt(args, cfg, "endpoint")
    corpus_path = _opt(args, cfg, "corpus")
    if offline_path:
        source = imitation.OfflineCompletions.load(offline_path)
    elif endpoint_url:
        source = imitation.EndpointConfig(
            url=endpoint_url,
            model_tag=_opt(args, cfg, "model_tag", "endpoint"),
            timeout=float(_opt(args, cfg, "timeout", 60.0)),
            retries=int(_opt(args, cfg, "retries", 2)),
        )
    else:
        raise ConfigError("imitate needs --offline or --endpoint")

    failures: list[dict] = []
    if corpus_path:
        docs = corpus_mod.load_corpus(corpus_path)
        specs = []
        for doc in docs:
            for strategy in strategy_list:
                try:
                    specs.append(imitation.make_prompt(doc, strategy))
                except StyleVerifyError as exc:
                    failures.append({"source_doc_id": doc.id, "strategy": strategy,
                                     "error": str(exc)})
        records, gen_failures = imitation.run_generation(specs, source)
        failures.extend(gen_failures)
    elif offline_path:
        records = [rec for rec in source.all_records()
                   if rec.strategy in strategy_list]
    else:
        raise ConfigError("--endpoint mode requires --corpus to build prompts")

    if _opt(args, cfg, "re_clean", False):
        config = _cleaning_config(args, cfg)
        kept = []
        for rec in records:
            report = corpus_mod.clean_document(
                RawDocument(f"gen:{rec.source_doc_id}", rec.text), config)
            ratio_rejects = [r for r in report.reject_reasons
                             if r != corpus_mod.REJECT_TOO_SHORT]
            if ratio_rejects:
                failures.append({"source_doc_id": rec.source_doc_id,
                                 "strategy": rec.strategy,
                                 "error": f"re-clean rejected: {ratio_rejects}"})
            else:
                kept.append(rec)
        records = kept

    table = imitation.score_imitation(records, segments, store, vocab, embeddings)
    out_csv = _opt(args, cfg, "out")
    if out_csv:
        detection.write_csv(table.to_csv_rows(), out_csv)
    failures_path = _opt(args, cfg, "failures")
    if failures_path:
        corpus_mod.write_jsonl(failures, failures_path)
    payload = {"records": len(records), "failures": len(failures),
               "accuracy": table.accuracy}
    _emit(payload, args,
          f"scored {len(records)} generations ({len(failures)} failures); "
          + "; ".join(f"{m}/{s}: {a:.3f}" for m, row in sorted(table.accuracy.items())
                      for s, a in row.items()))
    return EXIT_OK


def cmd_detect(args, cfg: dict) -> int:
    group_specs = _opt(args, cfg, "group") or []
    if isinstance(group_specs, dict):  # config-file form {"name": "path"}
        group_specs = [f"{k}={v}" for k, v in group_specs.items()]
    if not group_specs:
        raise ConfigError("detect needs at least one --group NAME=PATH")
    groups = {}
    for spec in group_specs:
        name, _, path = spec.partition("=")
        if not path:
            raise ConfigError(f"--group must look like NAME=PATH, got {spec!r}")
        groups[name] = detection.load_logprobs(path)

    thresholds_raw = _opt(args, cfg, "thresholds", "")
    thresholds = [float(t) for t in str(thresholds_raw).split(",") if t] \
        if thresholds_raw else []
    report = detection.detectability_report(groups, thresholds)

    out_json = _opt(args, cfg, "out_json")
    if out_json:
        Path(out_json).write_text(json.dumps(report.to_dict(), indent=2))
    group_ppls = {g: [report.per_doc[t.id] for t in docs]
                  for g, docs in groups.items()}
    hist_path = _opt(args, cfg, "out_hist")
    if hist_path:
        detection.write_csv(detection.histogram_series(group_ppls), hist_path)
    cdf_path = _opt(args, cfg, "out_cdf")
    if cdf_path:
        detection.write_csv(detection.cdf_series(group_ppls), cdf_path)
    payload = {"group_means": report.group_means,
               "cdf_at": {str(k): v for k, v in report.cdf_at.items()}}
    _emit(payload, args,
          "; ".join(f"{g}: mean ppl {m:.2f}" for g, m in report.group_means.items()))
    return EXIT_OK


def cmd_report(args, cfg: dict) -> int:
    inputs = _opt(args, cfg, "inputs") or []
    if isinstance(inputs, str):
        inputs = [p for p in inputs.split(",") if p]
    if not inputs:
        raise ConfigError("report needs --inputs FILE[,FILE...]")
    bundle: dict = {"artifacts": {}}
    for item in inputs:
        path = Path(item)
        if not path.exists():
            raise DataError(f"report input not found: {item}")
        if path.suffix == ".json":
            bundle["artifacts"][path.name] = json.loads(path.read_text())
        else:
            bundle["artifacts"][path.name] = path.read_text().splitlines()
    out = _require(args, cfg, "out")
    Path(out).write_text(json.dumps(bundle, indent=2))
    _emit({"bundled": len(bundle["artifacts"]), "out": out}, args,
          f"bundled {len(bundle['artifacts'])} artifacts into {out}")
    return EXIT_OK


# --- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    # --config/--json are accepted before or after the subcommand; SUPPRESS
    # keeps the subparser from clobbering a value parsed at the root
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS,
                        help="JSON config file with default option values")
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="machine-readable stdout")

    parser = argparse.ArgumentParser(
        prog="styleverify",
        description="Training-free authorship verification pipeline.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=lambda **kw: argparse.ArgumentParser(
                                    parents=[common], **kw))

    p = sub.add_parser("clean", help="clean a corpus and emit reports + segments")
    p.add_argument("--corpus")
    p.add_argument("--out-reports", dest="out_reports")
    p.add_argument("--out-segments", dest="out_segments")
    p.add_argument("--min-words", dest="min_words", type=int)
    p.add_argument("--max-numeric-ratio", dest="max_numeric_ratio", type=float)
    p.add_argument("--max-misspell-ratio", dest="max_misspell_ratio", type=float)
    p.add_argument("--max-token-type-ratio", dest="max_token_type_ratio", type=float)
    p.add_argument("--max-symbol-ratio", dest="max_symbol_ratio", type=float)
    p.add_argument("--wordlist")
    p.add_argument("--no-strip-paratext", dest="no_strip_paratext",
                   action="store_const", const=True)
    p.add_argument("--block-words", dest="block_words", type=int)
    p.set_defaults(func=cmd_clean)

    p = sub.add_parser("pairs", help="sample labeled pairs from segments")
    p.add_argument("--segments")
    p.add_argument("--corpus", help="optional corpus JSONL supplying author ids")
    p.add_argument("--n-positive", dest="n_positive", type=int)
    p.add_argument("--n-negative", dest="n_negative", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_pairs)

    p = sub.add_parser("embed-manifest", help="emit segment texts for the embedder")
    p.add_argument("--segments")
    p.add_argument("--out")
    p.set_defaults(func=cmd_embed_manifest)

    p = sub.add_parser("build", help="fit vocabulary and build the distance store")
    p.add_argument("--segments")
    p.add_argument("--pairs")
    p.add_argument("--embeddings")
    p.add_argument("--alpha", type=float)
    p.add_argument("--metric", choices=["cosine", "euclidean"])
    p.add_argument("--max-grams", dest="max_grams", type=int)
    p.add_argument("--out-store", dest="out_store")
    p.add_argument("--out-vocab", dest="out_vocab")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="classify two texts or a pair file")
    p.add_argument("--store")
    p.add_argument("--vocab")
    p.add_argument("--a")
    p.add_argument("--b")
    p.add_argument("--pairs")
    p.add_argument("--segments")
    p.add_argument("--embeddings")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("evaluate", help="score the verifier over labeled pairs")
    p.add_argument("--store")
    p.add_argument("--vocab")
    p.add_argument("--pairs")
    p.add_argument("--segments")
    p.add_argument("--embeddings")
    p.add_argument("--compare", help="JSONL of predictions for a McNemar comparison")
    p.add_argument("--out-json", dest="out_json")
    p.add_argument("--out-dist-hist", dest="out_dist_hist",
                   help="CSV of store distance histograms (same/diff)")
    p.add_argument("--out-dist-cdf", dest="out_dist_cdf",
                   help="CSV of store distance CDF samples (same/diff)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("imitate", help="run prompting conditions and score imitations")
    p.add_argument("--store")
    p.add_argument("--vocab")
    p.add_argument("--segments")
    p.add_argument("--corpus")
    p.add_argument("--offline", help="recorded completions JSONL")
    p.add_argument("--endpoint", help="generation endpoint URL")
    p.add_argument("--model-tag", dest="model_tag")
    p.add_argument("--timeout", type=float)
    p.add_argument("--retries", type=int)
    p.add_argument("--strategies")
    p.add_argument("--embeddings")
    p.add_argument("--re-clean", dest="re_clean", action="store_const", const=True)
    p.add_argument("--failures", help="write an error manifest JSONL here")
    p.add_argument("--out", help="Table-shaped CSV output")
    p.set_defaults(func=cmd_imitate)

    p = sub.add_parser("detect", help="perplexity report from token logprob files")
    p.add_argument("--group", action="append", metavar="NAME=PATH")
    p.add_argument("--thresholds")
    p.add_argument("--out-json", dest="out_json")
    p.add_argument("--out-hist", dest="out_hist")
    p.add_argument("--out-cdf", dest="out_cdf")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("report", help="bundle JSON/CSV artifacts into one file")
    p.add_argument("--inputs")
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(getattr(args, "config", None))
        return args.func(args, cfg)
    except StyleVerifyError as exc:
        print(json.dumps({"error": {"code": exc.code, "message": str(exc)}}),
              file=sys.stderr)
        if isinstance(exc, ConfigError):
            return EXIT_CONFIG
        if isinstance(exc, EndpointError):
            return EXIT_ENDPOINT
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(json.dumps({"error": {"code": "file-not-found", "message": str(exc)}}),
              file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
