"""Style-imitation harness: statistical author profiles, the four prompting
conditions (zero-shot, one-shot, few-shot, completion), a pluggable
text-generation endpoint with an offline recorded-completions mode, and
scoring of generated texts against the verifier.
"""

from __future__ import annotations

import json
import math
import os
import time
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import LABEL_SAME, TAIL, RawDocument, Segment
from .errors import (
    ConfigError,
    DataError,
    EmptyInputError,
    EndpointError,
    InsufficientParagraphsError,
    MalformedRecordError,
    MissingOfflineRecordError,
    TooShortForCompletionError,
)
from .features import NGramVocabulary, fuse, vectorize_tfidf
from .textproc import content_tokens, paragraphs, sentences
from .verifier import DistanceDistribution, classify

# Fixed system preamble shared by every prompting condition.
PREAMBLE = "Output only the requested content. No prefaces, disclaimers, or explanations."

ZERO_SHOT = "zero_shot"
ONE_SHOT = "one_shot"
FEW_SHOT = "few_shot"
COMPLETION = "completion"
STRATEGIES = (ZERO_SHOT, ONE_SHOT, FEW_SHOT, COMPLETION)

PROFILE_MARKS = (".", ",", ";", ":", "!", "?", "—", "(", ")", '"')

ESSAY_WORDS = (300, 500)  # target band for the non-completion conditions


@dataclass
class StyleProfile:
    avg_sentence_words: float
    sentence_words_std: float
    punctuation_ratios: dict[str, float]  # per 1,000 characters
    top_bigrams: list[tuple[str, str, int]]  # (w1, w2, count), <= 20 rows
    type_token_ratio: float


@dataclass
class PromptSpec:
    source_doc_id: str
    strategy: str
    user_prompt: str
    target_words: tuple[int, int]
    system_preamble: str = PREAMBLE


@dataclass
class GenerationRecord:
    source_doc_id: str
    strategy: str
    model_tag: str
    text: str


def extract_style_profile(doc: RawDocument) -> StyleProfile:
    """Sentence-length stats, punctuation rates, common bigrams, and TTR."""
    text = doc.text
    sents = sentences(text)
    if not sents:
        raise EmptyInputError(f"document {doc.id!r} has no sentences",
                              code="empty-document")
    lengths = [len(s.split()) for s in sents]
    mean = sum(lengths) / len(lengths)
    std = math.sqrt(sum((x - mean) ** 2 for x in lengths) / len(lengths))

    char_count = len(text)
    ratios = {m: text.count(m) / char_count * 1000.0 for m in PROFILE_MARKS}

    tokens = content_tokens(text)
    bigrams = Counter(zip(tokens, tokens[1:]))
    top = sorted(bigrams.items(), key=lambda kv: (-kv[1], kv[0]))[:20]
    ttr = len(set(tokens)) / len(tokens) if tokens else 0.0

    return StyleProfile(
        avg_sentence_words=mean,
        sentence_words_std=std,
        punctuation_ratios=ratios,
        top_bigrams=[(w1, w2, c) for (w1, w2), c in top],
        type_token_ratio=ttr,
    )


def serialize_profile(profile: StyleProfile) -> str:
    """Fixed plain-text rendering embedded into zero-shot prompts."""
    lines = [
        f"Average sentence length: {profile.avg_sentence_words:.1f} words "
        f"(standard deviation {profile.sentence_words_std:.1f}).",
        "Punctuation marks per 1,000 characters: "
        + ", ".join(f"{m} {r:.2f}" for m, r in profile.punctuation_ratios.items()) + ".",
        "Most frequent word bigrams: "
        + (", ".join(f'"{w1} {w2}" ({c})' for w1, w2, c in profile.top_bigrams)
           if profile.top_bigrams else "none") + ".",
        f"Type-token ratio: {profile.type_token_ratio:.3f}.",
    ]
    return "\n".join(lines)


def _paragraphs_by_length(text: str) -> list[str]:
    """Paragraphs sorted by descending word count; ties keep document order."""
    paras = paragraphs(text)
    return sorted(paras, key=lambda p: -len(p.split()))


def make_prompt(doc: RawDocument, strategy: str,
                profile: StyleProfile | None = None,
                min_half_words: int = 50) -> PromptSpec:
    """Construct the user prompt for one of the four conditions."""
    if strategy == ZERO_SHOT:
        if profile is None:
            profile = extract_style_profile(doc)
        prompt = (
            f"Write an essay of {ESSAY_WORDS[0]}-{ESSAY_WORDS[1]} words on any topic "
            "of your choosing. Match the author described by this statistical style "
            "profile as closely as possible:\n\n"
            + serialize_profile(profile)
            + "\n\nDo not mention the profile or its numbers."
        )
        return PromptSpec(doc.id, strategy, prompt, ESSAY_WORDS)

    if strategy in (ONE_SHOT, FEW_SHOT):
        needed = 1 if strategy == ONE_SHOT else 2
        ranked = _paragraphs_by_length(doc.text)
        if len(ranked) < needed:
            raise InsufficientParagraphsError(
                f"document {doc.id!r} has {len(ranked)} paragraph(s); "
                f"{strategy} needs {needed}"
            )
        if strategy == ONE_SHOT:
            prompt = (
                "Below is a paragraph by a target author. Write an essay of "
                f"{ESSAY_WORDS[0]}-{ESSAY_WORDS[1]} words on a different topic, "
                "imitating this author's writing style.\n\n" + ranked[0]
            )
        else:
            prompt = (
                "Below are two paragraphs by a target author. Write an essay of "
                f"{ESSAY_WORDS[0]}-{ESSAY_WORDS[1]} words on a different topic, "
                "imitating this author's writing style.\n\n"
                + ranked[0] + "\n\n" + ranked[1]
            )
        return PromptSpec(doc.id, strategy, prompt, ESSAY_WORDS)

    if strategy == COMPLETION:
        words = doc.text.split()
        if len(words) < 2 * min_half_words:
            raise TooShortForCompletionError(
                f"document {doc.id!r} has {len(words)} words; completion needs "
                f">= {2 * min_half_words}"
            )
        split = (len(words) + 1) // 2  # first half takes the odd word
        first_half = " ".join(words[:split])
        second_len = len(words) - split
        prompt = (
            "Continue the passage below with a continuation of similar length "
            f"(about {second_len} words), without repetition or explicit reference "
            "to the original passage.\n\n" + first_half
        )
        return PromptSpec(doc.id, strategy, prompt, (second_len, second_len))

    raise ConfigError(f"unknown prompting strategy {strategy!r}")


@dataclass
class EndpointConfig:
    """Wire contract: POST {"system", "prompt", "max_words"} -> {"text"}."""

    url: str
    model_tag: str
    timeout: float = 60.0
    retries: int = 2
    retry_wait: float = 1.0
    auth_env: str = "STYLEVERIFY_ENDPOINT_TOKEN"


class OfflineCompletions:
    """Pre-generated texts joined to prompts by (source_doc_id, strategy)."""

    def __init__(self, records: Iterable[GenerationRecord]):
        self._by_key: dict[tuple[str, str], list[GenerationRecord]] = {}
        for rec in records:
            self._by_key.setdefault((rec.source_doc_id, rec.strategy), []).append(rec)

    @classmethod
    def load(cls, path: str | Path) -> "OfflineCompletions":
        records = []
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, 1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                    records.append(GenerationRecord(
                        source_doc_id=rec["source_doc_id"],
                        strategy=rec["strategy"],
                        model_tag=rec["model_tag"],
                        text=rec["text"],
                    ))
                except (json.JSONDecodeError, KeyError, TypeError) as exc:
                    raise MalformedRecordError(f"{path}:{lineno}: bad completion record: {exc}")
        return cls(records)

    def lookup(self, source_doc_id: str, strategy: str) -> list[GenerationRecord]:
        return self._by_key.get((source_doc_id, strategy), [])

    def all_records(self) -> list[GenerationRecord]:
        return [rec for recs in self._by_key.values() for rec in recs]


def generate(spec: PromptSpec, endpoint: "EndpointConfig | OfflineCompletions",
             ) -> GenerationRecord:
    """One generation: call the HTTP endpoint, or join an offline record."""
    if isinstance(endpoint, OfflineCompletions):
        matches = endpoint.lookup(spec.source_doc_id, spec.strategy)
        if not matches:
            raise MissingOfflineRecordError(
                f"no offline completion for ({spec.source_doc_id!r}, {spec.strategy!r})"
            )
        return matches[0]

    import requests

    headers = {}
    token = os.environ.get(endpoint.auth_env, "")
    if token:
        headers["Authorization"] = f"Bearer {token}"
    payload = {
        "system": spec.system_preamble,
        "prompt": spec.user_prompt,
        "max_words": spec.target_words[1],
    }
    last_error = "no attempt made"
    for attempt in range(endpoint.retries + 1):
        if attempt:
            time.sleep(endpoint.retry_wait)
        try:
            resp = requests.post(endpoint.url, json=payload, headers=headers,
                                 timeout=endpoint.timeout)
        except requests.RequestException as exc:
            last_error = str(exc)
            continue
        if resp.status_code // 100 != 2:
            last_error = f"HTTP {resp.status_code}"
            continue
        try:
            text = resp.json().get("text", "")
        except ValueError:
            last_error = "response body is not JSON"
            continue
        text = text.strip() if isinstance(text, str) else ""
        if not text:
            last_error = "endpoint returned empty text"
            continue
        return GenerationRecord(
            source_doc_id=spec.source_doc_id,
            strategy=spec.strategy,
            model_tag=endpoint.model_tag,
            text=text,
        )
    raise EndpointError(
        f"generation failed for ({spec.source_doc_id!r}, {spec.strategy!r}): {last_error}"
    )


def run_generation(specs: Sequence[PromptSpec],
                   endpoint: "EndpointConfig | OfflineCompletions",
                   ) -> tuple[list[GenerationRecord], list[dict]]:
    """Batch driver; failures land in an error manifest instead of aborting."""
    records: list[GenerationRecord] = []
    failures: list[dict] = []
    for spec in specs:
        try:
            if isinstance(endpoint, OfflineCompletions):
                matches = endpoint.lookup(spec.source_doc_id, spec.strategy)
                if not matches:
                    raise MissingOfflineRecordError(
                        f"no offline completion for ({spec.source_doc_id!r}, "
                        f"{spec.strategy!r})"
                    )
                records.extend(matches)
            else:
                records.append(generate(spec, endpoint))
        except (EndpointError, MissingOfflineRecordError) as exc:
            failures.append({
                "source_doc_id": spec.source_doc_id,
                "strategy": spec.strategy,
                "error": str(exc),
            })
    return records, failures


@dataclass
class ImitationTable:
    """Match accuracy per (model_tag, strategy) cell, Table-style."""

    accuracy: dict[str, dict[str, float]] = field(default_factory=dict)
    counts: dict[str, dict[str, int]] = field(default_factory=dict)

    def to_csv_rows(self) -> list[dict]:
        strategies = [s for s in STRATEGIES
                      if any(s in row for row in self.accuracy.values())]
        rows = []
        for model in sorted(self.accuracy):
            row: dict = {"model_tag": model}
            for s in strategies:
                if s in self.accuracy[model]:
                    row[s] = round(self.accuracy[model][s], 6)
            rows.append(row)
        return rows


def score_imitation(records: Sequence[GenerationRecord],
                    originals: "Mapping[str, Segment] | Sequence[Segment]",
                    store: DistanceDistribution,
                    vocab: NGramVocabulary,
                    embeddings: Mapping[str, object] | None = None,
                    ) -> ImitationTable:
    """Classify each (reference segment, generated text) pair and tabulate the
    fraction judged same-author per strategy and model.

    The reference for a source document is its tail segment (falling back to
    whatever single segment was supplied).  With a nonzero store alpha an
    embeddings map must cover both the reference ids ("<doc>#tail") and the
    generated ids ("<doc>#gen:<strategy>:<model_tag>").
    """
    if not isinstance(originals, Mapping):
        by_doc: dict[str, Segment] = {}
        for seg in originals:
            if seg.doc_id not in by_doc or seg.position == TAIL:
                by_doc[seg.doc_id] = seg
        originals = by_doc

    alpha = store.meta.alpha

    def embedding_for(key: str):
        if alpha == 0.0:
            return None
        if embeddings is None or key not in embeddings:
            raise DataError(
                f"store alpha={alpha} requires an embedding for {key!r}",
                code="missing-embedding",
            )
        return embeddings[key]

    matches: dict[str, dict[str, list[bool]]] = {}
    for rec in records:
        if rec.source_doc_id not in originals:
            raise DataError(f"no reference segment for source {rec.source_doc_id!r}")
        if not rec.text:
            raise MalformedRecordError("generation record has empty text")
        ref = originals[rec.source_doc_id]
        ref_vec = fuse(vectorize_tfidf(ref, vocab), embedding_for(ref.id), alpha)
        gen_key = f"{rec.source_doc_id}#gen:{rec.strategy}:{rec.model_tag}"
        gen_vec = fuse(vectorize_tfidf(rec.text, vocab), embedding_for(gen_key), alpha)
        verdict = classify(store, ref_vec, gen_vec)
        matches.setdefault(rec.model_tag, {}).setdefault(rec.strategy, []).append(
            verdict.predicted == LABEL_SAME
        )

    table = ImitationTable()
    for model, per_strategy in matches.items():
        table.accuracy[model] = {}
        table.counts[model] = {}
        for strategy, outcomes in per_strategy.items():
            table.accuracy[model][strategy] = sum(outcomes) / len(outcomes)
            table.counts[model][strategy] = len(outcomes)
    return table
