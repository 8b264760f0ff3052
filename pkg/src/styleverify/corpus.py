"""Corpus ingestion, deterministic cleaning filters, segmentation, pairing.

The cleaning stage strips paratext (page numbers, bibliographies, shared
headers/footers) and then applies five ordered accept/reject filters:
minimum length, numeric-character ratio, misspelling ratio, token-type
dominance, and symbol ratio.  Accepted documents are cut into two
non-adjacent word blocks (first and last), and labeled pair sets are sampled
reproducibly from the resulting segment index.
"""

from __future__ import annotations

import hashlib
import json
import random
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, NamedTuple

from .errors import (
    ConfigError,
    DataError,
    DuplicateIdError,
    IneligibleDocumentError,
    InsufficientCorpusError,
    MalformedRecordError,
)
from .textproc import content_tokens, normalize_token, word_spans

SOURCE_DOMAINS = ("academic", "conversational", "synthetic", "other")

LABEL_SAME = "same_author"
LABEL_DIFF = "different_author"

HEAD = "head"
TAIL = "tail"

REJECT_TOO_SHORT = "too_short"
REJECT_TOO_NUMERIC = "too_numeric"
REJECT_TOO_MISSPELLED = "too_misspelled"
REJECT_TOKEN_DOMINANCE = "token_dominance"
REJECT_TOO_SYMBOLIC = "too_symbolic"

# Characters exempt from the symbol filter (ordinary prose punctuation).
_EXEMPT_PUNCT = set(".,;:'\"!?()-—")

_PAGE_NUMBER_RE = re.compile(r"^\s*(page\s+\d+(\s+of\s+\d+)?|\d{1,4})\s*$", re.IGNORECASE)
_BIBLIOGRAPHY_MARKERS = frozenset({"references", "bibliography", "works cited"})

_DEFAULT_WORDLIST = Path(__file__).parent / "data" / "wordlist.txt"


def stage_rng(seed: int, stage: str) -> random.Random:
    """Named PRNG stream: one root seed, one independent stream per stage."""
    digest = hashlib.blake2b(f"{seed}/{stage}".encode(), digest_size=16).digest()
    return random.Random(int.from_bytes(digest, "big"))


@dataclass
class RawDocument:
    id: str
    text: str
    source_domain: str = "other"
    author_id: str | None = None

    def __post_init__(self):
        if not self.id:
            raise DataError("document id must be nonempty")
        if not self.text:
            raise DataError(f"document {self.id!r} has empty text")
        if self.source_domain not in SOURCE_DOMAINS:
            raise DataError(f"unknown source_domain {self.source_domain!r}")


@dataclass
class CleaningConfig:
    """Thresholds for the five accept/reject filters.

    A document is accepted iff word_count > min_words, numeric ratio
    < max_numeric_ratio, misspell ratio < max_misspell_ratio, dominant
    token-type ratio <= max_token_type_ratio, and symbol ratio
    < max_symbol_ratio.
    """

    min_words: int = 500
    max_numeric_ratio: float = 0.10
    max_misspell_ratio: float = 0.05
    max_token_type_ratio: float = 0.10
    max_symbol_ratio: float = 0.05
    wordlist_path: str | None = None
    strip_paratext: bool = True

    def __post_init__(self):
        if self.min_words < 1:
            raise ConfigError("min_words must be >= 1")
        for name in ("max_numeric_ratio", "max_misspell_ratio",
                     "max_token_type_ratio", "max_symbol_ratio"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {value}")


@dataclass
class CleaningReport:
    doc_id: str
    word_count: int
    numeric_char_ratio: float
    misspell_ratio: float
    max_token_type_ratio: float
    symbol_ratio: float
    paratext_lines_removed: int
    accepted: bool
    reject_reasons: list[str] = field(default_factory=list)


@dataclass
class Segment:
    doc_id: str
    position: str  # HEAD or TAIL
    text: str
    word_count: int

    @property
    def id(self) -> str:
        return f"{self.doc_id}#{self.position}"


class SegmentRef(NamedTuple):
    doc_id: str
    position: str

    @property
    def id(self) -> str:
        return f"{self.doc_id}#{self.position}"


@dataclass
class TextPair:
    a: SegmentRef
    b: SegmentRef
    label: str

    def __post_init__(self):
        if self.a == self.b:
            raise DataError("pair references the same segment twice")
        if self.label not in (LABEL_SAME, LABEL_DIFF):
            raise DataError(f"unknown pair label {self.label!r}")


@lru_cache(maxsize=4)
def _load_wordlist(path: str) -> frozenset[str]:
    with open(path, encoding="utf-8") as f:
        return frozenset(line.strip() for line in f if line.strip())


def load_wordlist(path: str | None = None) -> frozenset[str]:
    """Dictionary used for misspelling membership checks (one word per line)."""
    return _load_wordlist(str(path or _DEFAULT_WORDLIST))


def strip_paratext(text: str, *, page_numbers: bool = True,
                   bibliography: bool = True,
                   extra_line_patterns: Iterable[str] = ()) -> tuple[str, int]:
    """Remove paratext lines; returns (stripped text, lines removed).

    Default rules: page-number lines ("Page 3 of 12", bare integers up to
    four digits alone on a line) and everything from a line equal,
    case-insensitively, to "references"/"bibliography"/"works cited" to the
    end.  Idempotent by construction.
    """
    extra = [re.compile(p) for p in extra_line_patterns]
    # split strictly on \n so split + join round-trips any input unchanged
    lines = text.split("\n")

    cutoff = len(lines)
    if bibliography:
        for i, line in enumerate(lines):
            if line.strip().lower() in _BIBLIOGRAPHY_MARKERS:
                cutoff = i
                break

    kept: list[str] = []
    removed = len(lines) - cutoff
    for line in lines[:cutoff]:
        if page_numbers and _PAGE_NUMBER_RE.match(line):
            removed += 1
            continue
        if any(p.search(line) for p in extra):
            removed += 1
            continue
        kept.append(line)
    return "\n".join(kept), removed


def _digit_ratio(text: str) -> float:
    if not text:
        return 0.0
    return sum(ch.isdigit() for ch in text) / len(text)


def _symbol_ratio(text: str) -> float:
    if not text:
        return 0.0
    bad = sum(
        1
        for ch in text
        if not (ch.isalpha() or ch.isdigit() or ch.isspace() or ch in _EXEMPT_PUNCT)
    )
    return bad / len(text)


def _misspell_ratio(tokens: list[str], wordlist: frozenset[str]) -> float:
    checked = 0
    missed = 0
    for tok in tokens:
        norm = normalize_token(tok)
        if not norm or any(ch.isdigit() for ch in norm):
            continue  # digit-bearing tokens are skipped, not judged
        checked += 1
        if norm not in wordlist:
            missed += 1
    return missed / checked if checked else 0.0


def _dominance_ratio(text: str) -> float:
    toks = content_tokens(text)
    if not toks:
        return 0.0
    counts = Counter(toks)
    return max(counts.values()) / len(toks)


def clean_document(doc: RawDocument, config: CleaningConfig | None = None,
                   *, pre_removed_lines: int = 0) -> CleaningReport:
    """Apply paratext stripping then the five ordered filters.

    ``pre_removed_lines`` lets the batch cleaner account for lines it
    already removed via the cross-document header/footer heuristic.
    """
    config = config or CleaningConfig()
    if config.strip_paratext:
        text, removed = strip_paratext(doc.text)
    else:
        text, removed = doc.text, 0
    removed += pre_removed_lines

    tokens = text.split()
    wordlist = load_wordlist(config.wordlist_path)

    word_count = len(tokens)
    numeric = _digit_ratio(text)
    misspell = _misspell_ratio(tokens, wordlist)
    dominance = _dominance_ratio(text)
    symbol = _symbol_ratio(text)

    def passes(ratio: float, threshold: float) -> bool:
        # ratios never exceed 1, so a threshold of 1.0 disables the filter
        return ratio < threshold or threshold >= 1.0

    reasons: list[str] = []
    if not word_count > config.min_words:
        reasons.append(REJECT_TOO_SHORT)
    if not passes(numeric, config.max_numeric_ratio):
        reasons.append(REJECT_TOO_NUMERIC)
    if not passes(misspell, config.max_misspell_ratio):
        reasons.append(REJECT_TOO_MISSPELLED)
    if not dominance <= config.max_token_type_ratio:
        reasons.append(REJECT_TOKEN_DOMINANCE)
    if not passes(symbol, config.max_symbol_ratio):
        reasons.append(REJECT_TOO_SYMBOLIC)

    return CleaningReport(
        doc_id=doc.id,
        word_count=word_count,
        numeric_char_ratio=numeric,
        misspell_ratio=misspell,
        max_token_type_ratio=dominance,
        symbol_ratio=symbol,
        paratext_lines_removed=removed,
        accepted=not reasons,
        reject_reasons=reasons,
    )


def _shared_boundary_lines(texts: list[str]) -> tuple[set[str], set[str]]:
    """Line values repeated across documents at first/last position."""
    firsts = Counter()
    lasts = Counter()
    for text in texts:
        lines = [ln for ln in text.split("\n") if ln.strip()]
        if not lines:
            continue
        firsts[lines[0]] += 1
        lasts[lines[-1]] += 1
    return ({v for v, c in firsts.items() if c >= 2},
            {v for v, c in lasts.items() if c >= 2})


def _strip_shared_boundaries(text: str, headers: set[str], footers: set[str]) -> tuple[str, int]:
    lines = text.split("\n")
    removed = 0
    start, end = 0, len(lines)
    while start < end:
        if not lines[start].strip():
            start += 1
            continue
        if lines[start] in headers:
            start += 1
            removed += 1
            continue
        break
    while end > start:
        if not lines[end - 1].strip():
            end -= 1
            continue
        if lines[end - 1] in footers:
            end -= 1
            removed += 1
            continue
        break
    return "\n".join(lines[start:end]), removed


def clean_corpus(docs: list[RawDocument], config: CleaningConfig | None = None,
                 ) -> tuple[list[CleaningReport], dict[str, str]]:
    """Clean every document; returns (reports, stripped text per accepted id).

    With two or more documents, a header/footer heuristic first removes line
    values repeated verbatim at other documents' boundaries (the heuristic is
    disabled for a single document, where repetition cannot be observed).
    """
    config = config or CleaningConfig()
    seen: set[str] = set()
    for doc in docs:
        if doc.id in seen:
            raise DuplicateIdError(f"duplicate document id {doc.id!r}")
        seen.add(doc.id)

    pre_removed = {doc.id: 0 for doc in docs}
    texts = {doc.id: doc.text for doc in docs}
    if len(docs) >= 2 and config.strip_paratext:
        headers, footers = _shared_boundary_lines([d.text for d in docs])
        if headers or footers:
            for doc in docs:
                stripped, n = _strip_shared_boundaries(doc.text, headers, footers)
                texts[doc.id] = stripped
                pre_removed[doc.id] = n

    reports: list[CleaningReport] = []
    cleaned: dict[str, str] = {}
    for doc in docs:
        work = RawDocument(doc.id, texts[doc.id] or " ", doc.source_domain, doc.author_id)
        report = clean_document(work, config, pre_removed_lines=pre_removed[doc.id])
        reports.append(report)
        if report.accepted:
            final, _ = strip_paratext(texts[doc.id]) if config.strip_paratext else (texts[doc.id], 0)
            cleaned[doc.id] = final
    return reports, cleaned


def segment_document(doc: RawDocument, block_words: int = 500) -> tuple[Segment, Segment]:
    """Cut the first and last ``block_words`` words into head/tail segments.

    Requires at least ``2 * block_words`` words so the two blocks share no
    word position.  Original inter-word whitespace is preserved.
    """
    if block_words < 1:
        raise ConfigError("block_words must be >= 1")
    spans = word_spans(doc.text)
    n = len(spans)
    if n < 2 * block_words:
        raise IneligibleDocumentError(
            f"document {doc.id!r} has {n} words; needs >= {2 * block_words} for two "
            f"non-overlapping {block_words}-word blocks"
        )
    head_text = doc.text[spans[0][0]:spans[block_words - 1][1]]
    tail_text = doc.text[spans[n - block_words][0]:spans[n - 1][1]]
    return (
        Segment(doc.id, HEAD, head_text, block_words),
        Segment(doc.id, TAIL, tail_text, block_words),
    )


def _unrank_combination(t: int, k: int) -> tuple[int, int]:
    """t-th unordered index pair (i < j) out of k items, row-major order."""
    # row i contributes (k - 1 - i) pairs
    i = 0
    remaining = t
    while remaining >= k - 1 - i:
        remaining -= k - 1 - i
        i += 1
    return i, i + 1 + remaining


def build_pairs(segments: list[Segment], n_positive: int, n_negative: int,
                seed: int, authors: dict[str, str] | None = None) -> list[TextPair]:
    """Sample a balanced labeled pair set, reproducibly.

    Positive pairs join segments sharing an author key (the document id, or
    ``authors[doc_id]`` when author metadata exists — a lone document then
    contributes exactly its head+tail pair).  Negative pairs draw an
    unordered document pair with differing keys uniformly, then one segment
    from each document uniformly.  No unordered segment pair repeats.
    """
    if n_positive < 0 or n_negative < 0:
        raise ConfigError("pair counts must be non-negative")

    seen_ids: set[str] = set()
    for seg in segments:
        if seg.id in seen_ids:
            raise DuplicateIdError(f"duplicate segment id {seg.id!r}")
        seen_ids.add(seg.id)

    refs = [SegmentRef(s.doc_id, s.position) for s in segments]
    doc_ids = sorted({r.doc_id for r in refs})
    by_doc: dict[str, list[SegmentRef]] = {d: [] for d in doc_ids}
    for ref in refs:
        by_doc[ref.doc_id].append(ref)
    for d in by_doc:
        by_doc[d].sort()

    def key_of(doc_id: str) -> str:
        if authors and authors.get(doc_id):
            return authors[doc_id]
        return doc_id

    # --- positives -------------------------------------------------------
    groups: dict[str, list[SegmentRef]] = {}
    for d in doc_ids:
        groups.setdefault(key_of(d), []).extend(by_doc[d])
    group_list = sorted(groups.items())
    group_pair_counts = [len(g) * (len(g) - 1) // 2 for _, g in group_list]
    total_pos = sum(group_pair_counts)
    if n_positive > total_pos:
        raise InsufficientCorpusError(
            f"requested {n_positive} positive pairs but only {total_pos} exist"
        )

    rng_pos = stage_rng(seed, "pairs.positive")
    positives: list[tuple[SegmentRef, SegmentRef]] = []
    if n_positive:
        if n_positive > total_pos // 2:
            all_pos = [
                (g[i], g[j])
                for _, g in group_list
                for i in range(len(g))
                for j in range(i + 1, len(g))
            ]
            positives = sorted(rng_pos.sample(all_pos, n_positive))
        else:
            chosen: set[int] = set()
            while len(chosen) < n_positive:
                t = rng_pos.randrange(total_pos)
                chosen.add(t)
            for t in sorted(chosen):
                acc = 0
                for (_, g), cnt in zip(group_list, group_pair_counts):
                    if t < acc + cnt:
                        i, j = _unrank_combination(t - acc, len(g))
                        positives.append((g[i], g[j]))
                        break
                    acc += cnt

    # --- negatives -------------------------------------------------------
    n_docs = len(doc_ids)
    keys = [key_of(d) for d in doc_ids]
    combos_total = 0
    for i in range(n_docs):
        for j in range(i + 1, n_docs):
            if keys[i] != keys[j]:
                combos_total += len(by_doc[doc_ids[i]]) * len(by_doc[doc_ids[j]])
    if n_negative > combos_total:
        raise InsufficientCorpusError(
            f"requested {n_negative} negative pairs but only {combos_total} exist"
        )

    rng_neg = stage_rng(seed, "pairs.negative")
    negatives: list[tuple[SegmentRef, SegmentRef]] = []
    if n_negative:
        if n_negative > combos_total // 2:
            all_neg = [
                (a, b)
                for i in range(n_docs)
                for j in range(i + 1, n_docs)
                if keys[i] != keys[j]
                for a in by_doc[doc_ids[i]]
                for b in by_doc[doc_ids[j]]
            ]
            negatives = sorted(rng_neg.sample(all_neg, n_negative))
        else:
            seen_pairs: set[tuple[SegmentRef, SegmentRef]] = set()
            while len(seen_pairs) < n_negative:
                i = rng_neg.randrange(n_docs)
                j = rng_neg.randrange(n_docs)
                if i == j or keys[i] == keys[j]:
                    continue
                if i > j:
                    i, j = j, i
                a = rng_neg.choice(by_doc[doc_ids[i]])
                b = rng_neg.choice(by_doc[doc_ids[j]])
                seen_pairs.add((a, b))
            negatives = sorted(seen_pairs)

    pairs = [TextPair(a, b, LABEL_SAME) for a, b in positives]
    pairs.extend(TextPair(a, b, LABEL_DIFF) for a, b in negatives)
    return pairs


# --- corpus and artifact IO ------------------------------------------------

def load_corpus(path: str | Path) -> list[RawDocument]:
    """Load a directory of .txt files (stem = id) or a JSONL corpus."""
    path = Path(path)
    docs: list[RawDocument] = []
    if path.is_dir():
        for txt in sorted(path.glob("*.txt")):
            docs.append(RawDocument(id=txt.stem, text=txt.read_text(encoding="utf-8")))
    else:
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, 1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                    docs.append(RawDocument(
                        id=rec["id"],
                        text=rec["text"],
                        source_domain=rec.get("source_domain", "other"),
                        author_id=rec.get("author_id"),
                    ))
                except (json.JSONDecodeError, KeyError, TypeError) as exc:
                    raise MalformedRecordError(f"{path}:{lineno}: bad corpus record: {exc}")
    seen: set[str] = set()
    for doc in docs:
        if doc.id in seen:
            raise DuplicateIdError(f"duplicate document id {doc.id!r} in {path}")
        seen.add(doc.id)
    return docs


def write_jsonl(records: Iterable[dict], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for rec in records:
            f.write(json.dumps(rec, ensure_ascii=False) + "\n")


def write_reports(reports: list[CleaningReport], path: str | Path) -> None:
    write_jsonl((vars(r) for r in reports), path)


def write_segments(segments: list[Segment], path: str | Path) -> None:
    write_jsonl(({"doc_id": s.doc_id, "position": s.position, "text": s.text}
                 for s in segments), path)


def read_segments(path: str | Path) -> list[Segment]:
    segments = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                segments.append(Segment(
                    doc_id=rec["doc_id"],
                    position=rec["position"],
                    text=rec["text"],
                    word_count=len(rec["text"].split()),
                ))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise MalformedRecordError(f"{path}:{lineno}: bad segment record: {exc}")
    return segments


def write_pairs(pairs: list[TextPair], path: str | Path) -> None:
    write_jsonl(({"a_doc": p.a.doc_id, "a_pos": p.a.position,
                  "b_doc": p.b.doc_id, "b_pos": p.b.position,
                  "label": p.label} for p in pairs), path)


def read_pairs(path: str | Path) -> list[TextPair]:
    pairs = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                pairs.append(TextPair(
                    a=SegmentRef(rec["a_doc"], rec["a_pos"]),
                    b=SegmentRef(rec["b_doc"], rec["b_pos"]),
                    label=rec["label"],
                ))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise MalformedRecordError(f"{path}:{lineno}: bad pair record: {exc}")
    return pairs
