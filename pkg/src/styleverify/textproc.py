"""Tokenization primitives used by cleaning, profiling, and prompting.

A "word" is any maximal non-whitespace run (Unicode whitespace semantics),
which keeps word counts locale-stable. Punctuation stripping removes leading
and trailing characters in Unicode category P*.
"""

from __future__ import annotations

import re
import unicodedata


def words(text: str) -> list[str]:
    """Split into maximal non-whitespace runs."""
    return text.split()


def word_spans(text: str) -> list[tuple[int, int]]:
    """(start, end) index of every word, in order."""
    return [m.span() for m in re.finditer(r"\S+", text)]


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def strip_token_punct(token: str) -> str:
    """Strip leading/trailing punctuation; interior characters stay."""
    start, end = 0, len(token)
    while start < end and _is_punct(token[start]):
        start += 1
    while end > start and _is_punct(token[end - 1]):
        end -= 1
    return token[start:end]


def normalize_token(token: str) -> str:
    return strip_token_punct(token.lower())


def content_tokens(text: str) -> list[str]:
    """Lowercased, punctuation-stripped tokens; empties dropped."""
    out = []
    for tok in text.split():
        norm = normalize_token(tok)
        if norm:
            out.append(norm)
    return out


_SENTENCE_END = re.compile(r"[.!?]+(?=\s|$)")


def sentences(text: str) -> list[str]:
    """Maximal spans ending in ``. ! ?`` followed by whitespace (or EOT).

    A trailing span with no terminal punctuation counts as a sentence too,
    so no words are silently dropped.
    """
    out = []
    pos = 0
    for m in _SENTENCE_END.finditer(text):
        chunk = text[pos:m.end()].strip()
        if chunk:
            out.append(chunk)
        pos = m.end()
    tail = text[pos:].strip()
    if tail:
        out.append(tail)
    return out


def paragraphs(text: str) -> list[str]:
    """Maximal runs of lines separated by blank lines."""
    out = []
    current: list[str] = []
    for line in text.splitlines():
        if line.strip():
            current.append(line)
        elif current:
            out.append("\n".join(current))
            current = []
    if current:
        out.append("\n".join(current))
    return out
