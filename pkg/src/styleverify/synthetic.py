"""Synthetic two-author corpora from order-2 character Markov chains.

Each author owns a transition table biased toward a disjoint subset of the
alphabet, so character n-gram features separate the authors while the texts
still look like word/sentence/paragraph prose to the rest of the pipeline.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from itertools import accumulate

from .corpus import RawDocument, stage_rng

ALPHABET = "abcdefghijklmnopqrstuvwxyz"


@dataclass
class MarkovChain:
    """Order-2 chain over letters with per-context cumulative weights."""

    start: list[float]                       # cumulative, first letter
    first: dict[str, list[float]]            # cumulative, second letter
    trans: dict[str, list[float]]            # cumulative, given 2-letter context

    @classmethod
    def biased(cls, preferred: str, seed: int, boost: float = 8.0,
               jitter: float = 0.75) -> "MarkovChain":
        """Boost transitions into ``preferred`` letters; jitter every context
        so the chain carries order-2 structure rather than unigram bias."""
        rng = stage_rng(seed, f"markov.{preferred}")
        pref = set(preferred)

        def weights() -> list[float]:
            return list(accumulate(
                (boost if ch in pref else 1.0) * (1.0 + jitter * rng.random())
                for ch in ALPHABET
            ))

        start = weights()
        first = {a: weights() for a in ALPHABET}
        trans = {a + b: weights() for a in ALPHABET for b in ALPHABET}
        return cls(start=start, first=first, trans=trans)

    def word(self, rng, min_len: int = 3, max_len: int = 9) -> str:
        length = rng.randint(min_len, max_len)
        r = rng.random
        last = len(ALPHABET) - 1  # clamp: r()*cum[-1] can round up to cum[-1]

        def draw(cum: list[float]) -> str:
            return ALPHABET[min(bisect_right(cum, r() * cum[-1]), last)]

        chars = [draw(self.start)]
        if length > 1:
            chars.append(draw(self.first[chars[0]]))
        while len(chars) < length:
            chars.append(draw(self.trans[chars[-2] + chars[-1]]))
        return "".join(chars)


def synthesize_document(chain: MarkovChain, doc_id: str, author_id: str,
                        n_words: int, rng) -> RawDocument:
    """Prose-shaped text: sentences of 8-16 words, paragraphs of 5-8 sentences."""
    parts: list[str] = []
    words_done = 0
    sentences_in_par = 0
    par_target = rng.randint(5, 8)
    while words_done < n_words:
        sent_len = min(rng.randint(8, 16), n_words - words_done)
        sentence = " ".join(chain.word(rng) for _ in range(sent_len)) + "."
        parts.append(sentence)
        words_done += sent_len
        sentences_in_par += 1
        if sentences_in_par >= par_target and words_done < n_words:
            parts.append("\n\n")
            sentences_in_par = 0
            par_target = rng.randint(5, 8)
        else:
            parts.append(" ")
    text = "".join(parts).strip()
    return RawDocument(id=doc_id, text=text, source_domain="synthetic",
                       author_id=author_id)


def two_author_corpus(n_docs_per_author: int = 400, words_per_doc: int = 1200,
                      seed: int = 7, boost: float = 8.0,
                      ) -> tuple[list[RawDocument], dict[str, str]]:
    """Two disjointly biased authors; returns (documents, author map)."""
    specs = [("author_a", ALPHABET[:13]), ("author_b", ALPHABET[13:])]
    docs: list[RawDocument] = []
    authors: dict[str, str] = {}
    for author_id, preferred in specs:
        chain = MarkovChain.biased(preferred, seed=seed, boost=boost)
        for k in range(n_docs_per_author):
            rng = stage_rng(seed, f"synthetic.{author_id}.{k}")
            n_words = rng.randint(int(words_per_doc * 0.95), int(words_per_doc * 1.05))
            doc_id = f"{author_id}_{k:04d}"
            docs.append(synthesize_document(chain, doc_id, author_id, n_words, rng))
            authors[doc_id] = author_id
    return docs, authors
